#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "radheat/barriers.hpp"

using namespace radheat;
using namespace radheat::barriers;

namespace {

const auto q5 = PotentialSpec::pure_power(3, 5);
const auto q7 = PotentialSpec::pure_power(3, 7);

std::vector<double> radii() { return potential::log_grid(1e-4, 1e4, 2000); }

}  // namespace

TEST_CASE("ground-state pair") {
  const auto pair = build_gs_pair(q7, 1.0, 1.1);
  CHECK(pair.upper.kind() == BarrierKind::Upper);
  CHECK(pair.lower.kind() == BarrierKind::Lower);
  CHECK(pair.upper.J() < 0.0);
  CHECK(pair.lower.J() > 0.0);
  CHECK(pair.upper.D() == doctest::Approx(1.0));
  CHECK(pair.lower.D() == doctest::Approx(1.1));
  CHECK(check_order(pair.upper, pair.lower, radii()).ordered);
  for (const auto* b : {&pair.upper, &pair.lower}) {
    const auto rep = verify_barrier(*b);
    CHECK(rep.passed);
    CHECK(rep.continuity <= 1e-10);
    CHECK(rep.residual <= 1e-8);
    CHECK_FALSE(rep.label_mismatch);
  }
  CHECK_THROWS(build_gs_pair(q7, 1.0, 1.0));
}

TEST_CASE("fast-decay pair over a sweep of glue radii") {
  double prev_D = 1e300, prev_Lu = 0.0, prev_Ll = 0.0;
  for (double tau : {-1.0, 0.0, 1.0, 2.0}) {
    const auto pair = build_fast_decay_pair(q7, tau);
    CHECK(pair.upper.D() == doctest::Approx(pair.lower.D()).epsilon(1e-12));
    CHECK(pair.upper.L() < pair.lower.L());
    CHECK(pair.upper.R_glue() == doctest::Approx(std::exp(tau)));
    CHECK(pair.upper.tail() == "fast");
    CHECK(check_order(pair.upper, pair.lower, radii()).ordered);
    CHECK(verify_barrier(pair.upper).passed);
    CHECK(verify_barrier(pair.lower).passed);
    CHECK(pair.upper.D() < prev_D);
    CHECK(pair.upper.L() > prev_Lu);
    CHECK(pair.lower.L() > prev_Ll);
    prev_D = pair.upper.D();
    prev_Lu = pair.upper.L();
    prev_Ll = pair.lower.L();
  }
}

TEST_CASE("slow-decay upper solution") {
  const auto chi = build_slow_decay_upper(q5, 0.0);
  CHECK(chi.kind() == BarrierKind::Upper);
  CHECK(chi.J() < 0.0);
  CHECK(std::isfinite(chi.D()));
  CHECK(chi.tail() == "slow");
  CHECK(chi.L() == doctest::Approx(std::cbrt(2.0 / 9.0)).epsilon(1e-6));
  CHECK(chi.U(1e4) * std::pow(1e4, 2.0 / 3.0) == doctest::Approx(std::cbrt(2.0 / 9.0)).epsilon(1e-3));
  CHECK(verify_barrier(chi).passed);
  // the centre value goes to zero as the glue radius grows
  double prev = chi.D();
  for (double tau : {1.0, 2.0, 4.0}) {
    const double D = build_slow_decay_upper(q5, tau).D();
    CHECK(D < prev);
    prev = D;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("regime checks") {
  const auto below_serrin = PotentialSpec::pure_power(3, 3.5);
  const auto n12 = PotentialSpec::pure_power(12, 5);
  CHECK(fast_decay_regime(q7).empty());
  CHECK(fast_decay_regime(q5).empty());
  CHECK_FALSE(fast_decay_regime(below_serrin).empty());
  CHECK(slow_decay_regime(q5).empty());
  CHECK(slow_decay_regime(q7).empty());
  // l_s at or above the upper node exponent
  CHECK_FALSE(slow_decay_regime(n12).empty());
  CHECK_THROWS_AS(build_slow_decay_upper(n12, 0.0), RegimeError);
  CHECK_THROWS_AS(build_fast_decay_pair(below_serrin, 0.0), RegimeError);
}

TEST_CASE("an exact stationary solution verifies as smooth") {
  const auto u = shooting::regular_solution(q7, 1.0, 1e3, {1e-13, 1e-15, 1e-8});
  const BarrierProfile b({{u, u.r_lo(), 1e3}}, BarrierKind::Smooth);
  const auto rep = verify_barrier(b);
  CHECK(b.kind() == BarrierKind::Smooth);
  CHECK(rep.junctions == 0);
  CHECK(rep.residual <= 1e-8);
  CHECK(b.R_glue() == std::numeric_limits<double>::infinity());
  CHECK(b.J() == 0.0);
}

TEST_CASE("swapping the pieces flips the kind") {
  const auto pair = build_gs_pair(q7, 1.0, 1.1);
  std::vector<Piece> swapped;
  const auto& up = pair.upper.pieces();
  const auto& lo = pair.lower.pieces();
  REQUIRE(up.size() == lo.size());
  for (std::size_t i = 0; i < up.size(); ++i) swapped.push_back({lo[i].profile, up[i].r_from, up[i].r_to});
  const BarrierProfile b(swapped, BarrierKind::Upper);
  CHECK(b.kind() == BarrierKind::Lower);
  const auto rep = verify_barrier(b);
  CHECK(rep.label_mismatch);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("order check detects reversed pairs") {
  const auto pair = build_gs_pair(q7, 1.0, 1.1);
  CHECK_FALSE(check_order(pair.lower, pair.upper, radii()).ordered);
}
