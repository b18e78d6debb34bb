#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "radheat/shooting.hpp"

using namespace radheat;
using namespace radheat::shooting;
using potential::Coefficient;

namespace {

const auto q5 = PotentialSpec::pure_power(3, 5);
const auto q7 = PotentialSpec::pure_power(3, 7);
const double P1_q7 = std::pow(0.24, 0.2);

}  // namespace

TEST_CASE("regular solutions start at alpha with zero slope") {
  const auto p = regular_solution(q7, 1.3, 10.0);
  CHECK(p.kind() == Kind::Regular);
  CHECK(p.param() == 1.3);
  CHECK(p.U(p.r_lo()) == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(std::abs(p.Up(p.r_lo())) < 1e-4);
  for (double r : potential::log_grid(p.r_lo(), 10.0, 50)) CHECK(p.residual(r) < 1e-6);
  CHECK_THROWS(regular_solution(q7, -1.0, 10.0));
}

TEST_CASE("subcritical regular solutions cross zero") {
  const auto p = regular_solution(q5, 1.0, 1e4);
  REQUIRE(p.crossed());
  const double R = p.zero_radius();
  CHECK(std::isfinite(R));
  CHECK(std::abs(p.U(R)) < 1e-10 * 1.0);
  CHECK(classify(p).tag == ClassTag::Crossing);
  CHECK(classify(p).value == doctest::Approx(R));
}

TEST_CASE("crossing radius decreases in alpha") {
  const auto curve = crossing_radius_curve(q5, {1e-3, 0.25, 0.5, 1.0}, 1e12);
  REQUIRE(curve.size() == 4);
  CHECK(curve[1].R > curve[2].R);
  CHECK(curve[2].R > curve[3].R);
  CHECK(curve[0].R > 10.0 * curve[3].R);
  for (const auto& c : crossing_radius_curve(q7, {0.5, 1.0}, 1e4)) CHECK(c.R == std::numeric_limits<double>::infinity());
}

TEST_CASE("scaling law of the autonomous problem") {
  const auto u1 = regular_solution(q7, 1.0, 1e4);
  const auto u2 = regular_solution(q7, 2.0, 1e3);
  double worst = 0.0;
  for (double r : potential::log_grid(1e-2, 1e2, 400)) worst = std::max(worst, std::abs(u2.U(r) - 2.0 * u1.U(r * std::pow(2.0, 2.5))));
  CHECK(worst < 1e-6);
}

TEST_CASE("singular solution of the pure power") {
  const auto s = singular_solution(q7);
  CHECK(s.kind() == Kind::Singular);
  for (double r : potential::log_grid(1e-3, 1.0, 60))
    CHECK(s.U(r) == doctest::Approx(P1_q7 * std::pow(r, -0.4)).epsilon(1e-6));
  CHECK(s.fit_singular() == doctest::Approx(P1_q7).epsilon(1e-6));
  // the slow-decay solution is the same constant trajectory
  const auto v = slow_decay_solution(q7);
  for (double r : {1e-2, 1.0, 1e2}) CHECK(v.U(r) == doctest::Approx(s.U(r)).epsilon(1e-6));
}

TEST_CASE("singular solution with a varying coefficient uses the inner limit") {
  const auto spec = PotentialSpec::single_k(3, 7, Coefficient::affine_power(1.0, 1.0, 0.4));
  const auto s = singular_solution(spec);
  // k -> 1 at the origin, so the inner constant is the pure power one
  CHECK(s.fit_singular() == doctest::Approx(P1_q7).epsilon(1e-4));
}

TEST_CASE("slow-decay solution of the subcritical power") {
  const auto v = slow_decay_solution(q5, 30.0, -60.0);
  CHECK(v.fit_slow() == doctest::Approx(std::cbrt(2.0 / 9.0)).epsilon(1e-6));
  for (double r : potential::log_grid(v.r_lo(), v.r_hi(), 100)) CHECK(v.U(r) > 0.0);
}

TEST_CASE("fast-decay solutions") {
  const auto v7 = fast_decay_solution(q7, 1.0, 1e-6);
  CHECK(v7.kind() == Kind::FastDecay);
  CHECK(v7.crossed());
  CHECK(v7.zero_radius() > 0.0);
  CHECK(v7.fit_fast() == doctest::Approx(1.0).epsilon(1e-8));
  const auto v5 = fast_decay_solution(q5, 1.0, std::exp(-60.0));
  CHECK_FALSE(v5.crossed());
  CHECK(classify(v5).tag == ClassTag::SGSFast);
}

TEST_CASE("supercritical regular solutions are slow-decay ground states") {
  for (double a : {0.5, 1.0, 2.0}) {
    const auto p = regular_solution(q7, a, 1e30);
    CHECK_FALSE(p.crossed());
    CHECK(classify(p).tag == ClassTag::GroundStateSlow);
    CHECK(p.fit_slow() == doctest::Approx(P1_q7).epsilon(1e-3));
  }
}

TEST_CASE("classification of truncated profiles is undecided") {
  CHECK(classify(regular_solution(q7, 1.0, 2.0)).tag == ClassTag::Undecided);
}

TEST_CASE("first intersection and its slope ordering") {
  const auto a1 = regular_solution(q7, 1.0, 1e5);
  const auto a2 = regular_solution(q7, 2.0, 1e5);
  const auto z = first_intersection(a2, a1);
  CHECK(z.r > 0.0);
  CHECK(a2.U(z.r) == doctest::Approx(a1.U(z.r)).epsilon(1e-9));
  CHECK(z.slope_gap < 0.0);
  CHECK_THROWS(first_intersection(a1, a1));
  const auto n12 = PotentialSpec::pure_power(12, 5);
  const auto b1 = regular_solution(n12, 1.0, 1e8), b2 = regular_solution(n12, 2.0, 1e8);
  CHECK_THROWS_AS(first_intersection(b2, b1), NotFound);
}

TEST_CASE("sign changes of differences") {
  const auto a1 = regular_solution(q7, 1.0, 1e5);
  const auto a2 = regular_solution(q7, 2.0, 1e5);
  CHECK(count_sign_changes(a1, a2, 1.0, 1e4) >= 3);
  CHECK(count_sign_changes(a1, a1, 1.0, 1e4) == 0);
  const auto n12 = PotentialSpec::pure_power(12, 5);
  CHECK(count_sign_changes(regular_solution(n12, 1.0, 1e8), regular_solution(n12, 2.0, 1e8), 1e-6, 1e8) == 0);
}

TEST_CASE("manifold slices") {
  const auto u = unstable_slice(q7, 0.0, {0.5, 1.0, 2.0});
  CHECK(u.unstable);
  REQUIRE(u.points.size() == 3);
  for (const auto& p : u.points) CHECK(std::isfinite(p.y1));
  const auto s = stable_slice(q7, 0.0, {0.5, 1.0});
  CHECK_FALSE(s.unstable);
  CHECK(s.points.size() == 2);
}
