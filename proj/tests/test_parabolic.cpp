#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "radheat/parabolic.hpp"

using namespace radheat;
using namespace radheat::parabolic;

namespace {

const auto q7 = PotentialSpec::pure_power(3, 7);

double gauss(double r) { return std::exp(-r * r); }

double gauss_flow(double t, double r) { return std::pow(1.0 + 4.0 * t, -1.5) * std::exp(-r * r / (1.0 + 4.0 * t)); }

std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
  std::vector<double> v;
  for (double r : g.r) v.push_back(f(r));
  return v;
}

std::vector<SeriesPoint> series(const std::vector<double>& norms, const std::vector<double>& dts) {
  std::vector<SeriesPoint> s;
  double t = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    t += dts[i];
    s.push_back({t, norms[i], {}, dts[i]});
  }
  return s;
}

}  // namespace

TEST_CASE("heat kernel identities") {
  CHECK(heat_semigroup_3d([](double) { return 1.0; }, 0.3, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(heat_semigroup_3d([](double) { return 1.0; }, 0.3, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : {0.0, 0.5, 2.0, 4.0})
    CHECK(heat_semigroup_3d(gauss, 0.1, r) == doctest::Approx(gauss_flow(0.1, r)).epsilon(1e-9));
  for (double r : {0.3, 1.0, 1.5}) CHECK(std::abs(heat_semigroup_3d(gauss, 1e-10, r) - gauss(r)) < 1e-6);
  CHECK_THROWS(heat_semigroup_3d(gauss, -1.0, 1.0));
}

TEST_CASE("grids") {
  const auto g = RadialGrid::graded(3, 0.0, 100.0, 0.01, 1.05);
  CHECK(g.has_centre());
  CHECK(g.r_max() == doctest::Approx(100.0));
  CHECK(g.h_min() == doctest::Approx(g.r[1] - g.r[0]));
  const auto f = g.refined();
  CHECK(f.h_min() < 0.6 * g.h_min());
  CHECK(f.r_max() == doctest::Approx(100.0));
  const auto u = RadialGrid::uniform(3, 8.0, 80);
  CHECK(u.size() == 81);
  CHECK(u.refined().size() == 161);
  CHECK_THROWS(RadialGrid::graded(3, 1.0, 0.5, 0.01, 1.0));
}

TEST_CASE("weights and norms") {
  const auto g = RadialGrid::graded(3, 1e-4, 100.0, 1e-4, 1.05);
  const std::vector<double> ones(g.size(), 1.0);
  CHECK(weighted_norm(g, ones, {0.0, 0.0}) == 1.0);
  CHECK(weighted_norm(g, ones, {0.3, 0.0}) == doctest::Approx(1.0));
  CHECK(augmented_norm(g, ones, 0.5) == doctest::Approx(1.0 + 10.0));
  // singular data below the admissible exponent stays finite, dominated by inner nodes
  std::vector<double> sing;
  for (double r : g.r) sing.push_back(0.75 * std::pow(r, -0.4));
  const double nrm = weighted_norm(g, sing, {0.3, 0.0});
  CHECK(std::isfinite(nrm));
  CHECK(nrm == doctest::Approx(0.75 * std::pow(1e-4, -0.1)).epsilon(1e-12));
  CHECK_THROWS(validate_weight(q7, {0.5, 0.0}));
  CHECK_NOTHROW(validate_weight(q7, {0.3, 0.0}));
}

TEST_CASE("contraction radius and time") {
  const auto a = suggested_rho_T(q7, 1.0, {0.0, 0.0});
  CHECK(a.D1 == 1.0);
  CHECK(a.rho == doctest::Approx(10.0));
  CHECK(a.T0 > 0.0);
  CHECK(suggested_rho_T(q7, 2.0, {0.0, 0.0}).rho == doctest::Approx(20.0));
  CHECK(suggested_rho_T(q7, 1.0, {0.2, 0.0}).D1 == doctest::Approx(std::exp(-0.1) * std::pow(3.2, 0.1)).epsilon(1e-12));
}

TEST_CASE("fate detection") {
  std::vector<double> halving, flat, ones(40, 1.0);
  for (int i = 0; i < 40; ++i) halving.push_back(std::pow(0.5, i));
  CHECK(detect_fate(series(halving, ones)).kind == FateKind::Decayed);
  for (int i = 0; i < 40; ++i) flat.push_back(3.0);
  CHECK(detect_fate(series(flat, ones)).kind == FateKind::Steady);
  std::vector<double> doubling, shrinking;
  for (int i = 0; i < 24; ++i) {
    doubling.push_back(std::pow(2.0, i));
    shrinking.push_back(std::pow(0.5, i));
  }
  const auto bu = detect_fate(series(doubling, shrinking));
  CHECK(bu.kind == FateKind::BlowUp);
  CHECK(bu.time > 1.9);
  CHECK(bu.time < 2.1);
  // growth without dt collapse is not blow-up
  CHECK(detect_fate(series(doubling, std::vector<double>(24, 1.0))).kind == FateKind::Undecided);
}

TEST_CASE("method of lines against the heat kernel") {
  double prev = 0.0;
  for (std::size_t cells : {80, 160, 320}) {
    const auto g = RadialGrid::uniform(3, 8.0, cells);
    EvolveControls c;
    c.scheme = Scheme::Explicit;
    c.t_end = 0.1;
    c.output_times = {0.1};
    c.stop_on_fate = false;
    const auto res = evolve(Source::zero(), g, sample(g, gauss), c);
    REQUIRE(res.snapshots.size() == 1);
    CHECK(res.snapshots[0].t == 0.1);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(res.snapshots[0].u[j] - gauss_flow(0.1, g.r[j])));
    err /= gauss_flow(0.1, 0.0);
    CHECK(err < 1e-3 * (cells == 80 ? 1.0 : 0.5));
    if (prev > 0.0) CHECK(prev / err >= 3.0);
    prev = err;
    CHECK(res.radially_nonincreasing);
    CHECK(res.nonincreasing == false);
  }
}

TEST_CASE("Picard iteration") {
  const auto zero = picard_mild(Source::zero(), 3, gauss, 0.05, 2);
  CHECK(zero.residual() < 1e-8);
  for (std::size_t j = 0; j < zero.r.size(); j += 10) CHECK(std::abs(zero.u[j] - gauss_flow(0.05, zero.r[j])) < 1e-9);
  const auto pr = picard_mild(q7, gauss, 0.05, 5);
  CHECK(pr.contracting);
  for (std::size_t i = 1; i < pr.residuals.size(); ++i) CHECK(pr.residuals[i] < 0.2 * pr.residuals[i - 1]);
  // u_t = u'' + 2u'/r + u against the method of lines
  const auto lin = picard_mild(Source::linear(1.0), 3, gauss, 0.05, 8);
  const auto g = RadialGrid::uniform(3, 8.0, 640);
  EvolveControls c;
  c.scheme = Scheme::Explicit;
  c.t_end = 0.05;
  c.output_times = {0.05};
  c.stop_on_fate = false;
  const auto mol = evolve(Source::linear(1.0), g, sample(g, gauss), c);
  double err = 0.0;
  for (std::size_t j = 0; j < lin.r.size(); ++j) err = std::max(err, std::abs(lin.u[j] - mol.snapshots[0].u[4 * j]));
  CHECK(err < 1e-3);
  CHECK_THROWS(picard_mild(PotentialSpec::pure_power(4, 7), gauss, 0.05, 2));
}

TEST_CASE("comparison of ordered data") {
  const auto g = RadialGrid::graded(3, 0.0, 20.0, 0.05, 1.05);
  auto hi = sample(g, gauss);
  std::vector<double> lo;
  for (double v : hi) lo.push_back(0.5 * v);
  EvolveControls c;
  c.t_end = 0.5;
  c.output_times = {0.1, 0.2, 0.5};
  c.stop_on_fate = false;
  const auto rh = evolve(q7, g, hi, c), rl = evolve(q7, g, lo, c);
  CHECK(comparison_check(rl, rh, g));
  CHECK(comparison_check(rh, rh, g));
  CHECK_FALSE(comparison_check(rh, rl, g));
  EvolveControls other = c;
  other.output_times = {0.3};
  CHECK_THROWS(compare_results(rl, evolve(q7, g, hi, other), g));
}

TEST_CASE("discrete barriers are exact discrete upper and lower solutions") {
  const auto pair = barriers::build_gs_pair(q7, 1.0, 1.1);
  const auto g = RadialGrid::graded(3, 0.0, 1e3, 0.01, 1.02);
  const auto src = Source::from_spec(q7);
  const auto up = discretize_barrier(q7, pair.upper, g);
  const auto lo = discretize_barrier(q7, pair.lower, g);
  CHECK(up.kind == barriers::BarrierKind::Upper);
  CHECK(lo.kind == barriers::BarrierKind::Lower);
  CHECK(discrete_residual_violation(src, g, up.u, up.kappa, 0.0, up.kind) < 1e-8);
  CHECK(discrete_residual_violation(src, g, lo.u, lo.kappa, 0.0, lo.kind) < 1e-8);
  CHECK(up.u[0] == doctest::Approx(1.0).epsilon(1e-3));
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(up.u[j] <= lo.u[j] * (1.0 + 1e-10));
  // the marched stationary profile matches the continuous one at second order
  const auto u1 = shooting::regular_solution(q7, 1.0, 1e3);
  const auto m = march_outward(src, g, 1.0);
  double err = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) err = std::max(err, std::abs(m[j] - u1.U(g.r[j])));
  CHECK(err < 1e-3);
}

TEST_CASE("barrier data evolve monotonically in time") {
  const auto pair = barriers::build_gs_pair(q7, 1.0, 1.1);
  const auto g = RadialGrid::graded(3, 0.0, 1e3, 0.01, 1.02);
  const auto up = discretize_barrier(q7, pair.upper, g);
  const auto lo = discretize_barrier(q7, pair.lower, g);
  EvolveControls c;
  c.kappa = up.kappa;
  const auto ru = evolve(q7, g, up.u, c);
  CHECK(ru.fate.kind == FateKind::Decayed);
  CHECK(ru.nonincreasing);
  c.kappa = lo.kappa;
  const auto rl = evolve(q7, g, lo.u, c);
  CHECK(rl.fate.kind == FateKind::BlowUp);
  CHECK(rl.nondecreasing);
  CHECK(rl.series.back().norm_w > 1e6);
}

TEST_CASE("bad input is rejected") {
  const auto g = RadialGrid::graded(3, 0.0, 10.0, 0.1, 1.05);
  CHECK_THROWS(evolve(q7, g, std::vector<double>(g.size() - 1, 0.0)));
  std::vector<double> nan(g.size(), 0.0);
  nan[3] = std::nan("");
  CHECK_THROWS(evolve(q7, g, nan));
  CHECK(default_kappa(q7, "fast") == 1.0);
  CHECK(default_kappa(q7, "slow") == doctest::Approx(0.4));
  CHECK(scheme_from_string("explicit") == Scheme::Explicit);
  CHECK_THROWS(scheme_from_string("leapfrog"));
}
