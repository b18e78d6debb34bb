#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "radheat/potential.hpp"

using namespace radheat::potential;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> s_grid() {
  std::vector<double> s;
  for (int i = -40; i <= 40; ++i) s.push_back(0.5 * i);
  return s;
}

std::vector<double> y_grid() {
  std::vector<double> y;
  for (int i = 1; i <= 20; ++i) y.push_back(0.1 * i);
  return y;
}

}  // namespace

TEST_CASE("exponents of the pure power in three dimensions") {
  const auto ce = critical_exponents(PotentialSpec::pure_power(3, 7));
  CHECK(ce.serrin == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ce.sobolev == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(ce.fujita_plus_one == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(ce.sigma_low == doctest::Approx(4.1876).epsilon(1e-4));
  CHECK(ce.sigma_high == kInf);
  CHECK(ce.l_u == doctest::Approx(7.0));
  CHECK(ce.l_s == doctest::Approx(7.0));
  CHECK(ce.m_u == doctest::Approx(0.4));
  CHECK(ce.m_s == doctest::Approx(0.4));
}

TEST_CASE("upper node exponent is finite only above ten dimensions") {
  for (int n = 3; n <= 10; ++n) CHECK(critical_exponents(PotentialSpec::pure_power(n, 5)).sigma_high == kInf);
  const auto ce = critical_exponents(PotentialSpec::pure_power(12, 5));
  CHECK(ce.sigma_high == doctest::Approx((100.0 - 48.0 + 8.0 * std::sqrt(11.0)) / 20.0).epsilon(1e-12));
  CHECK(ce.sigma_high == doctest::Approx(3.9266).epsilon(1e-4));
  CHECK(ce.fujita_plus_one < ce.serrin);
  CHECK(ce.serrin < ce.sobolev);
  CHECK(ce.sobolev < ce.node_threshold);
}

TEST_CASE("l and m from the coefficient asymptotics") {
  const auto grow = critical_exponents(PotentialSpec::single_k(3, 7, Coefficient::affine_power(1.0, 1.0, 0.4)));
  CHECK(grow.l_u == doctest::Approx(7.0));
  CHECK(grow.l_s == doctest::Approx(2.0 * 7.4 / 2.4).epsilon(1e-12));
  const auto matukuma = critical_exponents(PotentialSpec::single_k(3, 6, Coefficient::rational_power(1.0, 1.0, 0.5)));
  CHECK(matukuma.l_u == doctest::Approx(6.0));
  CHECK(matukuma.l_s == doctest::Approx(2.0 * 5.5 / 1.5).epsilon(1e-12));
  CHECK(m_of_l(7.0) == doctest::Approx(0.4));
  CHECK(l_of(5.0, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS(m_of_l(2.0));
}

TEST_CASE("f, F and the derivative") {
  const auto p7 = PotentialSpec::pure_power(3, 7);
  CHECK(eval_f(p7, 0.0, 1.0) == 0.0);
  CHECK(eval_f(p7, 2.0, 5.0) == doctest::Approx(64.0));
  CHECK(eval_F_primitive(p7, 0.0, 3.0) == 0.0);
  CHECK(eval_F_primitive(p7, 1.0, 2.0) == doctest::Approx(1.0 / 7.0));
  CHECK(eval_df_du(p7, 2.0, 1.0) == doctest::Approx(6.0 * 32.0));
  const auto sum = PotentialSpec::sum_k(3, 3, Coefficient::constant(), 4, Coefficient::constant());
  CHECK(eval_F_primitive(sum, 1.0, 1.0) == doctest::Approx(1.0 / 3.0 + 1.0 / 4.0));
  // min(u^2, u^3) at u = 0.5
  const auto mn = PotentialSpec::min_k(3, 3, 4, Coefficient::constant());
  CHECK(eval_f(mn, 0.5, 1.0) == doctest::Approx(0.125));
  CHECK(eval_f(mn, 2.0, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("positivity and monotonicity in u, bounded r^2 f near the origin") {
  const auto spec = PotentialSpec::single_k(3, 5, Coefficient::power(2.0, -1.0));
  for (double r : log_grid(1e-8, 1e4, 60)) {
    double prev = 0.0;
    for (double u : {1e-3, 0.1, 1.0, 3.0}) {
      const double f = eval_f(spec, u, r);
      CHECK(f > prev);
      prev = f;
    }
    if (r < 1.0) CHECK(eval_f(spec, 1.0, r) * r * r <= 2.0);
  }
}

TEST_CASE("coefficient asymptotes at 1e-6 and 1e6") {
  const std::vector<Coefficient> ks = {Coefficient::power(2.0, 0.5), Coefficient::affine_power(1.0, 3.0, 0.4),
                                       Coefficient::rational_power(1.0, 1.0, 0.5),
                                       Coefficient::ratio_power(2.0, 1.0, 1.0, 4.0, 1.5)};
  for (const auto& k : ks) {
    const auto z = k.at_zero(), i = k.at_infinity();
    CHECK(k.value(1e-6) / (z.coeff * std::pow(1e-6, z.exponent)) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(k.value(1e6) / (i.coeff * std::pow(1e6, i.exponent)) == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("malformed specs are rejected") {
  CHECK_THROWS(PotentialSpec::pure_power(2, 5).validate());
  CHECK_THROWS(PotentialSpec::pure_power(3, 2).validate());
  CHECK_THROWS(Coefficient::power(-1.0, 0.0).validate());
  auto spec = PotentialSpec::pure_power(3, 5);
  spec.q.clear();
  CHECK_THROWS(spec.validate());
}

TEST_CASE("H sign follows the position of q relative to the Sobolev exponent") {
  const auto r = log_grid(1e-4, 1e4, 200);
  CHECK(check_H_sign(PotentialSpec::pure_power(3, 7), r).sign == HSign::HMinus);
  CHECK(check_H_sign(PotentialSpec::pure_power(3, 6), r).sign == HSign::Boundary);
  CHECK(check_H_sign(PotentialSpec::pure_power(3, 5), r).sign == HSign::HPlus);
}

TEST_CASE("A sign follows the s-dependence of G in the Sobolev frame") {
  CHECK(check_A_sign(PotentialSpec::pure_power(3, 7), s_grid(), y_grid()) == ASign::AMinus);
  CHECK(check_A_sign(PotentialSpec::pure_power(3, 5), s_grid(), y_grid()) == ASign::APlus);
  CHECK(check_A_sign(PotentialSpec::pure_power(3, 6), s_grid(), y_grid()) == ASign::Neither);
}

TEST_CASE("family names round trip") {
  for (auto f : {Family::PurePower, Family::SingleK, Family::SumK, Family::MinK})
    CHECK(family_from_string(to_string(f)) == f);
  CHECK_THROWS(family_from_string("cubic"));
}
