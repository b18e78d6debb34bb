#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/constants/constants.hpp>
#include <cmath>

#include "radheat/integrate.hpp"

using namespace radheat::integrate;

TEST_CASE("exponential decay") {
  const Field f = [](double, const double* y, double* dy) { dy[0] = -y[0]; };
  const auto tr = integrate(f, {1.0}, 0.0, 1.0);
  CHECK(tr.termination == Termination::Endpoint);
  CHECK(tr.eval(1.0)[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  // dense output between mesh points
  CHECK(tr.eval(0.37)[0] == doctest::Approx(std::exp(-0.37)).epsilon(1e-9));
  double dy = 0.0;
  tr.eval_derivative(0.5, &dy);
  CHECK(dy == doctest::Approx(-std::exp(-0.5)).epsilon(1e-7));
}

TEST_CASE("backward integration") {
  const Field f = [](double, const double* y, double* dy) { dy[0] = y[0]; };
  const auto tr = integrate(f, {1.0}, 0.0, -2.0);
  CHECK_FALSE(tr.forward());
  CHECK(tr.eval(-2.0)[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("terminal event on a linear crossing") {
  const Field f = [](double, const double*, double* dy) { dy[0] = -1.0; };
  Event ev;
  ev.fn = [](double, const double* y) { return y[0]; };
  ev.name = "zero";
  const auto tr = integrate(f, {1.0}, 0.0, 5.0, {ev});
  CHECK(tr.termination == Termination::Event);
  REQUIRE(tr.events.size() == 1);
  CHECK(std::abs(tr.events[0].s - 1.0) < 1e-12);
  CHECK(tr.s_end() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("event direction filter") {
  const Field f = [](double s, const double*, double* dy) { dy[0] = std::cos(s); };
  Event rising;
  rising.fn = [](double, const double* y) { return y[0]; };
  rising.direction = +1;
  rising.terminal = false;
  const auto tr = integrate(f, {0.0}, 0.1, 10.0, {rising});
  // y = sin s - sin 0.1 rises through zero at 2 pi + 0.1
  REQUIRE(tr.events.size() == 1);
  CHECK(tr.events[0].s == doctest::Approx(2.0 * boost::math::constants::pi<double>() + 0.1).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator energy over 100 periods") {
  const Field f = [](double, const double* y, double* dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  Tolerance tol;
  tol.rtol = 1e-10;
  tol.atol = 1e-12;
  const double T = 200.0 * boost::math::constants::pi<double>();
  const auto tr = integrate(f, {1.0, 0.0}, 0.0, T, {}, tol);
  double drift = 0.0;
  for (double s = 0.0; s <= T; s += 0.37) {
    const auto y = tr.eval(s);
    drift = std::max(drift, std::abs(0.5 * (y[0] * y[0] + y[1] * y[1]) - 0.5) / 0.5);
  }
  CHECK(drift < 1e-6);
}

TEST_CASE("overflow stops the run") {
  const Field f = [](double, const double* y, double* dy) { dy[0] = y[0] * y[0]; };
  const auto tr = integrate(f, {1.0}, 0.0, 2.0);
  CHECK(tr.termination != Termination::Endpoint);
  CHECK(tr.s_end() < 1.0 + 1e-6);
}
