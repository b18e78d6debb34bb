#include "radheat/fowler.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <stdexcept>

namespace radheat::fowler {

using potential::Family;

FowlerParams FowlerParams::make(const PotentialSpec& spec, double l) {
  spec.validate();
  FowlerParams p;
  p.n = spec.n;
  p.l = l;
  p.m = potential::m_of_l(l);
  p.A = spec.n - 2.0 - 2.0 * p.m;
  p.C = p.m * (spec.n - 2.0 - p.m);
  p.varpi = potential::augmentation_rate(spec);
  return p;
}

FowlerParams FowlerParams::sobolev_frame(const PotentialSpec& spec) {
  FowlerParams p = make(spec, potential::sobolev(spec.n));
  // exact values rather than 2/(2^*-2)
  p.m = (spec.n - 2.0) / 2.0;
  p.A = 0.0;
  p.C = p.m * p.m;
  return p;
}

PhasePoint to_fowler(double U, double Up, double r, const FowlerParams& p) {
  if (!(r > 0.0)) throw std::domain_error("to_fowler: r must be > 0");
  const double s = std::log(r);
  const double rm = std::exp(p.m * s);
  return {U * rm, Up * rm * r, s};
}

RadialPoint from_fowler(const PhasePoint& pt, const FowlerParams& p) {
  const double r = std::exp(pt.s);
  const double rmm = std::exp(-p.m * pt.s);
  return {pt.y1 * rmm, pt.y2 * rmm / r, r};
}

PhasePoint change_frame(const PhasePoint& pt, double m_from, double m_to) {
  const double f = std::exp((m_to - m_from) * pt.s);
  return {pt.y1 * f, pt.y2 * f, pt.s};
}

namespace {

// sgn(y) exp(log k + (q-1) ln|y| + (m+2-m(q-1)) s) and its relatives.
double term_g(double logk, double q, double y, double s, double m) {
  if (y == 0.0) return 0.0;
  const double v = std::exp(logk + (q - 1.0) * std::log(std::abs(y)) + (m + 2.0 - m * (q - 1.0)) * s);
  return y > 0 ? v : -v;
}

double term_dg(double logk, double q, double y, double s, double m) {
  if (y == 0.0) return q == 2.0 ? std::exp(logk + 2.0 * s) : 0.0;
  return (q - 1.0) *
         std::exp(logk + (q - 2.0) * std::log(std::abs(y)) + (m + 2.0 - m * (q - 1.0)) * s);
}

double term_G(double logk, double q, double y, double s, double m) {
  if (y == 0.0) return 0.0;
  return std::exp(logk + q * std::log(std::abs(y)) + (2.0 * m + 2.0 - m * q) * s) / q;
}

bool same_l(double a, double b) { return std::abs(a - b) <= 1e-9 * std::abs(b); }

void check_limit_frame(const PotentialSpec& spec, const FowlerParams& p, SLimit lim) {
  if (lim.kind == SLimit::Finite) return;
  const auto ce = potential::critical_exponents(spec);
  const double l = lim.kind == SLimit::MinusInf ? ce.l_u : ce.l_s;
  if (!same_l(p.l, l))
    throw std::invalid_argument("limit of g requested in a frame other than l_u / l_s");
}

}  // namespace

double g_eval(const PotentialSpec& spec, double y1, double s, const FowlerParams& p) {
  const double m = p.m;
  switch (spec.family) {
    case Family::PurePower: return term_g(0.0, spec.q[0], y1, s, m);
    case Family::SingleK: return term_g(spec.k[0].log_value_s(s), spec.q[0], y1, s, m);
    case Family::SumK:
      return term_g(spec.k[0].log_value_s(s), spec.q[0], y1, s, m) +
             term_g(spec.k[1].log_value_s(s), spec.q[1], y1, s, m);
    case Family::MinK: {
      if (y1 == 0.0) return 0.0;
      const double lnu = std::log(std::abs(y1)) - m * s;
      const double q = lnu >= 0.0 ? spec.q[0] : spec.q[1];
      return term_g(spec.k[0].log_value_s(s), q, y1, s, m);
    }
  }
  return 0.0;
}

double dg_dy(const PotentialSpec& spec, double y1, double s, const FowlerParams& p) {
  const double m = p.m;
  switch (spec.family) {
    case Family::PurePower: return term_dg(0.0, spec.q[0], y1, s, m);
    case Family::SingleK: return term_dg(spec.k[0].log_value_s(s), spec.q[0], y1, s, m);
    case Family::SumK:
      return term_dg(spec.k[0].log_value_s(s), spec.q[0], y1, s, m) +
             term_dg(spec.k[1].log_value_s(s), spec.q[1], y1, s, m);
    case Family::MinK: {
      if (y1 == 0.0) return 0.0;
      const double lnu = std::log(std::abs(y1)) - m * s;
      const double q = lnu >= 0.0 ? spec.q[0] : spec.q[1];
      return term_dg(spec.k[0].log_value_s(s), q, y1, s, m);
    }
  }
  return 0.0;
}

double G_eval(const PotentialSpec& spec, double y1, double s, const FowlerParams& p) {
  const double m = p.m;
  switch (spec.family) {
    case Family::PurePower: return term_G(0.0, spec.q[0], y1, s, m);
    case Family::SingleK: return term_G(spec.k[0].log_value_s(s), spec.q[0], y1, s, m);
    case Family::SumK:
      return term_G(spec.k[0].log_value_s(s), spec.q[0], y1, s, m) +
             term_G(spec.k[1].log_value_s(s), spec.q[1], y1, s, m);
    case Family::MinK: {
      if (y1 == 0.0) return 0.0;
      const double q1 = spec.q[0], q2 = spec.q[1];
      const double logk = spec.k[0].log_value_s(s);
      const double lnu = std::log(std::abs(y1)) - m * s;
      if (lnu <= 0.0) return term_G(logk, q2, y1, s, m);
      return std::exp(logk + (2.0 * m + 2.0) * s) * (1.0 / q2 - 1.0 / q1) +
             term_G(logk, q1, y1, s, m);
    }
  }
  return 0.0;
}

double dG_ds(const PotentialSpec& spec, double y1, double s, const FowlerParams& p) {
  const double h = 1e-5;
  return (G_eval(spec, y1, s + h, p) - G_eval(spec, y1, s - h, p)) / (2.0 * h);
}

std::array<double, 2> vector_field(const PotentialSpec& spec, const PhasePoint& pt,
                                   const FowlerParams& p) {
  return {p.m * pt.y1 + pt.y2,
          -(p.n - 2.0 - p.m) * pt.y2 - g_eval(spec, pt.y1, pt.s, p)};
}

integrate::Field make_field(const PotentialSpec& spec, const FowlerParams& p) {
  return [spec, p](double s, const double* y, double* dy) {
    dy[0] = p.m * y[0] + y[1];
    dy[1] = -(p.n - 2.0 - p.m) * y[1] - g_eval(spec, y[0], s, p);
  };
}

double g_frozen(const PotentialSpec& spec, double y1, const FowlerParams& p, SLimit lim) {
  if (lim.kind == SLimit::Finite) return g_eval(spec, y1, lim.tau, p);
  check_limit_frame(spec, p, lim);
  double v = 0.0;
  for (const auto& t : potential::limit_terms(spec, lim.kind == SLimit::PlusInf))
    v += t.coeff * std::pow(std::abs(y1), t.q - 1.0);
  return y1 >= 0 ? v : -v;
}

double dg_frozen(const PotentialSpec& spec, double y1, const FowlerParams& p, SLimit lim) {
  if (lim.kind == SLimit::Finite) return dg_dy(spec, y1, lim.tau, p);
  check_limit_frame(spec, p, lim);
  double v = 0.0;
  for (const auto& t : potential::limit_terms(spec, lim.kind == SLimit::PlusInf))
    v += t.coeff * (t.q - 1.0) * std::pow(std::abs(y1), t.q - 2.0);
  return v;
}

double G_frozen(const PotentialSpec& spec, double y1, const FowlerParams& p, SLimit lim) {
  if (lim.kind == SLimit::Finite) return G_eval(spec, y1, lim.tau, p);
  check_limit_frame(spec, p, lim);
  double v = 0.0;
  for (const auto& t : potential::limit_terms(spec, lim.kind == SLimit::PlusInf))
    v += t.coeff * std::pow(std::abs(y1), t.q) / t.q;
  return v;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::UnstableNode: return "UnstableNode";
    case Stability::UnstableFocus: return "UnstableFocus";
    case Stability::Center: return "Center";
    case Stability::StableFocus: return "StableFocus";
    case Stability::StableNode: return "StableNode";
  }
  return "?";
}

double solve_g_equals(const PotentialSpec& spec, const FowlerParams& p, SLimit lim, double c) {
  if (!(c > 0.0)) throw std::domain_error("no positive fixed point: C(l) <= 0 (l <= 2_*)");
  auto h = [&](double y) { return g_frozen(spec, y, p, lim) / y - c; };
  double lo = 1.0, hi = 1.0;
  for (int i = 0; h(lo) >= 0.0; ++i) {
    lo *= 0.5;
    if (i > 2000) throw std::runtime_error("no positive fixed point found (lower bracket)");
  }
  for (int i = 0; h(hi) <= 0.0; ++i) {
    hi *= 2.0;
    if (i > 2000) throw std::runtime_error("no positive fixed point found (upper bracket)");
  }
  boost::uintmax_t iters = 200;
  auto res = boost::math::tools::toms748_solve(h, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                               iters);
  const double y = 0.5 * (res.first + res.second);
  // one Newton polish step
  const double gy = g_frozen(spec, y, p, lim), dg = dg_frozen(spec, y, p, lim);
  const double y_new = y - (gy - c * y) / (dg - c);
  return std::isfinite(y_new) && y_new > 0.0 && std::abs(y_new - y) < 1e-10 * y ? y_new : y;
}

FixedPointInfo fixed_point_P(const PotentialSpec& spec, const FowlerParams& p, SLimit lim) {
  FixedPointInfo info;
  info.P1 = solve_g_equals(spec, p, lim, p.C);
  info.P2 = -p.m * info.P1;
  info.dg = dg_frozen(spec, info.P1, p, lim);
  const double det = info.dg - p.C;
  info.discriminant = p.A * p.A - 4.0 * det;
  const double A = std::abs(p.A) < 1e-12 ? 0.0 : p.A;
  if (info.discriminant >= 0.0 && A != 0.0) {
    info.tag = A < 0 ? Stability::UnstableNode : Stability::StableNode;
  } else {
    info.tag = A < 0 ? Stability::UnstableFocus : (A > 0 ? Stability::StableFocus : Stability::Center);
  }
  const double ms = (p.n - 2.0) / 2.0;
  info.H_at_P = ms * info.P1 * info.P2 + 0.5 * info.P2 * info.P2 + G_frozen(spec, info.P1, p, lim);
  const double ystar = solve_g_equals(spec, p, lim, ms * ms);
  info.b_star = -0.5 * ms * ms * ystar * ystar + G_frozen(spec, ystar, p, lim);
  return info;
}

double pohozaev_H(const PotentialSpec& spec, const PhasePoint& pt, const FowlerParams& p) {
  return 0.5 * (p.n - 2.0) * pt.y1 * pt.y2 + 0.5 * pt.y2 * pt.y2 + G_eval(spec, pt.y1, pt.s, p);
}

double pohozaev_H_sobolev(const PotentialSpec& spec, const PhasePoint& pt, const FowlerParams& p) {
  const auto star = FowlerParams::sobolev_frame(spec);
  return pohozaev_H(spec, change_frame(pt, p.m, star.m), star);
}

const char* to_string(Topology t) {
  switch (t) {
    case Topology::Empty: return "Empty";
    case Topology::TwoLobes: return "TwoLobes";
    case Topology::FigureEight: return "FigureEight";
    case Topology::SingleLoop: return "SingleLoop";
    case Topology::Unknown: return "Unknown";
  }
  return "?";
}

}  // namespace radheat::fowler
