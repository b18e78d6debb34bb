#include "radheat/potential.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

namespace radheat::potential {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(c0 + c1 e^x) for c0, c1 >= 0, not both zero.
double log_affine_exp(double c0, double c1, double x) {
  if (c1 == 0.0) return std::log(c0);
  if (c0 == 0.0) return std::log(c1) + x;
  if (x > 0.0) return std::log(c1) + x + std::log1p(c0 / c1 * std::exp(-x));
  return std::log(c0) + std::log1p(c1 / c0 * std::exp(x));
}

// c1 e^x / (c0 + c1 e^x)
double affine_weight(double c0, double c1, double x) {
  if (c1 == 0.0) return 0.0;
  if (c0 == 0.0) return 1.0;
  if (x > 0.0) return 1.0 / (1.0 + c0 / c1 * std::exp(-x));
  const double e = c1 / c0 * std::exp(x);
  return e / (1.0 + e);
}

double power_term(double u, double p) { return p == 0.0 ? 1.0 : std::pow(u, p); }

double min_branch_F(double u, double q1, double q2) {
  // integral of min(a^{q1-1}, a^{q2-1}), q1 < q2; the q2 branch is active on [0,1].
  if (u <= 1.0) return std::pow(u, q2) / q2;
  return 1.0 / q2 + (std::pow(u, q1) - 1.0) / q1;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::PurePower: return "PurePower";
    case Family::SingleK: return "SingleK";
    case Family::SumK: return "SumK";
    case Family::MinK: return "MinK";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "PurePower") return Family::PurePower;
  if (s == "SingleK") return Family::SingleK;
  if (s == "SumK") return Family::SumK;
  if (s == "MinK") return Family::MinK;
  throw std::invalid_argument("unknown potential family '" + s + "'");
}

const char* to_string(HSign s) {
  switch (s) {
    case HSign::HPlus: return "HPlus";
    case HSign::HMinus: return "HMinus";
    case HSign::Boundary: return "Boundary";
    case HSign::Indeterminate: return "Indeterminate";
  }
  return "?";
}

const char* to_string(ASign s) {
  switch (s) {
    case ASign::APlus: return "APlus";
    case ASign::AMinus: return "AMinus";
    case ASign::Neither: return "Neither";
  }
  return "?";
}

Coefficient Coefficient::constant(double K0) { return power(K0, 0.0); }

Coefficient Coefficient::power(double K0, double delta) {
  Coefficient c;
  c.form = "power";
  c.K0 = K0;
  c.delta = delta;
  return c;
}

Coefficient Coefficient::affine_power(double c0, double c1, double a) {
  Coefficient c;
  c.form = "affine_power";
  c.c0 = c0;
  c.c1 = c1;
  c.a = a;
  return c;
}

Coefficient Coefficient::rational_power(double c0, double c1, double a) {
  Coefficient c;
  c.form = "rational_power";
  c.c0 = 1.0;
  c.c1 = 0.0;
  c.d0 = c0;
  c.d1 = c1;
  c.a = a;
  return c;
}

Coefficient Coefficient::ratio_power(double c0, double c1, double d0, double d1, double a) {
  Coefficient c;
  c.form = "ratio_power";
  c.c0 = c0;
  c.c1 = c1;
  c.d0 = d0;
  c.d1 = d1;
  c.a = a;
  return c;
}

void Coefficient::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(K0) && K0 > 0.0)) throw std::invalid_argument("coefficient K0 must be > 0");
  if (!finite(delta)) throw std::invalid_argument("coefficient exponent must be finite");
  if (!(finite(a) && a > 0.0)) throw std::invalid_argument("coefficient rate a must be > 0");
  if (c0 < 0 || c1 < 0 || d0 < 0 || d1 < 0 || !(c0 + c1 > 0) || !(d0 + d1 > 0))
    throw std::invalid_argument("coefficient c0,c1,d0,d1 must be >= 0 with nonzero sums");
}

double Coefficient::log_value_s(double s) const {
  return std::log(K0) + delta * s + log_affine_exp(c0, c1, a * s) - log_affine_exp(d0, d1, a * s);
}

double Coefficient::value(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("coefficient evaluated at r <= 0");
  return std::exp(log_value_s(std::log(r)));
}

double Coefficient::dlog_ds(double s) const {
  return delta + a * affine_weight(c0, c1, a * s) - a * affine_weight(d0, d1, a * s);
}

Asymptote Coefficient::at_zero() const {
  const double num = c0 > 0 ? c0 : c1;
  const double den = d0 > 0 ? d0 : d1;
  const double ex = delta + (c0 > 0 ? 0.0 : a) - (d0 > 0 ? 0.0 : a);
  const bool flat = c0 * d1 == c1 * d0;
  const bool corrected = ((c0 > 0 && c1 > 0) || (d0 > 0 && d1 > 0)) && !flat;
  return {K0 * num / den, ex, corrected ? a : kInf};
}

Asymptote Coefficient::at_infinity() const {
  const double num = c1 > 0 ? c1 : c0;
  const double den = d1 > 0 ? d1 : d0;
  const double ex = delta + (c1 > 0 ? a : 0.0) - (d1 > 0 ? a : 0.0);
  const bool flat = c0 * d1 == c1 * d0;
  const bool corrected = ((c0 > 0 && c1 > 0) || (d0 > 0 && d1 > 0)) && !flat;
  return {K0 * num / den, ex, corrected ? a : kInf};
}

PotentialSpec PotentialSpec::pure_power(int n, double q) {
  PotentialSpec p;
  p.n = n;
  p.family = Family::PurePower;
  p.q = {q};
  p.k = {Coefficient::constant()};
  return p;
}

PotentialSpec PotentialSpec::single_k(int n, double q, Coefficient k) {
  PotentialSpec p;
  p.n = n;
  p.family = Family::SingleK;
  p.q = {q};
  p.k = {k};
  return p;
}

PotentialSpec PotentialSpec::sum_k(int n, double q1, Coefficient k1, double q2, Coefficient k2) {
  PotentialSpec p;
  p.n = n;
  p.family = Family::SumK;
  p.q = {q1, q2};
  p.k = {k1, k2};
  return p;
}

PotentialSpec PotentialSpec::min_k(int n, double q1, double q2, Coefficient k) {
  PotentialSpec p;
  p.n = n;
  p.family = Family::MinK;
  p.q = {q1, q2};
  p.k = {k};
  return p;
}

void PotentialSpec::validate() const {
  if (n <= 2) throw std::invalid_argument("dimension n must be > 2");
  for (double qi : q)
    if (!(std::isfinite(qi) && qi > 2.0)) throw std::invalid_argument("exponents q must be > 2");
  switch (family) {
    case Family::PurePower:
      if (q.size() != 1) throw std::invalid_argument("PurePower needs one exponent");
      break;
    case Family::SingleK:
      if (q.size() != 1 || k.size() != 1)
        throw std::invalid_argument("SingleK needs one exponent and one coefficient");
      break;
    case Family::SumK:
      if (q.size() != 2 || k.size() != 2)
        throw std::invalid_argument("SumK needs two exponents and two coefficients");
      break;
    case Family::MinK:
      if (q.size() != 2 || k.size() != 1)
        throw std::invalid_argument("MinK needs two exponents and one coefficient");
      if (!(q[0] < q[1])) throw std::invalid_argument("MinK needs q1 < q2");
      break;
  }
  for (const auto& c : k) {
    c.validate();
    const auto z = c.at_zero();
    if (!(z.exponent > -2.0))
      throw std::invalid_argument("coefficient too singular at r=0 (f r^2 must stay bounded)");
    const auto inf = c.at_infinity();
    if (!(inf.exponent > -2.0))
      throw std::invalid_argument("coefficient decays too fast at infinity (l would be <= 2)");
  }
}

namespace {

void check_args(double u, double r) {
  if (!(u >= 0.0)) throw std::domain_error("f evaluated at negative u");
  if (!(r > 0.0)) throw std::domain_error("f evaluated at r <= 0");
}

}  // namespace

double eval_f(const PotentialSpec& spec, double u, double r) {
  check_args(u, r);
  if (u == 0.0) return 0.0;
  switch (spec.family) {
    case Family::PurePower: return std::pow(u, spec.q[0] - 1.0);
    case Family::SingleK: return spec.k[0].value(r) * std::pow(u, spec.q[0] - 1.0);
    case Family::SumK:
      return spec.k[0].value(r) * std::pow(u, spec.q[0] - 1.0) +
             spec.k[1].value(r) * std::pow(u, spec.q[1] - 1.0);
    case Family::MinK:
      return spec.k[0].value(r) *
             std::min(std::pow(u, spec.q[0] - 1.0), std::pow(u, spec.q[1] - 1.0));
  }
  return 0.0;
}

double eval_F_primitive(const PotentialSpec& spec, double u, double r) {
  check_args(u, r);
  if (u == 0.0) return 0.0;
  switch (spec.family) {
    case Family::PurePower: return std::pow(u, spec.q[0]) / spec.q[0];
    case Family::SingleK: return spec.k[0].value(r) * std::pow(u, spec.q[0]) / spec.q[0];
    case Family::SumK:
      return spec.k[0].value(r) * std::pow(u, spec.q[0]) / spec.q[0] +
             spec.k[1].value(r) * std::pow(u, spec.q[1]) / spec.q[1];
    case Family::MinK: return spec.k[0].value(r) * min_branch_F(u, spec.q[0], spec.q[1]);
  }
  return 0.0;
}

double eval_df_du(const PotentialSpec& spec, double u, double r) {
  check_args(u, r);
  auto dpow = [u](double q) { return (q - 1.0) * power_term(u, q - 2.0); };
  switch (spec.family) {
    case Family::PurePower: return dpow(spec.q[0]);
    case Family::SingleK: return spec.k[0].value(r) * dpow(spec.q[0]);
    case Family::SumK:
      return spec.k[0].value(r) * dpow(spec.q[0]) + spec.k[1].value(r) * dpow(spec.q[1]);
    case Family::MinK: return spec.k[0].value(r) * (u >= 1.0 ? dpow(spec.q[0]) : dpow(spec.q[1]));
  }
  return 0.0;
}

double serrin(int n) { return 2.0 * (n - 1) / (n - 2); }
double sobolev(int n) { return 2.0 * n / (n - 2); }
double fujita_plus_one(int n) { return 2.0 * (n + 1) / n; }
double m_of_l(double l) {
  if (!(l > 2.0)) throw std::domain_error("m(l) requires l > 2");
  return 2.0 / (l - 2.0);
}
double l_of(double q, double delta) { return 2.0 * (q + delta) / (2.0 + delta); }

namespace {

struct EndData {
  double l;
  std::vector<std::size_t> dominant;
};

// Exponents of (q_i, k_i) at one end as seen by the Fowler limit.
std::vector<std::pair<double, Asymptote>> end_terms(const PotentialSpec& spec, bool at_inf) {
  std::vector<std::pair<double, Asymptote>> out;
  switch (spec.family) {
    case Family::PurePower: out.push_back({spec.q[0], {1.0, 0.0, kInf}}); break;
    case Family::SingleK:
      out.push_back({spec.q[0], at_inf ? spec.k[0].at_infinity() : spec.k[0].at_zero()});
      break;
    case Family::SumK:
      for (int i = 0; i < 2; ++i)
        out.push_back({spec.q[i], at_inf ? spec.k[i].at_infinity() : spec.k[i].at_zero()});
      break;
    case Family::MinK:
      // u = y r^{-m} is large near r=0 (q1 branch) and small near infinity (q2 branch).
      out.push_back({at_inf ? spec.q[1] : spec.q[0],
                     at_inf ? spec.k[0].at_infinity() : spec.k[0].at_zero()});
      break;
  }
  return out;
}

EndData end_data(const PotentialSpec& spec, bool at_inf) {
  const auto terms = end_terms(spec, at_inf);
  EndData d{at_inf ? kInf : -kInf, {}};
  for (const auto& [q, as] : terms) {
    const double l = l_of(q, as.exponent);
    d.l = at_inf ? std::min(d.l, l) : std::max(d.l, l);
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double l = l_of(terms[i].first, terms[i].second.exponent);
    if (std::abs(l - d.l) <= 1e-12 * std::abs(d.l)) d.dominant.push_back(i);
  }
  return d;
}

// Effective exponent q of the dominant limit at one end.
double effective_q(const PotentialSpec& spec, bool at_inf) {
  const auto terms = end_terms(spec, at_inf);
  const auto d = end_data(spec, at_inf);
  double q = 0.0;
  for (auto i : d.dominant) q = std::max(q, terms[i].first);
  return q;
}

}  // namespace

std::vector<LimitTerm> limit_terms(const PotentialSpec& spec, bool at_infinity) {
  spec.validate();
  const auto terms = end_terms(spec, at_infinity);
  const auto d = end_data(spec, at_infinity);
  std::vector<LimitTerm> out;
  for (auto i : d.dominant) out.push_back({terms[i].second.coeff, terms[i].first});
  return out;
}

double limit_rate(const PotentialSpec& spec, bool at_infinity) {
  spec.validate();
  const auto terms = end_terms(spec, at_infinity);
  const auto d = end_data(spec, at_infinity);
  const double m = m_of_l(d.l);
  double rate = kInf;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const bool dom = std::find(d.dominant.begin(), d.dominant.end(), i) != d.dominant.end();
    if (dom) {
      rate = std::min(rate, terms[i].second.correction);
    } else {
      const double gap = std::abs(2.0 + terms[i].second.exponent - m * (terms[i].first - 2.0));
      rate = std::min(rate, gap);
    }
  }
  return rate;
}

double augmentation_rate(const PotentialSpec& spec) {
  const double r = std::min(limit_rate(spec, false), limit_rate(spec, true));
  return std::isfinite(r) ? 0.5 * r : 1.0;
}

CriticalExponents critical_exponents(const PotentialSpec& spec) {
  spec.validate();
  CriticalExponents ce{};
  const int n = spec.n;
  ce.serrin = serrin(n);
  ce.sobolev = sobolev(n);
  ce.fujita_plus_one = fujita_plus_one(n);
  const double rt = std::sqrt(n - 1.0);
  ce.l_u = end_data(spec, false).l;
  ce.l_s = end_data(spec, true).l;
  if (!(ce.l_u > 2.0) || !(ce.l_s > 2.0))
    throw std::domain_error("critical_exponents: l <= 2, m(l) undefined");
  ce.m_u = m_of_l(ce.l_u);
  ce.m_s = m_of_l(ce.l_s);

  if (spec.family == Family::PurePower) {
    ce.sigma_low = 2.0 * (n - 2 + 2 * rt) / (n + 2 * rt - 4);
    if (n > 10) {
      ce.sigma_high = ((n - 2.0) * (n - 2.0) - 4.0 * n + 8.0 * rt) / ((n - 2.0) * (n - 10.0));
      ce.node_threshold = 2.0 + 4.0 / (n - 4.0 - 2.0 * rt);
    } else {
      ce.sigma_high = kInf;
      ce.node_threshold = kInf;
    }
  } else {
    // Roots in l of A(l)^2 - 4(q-2)C(l) = 0 with q the dominant exponent at r -> 0.
    const double q = effective_q(spec, false);
    const double N = n - 2.0;
    const double w = std::sqrt((q - 2.0) / (q - 1.0));
    const double m_hi = 0.5 * N * (1.0 + w), m_lo = 0.5 * N * (1.0 - w);
    ce.sigma_low = 2.0 + 2.0 / m_hi;
    ce.node_threshold = m_lo > 0.0 ? 2.0 + 2.0 / m_lo : kInf;
    ce.sigma_high = ce.node_threshold;
  }
  return ce;
}

HReport check_H_sign(const PotentialSpec& spec, const std::vector<double>& r_grid) {
  spec.validate();
  if (r_grid.empty()) throw std::invalid_argument("check_H_sign: empty grid");
  for (std::size_t j = 0; j < r_grid.size(); ++j)
    if (!(r_grid[j] > 0.0) || (j > 0 && !(r_grid[j] > r_grid[j - 1])))
      throw std::invalid_argument("check_H_sign: grid must be positive and increasing");
  const int n = spec.n;
  const double two_star = sobolev(n);

  std::vector<std::pair<double, const Coefficient*>> terms;
  const Coefficient unit = Coefficient::constant();
  switch (spec.family) {
    case Family::PurePower: terms.push_back({spec.q[0], &unit}); break;
    case Family::SingleK: terms.push_back({spec.q[0], &spec.k[0]}); break;
    case Family::SumK:
      terms.push_back({spec.q[0], &spec.k[0]});
      terms.push_back({spec.q[1], &spec.k[1]});
      break;
    case Family::MinK:
      terms.push_back({spec.q[0], &spec.k[0]});
      terms.push_back({spec.q[1], &spec.k[0]});
      break;
  }

  HReport rep;
  rep.scale = 0.0;
  using boost::math::quadrature::gauss_kronrod;
  for (const auto& [q, k] : terms) {
    const double e = (n - 2.0) * (two_star - q) / 2.0;
    // s^{n-1} k(s) (kappa(s) + e) ds in t = ln s
    auto integrand = [&, k = k](double t) {
      return std::exp(n * t + k->log_value_s(t)) * (k->dlog_ds(t) + e);
    };
    auto magnitude = [&, k = k](double t) {
      return std::exp(n * t + k->log_value_s(t)) * (std::abs(k->dlog_ds(t)) + std::abs(e));
    };
    const auto z = k->at_zero();
    if (!(n + z.exponent > 0.0))
      throw std::domain_error("check_H_sign: non-integrable singularity at r=0");
    // Split off the analytic leading part below t0.
    const double rate = std::isfinite(z.correction) ? z.correction : 1.0;
    const double t0 = std::min(std::log(r_grid.front()), std::log(1e-12) / rate);
    const double lead = z.coeff * (z.exponent + e) * std::exp((n + z.exponent) * t0) / (n + z.exponent);
    const double lead_abs = z.coeff * (std::abs(z.exponent) + std::abs(e)) *
                            std::exp((n + z.exponent) * t0) / (n + z.exponent);
    std::vector<double> row;
    double acc = lead, acc_abs = lead_abs, t_prev = t0;
    for (double r : r_grid) {
      const double t = std::log(r);
      if (t > t_prev) {
        acc += gauss_kronrod<double, 31>::integrate(integrand, t_prev, t, 15, 1e-12);
        acc_abs += gauss_kronrod<double, 31>::integrate(magnitude, t_prev, t, 15, 1e-12);
      }
      t_prev = std::max(t_prev, t);
      row.push_back(acc);
    }
    rep.scale = std::max(rep.scale, acc_abs);
    rep.integrals.push_back(std::move(row));
  }

  const double zero_tol = 1e-12 * rep.scale, strict_tol = 1e-9 * rep.scale;
  bool all_nonneg = true, all_nonpos = true, any_pos = false, any_neg = false;
  for (const auto& row : rep.integrals)
    for (double v : row) {
      if (v < -zero_tol) all_nonneg = false;
      if (v > zero_tol) all_nonpos = false;
      if (v > strict_tol) any_pos = true;
      if (v < -strict_tol) any_neg = true;
    }
  if (all_nonneg && all_nonpos) rep.sign = HSign::Boundary;
  else if (all_nonneg && any_pos) rep.sign = HSign::HPlus;
  else if (all_nonpos && any_neg) rep.sign = HSign::HMinus;
  else rep.sign = HSign::Indeterminate;
  return rep;
}

ASign check_A_sign(const PotentialSpec& spec, const std::vector<double>& s_grid,
                   const std::vector<double>& y1_grid) {
  spec.validate();
  if (s_grid.empty() || y1_grid.empty()) throw std::invalid_argument("check_A_sign: empty grid");
  const int n = spec.n;
  const double ms = (n - 2.0) / 2.0;
  // G(y1,s;2^*) = r^n F(y1 r^{-m*}, r) with r = e^s.
  auto G = [&](double y, double s) {
    return std::exp(n * s) * eval_F_primitive(spec, y * std::exp(-ms * s), std::exp(s));
  };
  const double h = 1e-5;
  bool any_pos = false, any_neg = false;
  for (double s : s_grid) {
    if (!std::isfinite(s)) throw std::invalid_argument("check_A_sign: non-finite s");
    for (double y : y1_grid) {
      if (!(std::isfinite(y) && y >= 0.0)) throw std::invalid_argument("check_A_sign: bad y1");
      if (y == 0.0) continue;
      const double gp = G(y, s + h), gm = G(y, s - h);
      const double d = (gp - gm) / (2.0 * h);
      const double tol = 1e-8 * std::max(std::abs(gp), std::abs(gm));
      if (d > tol) any_pos = true;
      if (d < -tol) any_neg = true;
    }
  }
  if (any_pos && !any_neg) return ASign::APlus;
  if (any_neg && !any_pos) return ASign::AMinus;
  return ASign::Neither;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace radheat::potential
