#include "radheat/shooting.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

namespace radheat::shooting {

using fowler::PhasePoint;
using fowler::SLimit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// f extended oddly to u < 0.
double f_odd(const PotentialSpec& spec, double u, double r) {
  return u >= 0 ? potential::eval_f(spec, u, r) : -potential::eval_f(spec, -u, r);
}

// Smallest leading exponent of k_i at r -> 0 (dominant near the centre for fixed u).
double near_exponent(const PotentialSpec& spec) {
  if (spec.family == potential::Family::PurePower) return 0.0;
  double d = kInf;
  for (const auto& k : spec.k) d = std::min(d, k.at_zero().exponent);
  return d;
}

// Largest exponent p of f(beta r^{2-n}, r) ~ r^p at infinity.
double far_exponent(const PotentialSpec& spec) {
  const int n = spec.n;
  switch (spec.family) {
    case potential::Family::PurePower: return (2.0 - n) * (spec.q[0] - 1.0);
    case potential::Family::SingleK:
      return spec.k[0].at_infinity().exponent + (2.0 - n) * (spec.q[0] - 1.0);
    case potential::Family::SumK:
      return std::max(spec.k[0].at_infinity().exponent + (2.0 - n) * (spec.q[0] - 1.0),
                      spec.k[1].at_infinity().exponent + (2.0 - n) * (spec.q[1] - 1.0));
    case potential::Family::MinK:
      return spec.k[0].at_infinity().exponent + (2.0 - n) * (spec.q[1] - 1.0);
  }
  return 0.0;
}

// Regular expansion U = alpha - corr(r), U' = -dcorr(r).
struct RegularStart {
  double U, Up;
};

RegularStart regular_expansion(const PotentialSpec& spec, double alpha, double r) {
  if (r == 0.0) return {alpha, 0.0};
  const double d = near_exponent(spec);
  const double f = potential::eval_f(spec, alpha, r);
  return {alpha - f * r * r / ((2.0 + d) * (spec.n + d)), -f * r / (spec.n + d)};
}

struct TailStart {
  double V, Vp;
};

TailStart fast_tail(const PotentialSpec& spec, double beta, double r) {
  const int n = spec.n;
  const double p = far_exponent(spec);
  const double v0 = beta * std::pow(r, 2.0 - n);
  const double f = potential::eval_f(spec, v0, r);
  const double w = -f * r * r / ((p + 2.0) * (p + n));
  return {v0 + w, (2.0 - n) * v0 / r + w * (p + 2.0) / r};
}

integrate::Event zero_event() {
  integrate::Event e;
  e.fn = [](double, const double* y) { return y[0]; };
  e.direction = 0;
  e.terminal = true;
  e.name = "zero";
  return e;
}

integrate::Tolerance tolerance(const ShootOptions& opt) {
  integrate::Tolerance t;
  t.rtol = opt.rtol;
  t.atol = opt.atol;
  return t;
}

// Bisection on ln r for the radius where a monotone relative error crosses the target.
double solve_log_radius(const std::function<double(double)>& err_of_log_r, double target, double lo,
                        double hi) {
  auto h = [&](double t) { return std::log(err_of_log_r(t)) - std::log(target); };
  const double hl = h(lo), hh = h(hi);
  if (hl * hh > 0) {
    // accurate on the whole bracket: take the less accurate end
    if (hl <= 0 && hh <= 0) return hl > hh ? lo : hi;
    throw std::runtime_error("start radius not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) * h(lo) > 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Regular: return "Regular";
    case Kind::FastDecay: return "FastDecay";
    case Kind::Singular: return "Singular";
    case Kind::SlowDecay: return "SlowDecay";
  }
  return "?";
}

const char* to_string(ClassTag c) {
  switch (c) {
    case ClassTag::Crossing: return "Crossing";
    case ClassTag::GroundStateFast: return "GroundStateFast";
    case ClassTag::GroundStateSlow: return "GroundStateSlow";
    case ClassTag::SGSFast: return "SGSFast";
    case ClassTag::SGSSlow: return "SGSSlow";
    case ClassTag::Undecided: return "Undecided";
  }
  return "?";
}

StationaryProfile::StationaryProfile(PotentialSpec spec, FowlerParams frame, Kind kind, double param,
                                     integrate::Trajectory traj)
    : spec_(std::move(spec)), frame_(frame), kind_(kind), param_(param), traj_(std::move(traj)) {}

double StationaryProfile::s_lo() const { return std::min(traj_.s_begin(), traj_.s_end()); }
double StationaryProfile::s_hi() const { return std::max(traj_.s_begin(), traj_.s_end()); }

bool StationaryProfile::covers(double r) const {
  if (!(r > 0.0)) return kind_ == Kind::Regular && r == 0.0;
  const double s = std::log(r);
  return s >= s_lo() && s <= s_hi();
}

double StationaryProfile::zero_radius() const {
  if (!crossed()) return kInf;
  return std::exp(traj_.s_end());
}

PhasePoint StationaryProfile::phase(double s) const {
  double y[2];
  traj_.eval(s, y);
  return {y[0], y[1], s};
}

PhasePoint StationaryProfile::phase(double s, double m) const {
  return fowler::change_frame(phase(s), frame_.m, m);
}

double StationaryProfile::U(double r) const {
  if (kind_ == Kind::Regular && r < r_lo()) return regular_expansion(spec_, param_, r).U;
  if (kind_ == Kind::FastDecay && r > r_hi() && !crossed()) return fast_tail(spec_, param_, r).V;
  if (!covers(r)) throw std::out_of_range("profile evaluated outside its range");
  const auto p = phase(std::log(r));
  return fowler::from_fowler(p, frame_).U;
}

double StationaryProfile::Up(double r) const {
  if (kind_ == Kind::Regular && r < r_lo()) return regular_expansion(spec_, param_, r).Up;
  if (kind_ == Kind::FastDecay && r > r_hi() && !crossed()) return fast_tail(spec_, param_, r).Vp;
  if (!covers(r)) throw std::out_of_range("profile evaluated outside its range");
  const auto p = phase(std::log(r));
  return fowler::from_fowler(p, frame_).Up;
}

double StationaryProfile::Upp(double r) const {
  if (!covers(r) || r <= 0.0) throw std::out_of_range("profile evaluated outside its range");
  const double s = std::log(r);
  double y[2], dy[2];
  traj_.eval(s, y);
  traj_.eval_derivative(s, dy);
  const double m = frame_.m;
  return (dy[1] - (m + 1.0) * y[1]) * std::exp(-(m + 2.0) * s);
}

double StationaryProfile::residual(double r) const {
  const double u = U(r), up = Up(r), upp = Upp(r);
  const double lap = (spec_.n - 1.0) / r * up;
  const double f = f_odd(spec_, u, r);
  const double scale = std::abs(upp) + std::abs(lap) + std::abs(f);
  return scale > 0 ? std::abs(upp + lap + f) / scale : 0.0;
}

std::vector<Sample> StationaryProfile::samples(std::size_t count) const {
  std::vector<Sample> out;
  if (count < 2) count = 2;
  const double a = s_lo(), b = s_hi();
  for (std::size_t i = 0; i < count; ++i) {
    const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    const auto rp = fowler::from_fowler(phase(std::clamp(s, a, b)), frame_);
    out.push_back({rp.r, rp.U, rp.Up});
  }
  return out;
}

double StationaryProfile::fit_singular() const {
  const auto ce = potential::critical_exponents(spec_);
  return phase(s_lo(), ce.m_u).y1;
}

double StationaryProfile::fit_slow() const {
  const auto ce = potential::critical_exponents(spec_);
  return phase(s_hi(), ce.m_s).y1;
}

double StationaryProfile::fit_fast() const {
  const double s = s_hi();
  return phase(s).y1 * std::exp((spec_.n - 2.0 - frame_.m) * s);
}

Classification StationaryProfile::classification() const { return classify(*this); }

double regular_start_radius(const PotentialSpec& spec, double alpha, double accuracy) {
  auto err = [&](double t) {
    const double r = std::exp(t);
    return (alpha - regular_expansion(spec, alpha, r).U) / alpha;
  };
  return std::exp(solve_log_radius(err, accuracy, -300.0, 300.0));
}

double fast_decay_start_radius(const PotentialSpec& spec, double beta, double accuracy) {
  const int n = spec.n;
  const double p = far_exponent(spec);
  if (!(p + n < 0.0))
    throw std::domain_error("fast-decay solutions need f(beta r^{2-n}) r^n -> 0 (l_s > 2_*)");
  if (std::abs(p + 2.0) < 1e-12) throw std::domain_error("degenerate fast-decay expansion (p = -2)");
  auto err = [&](double t) {
    const double r = std::exp(t);
    const double v0 = beta * std::pow(r, 2.0 - n);
    const auto tail = fast_tail(spec, beta, r);
    return std::abs(tail.V - v0) / v0;
  };
  return std::exp(solve_log_radius(err, accuracy, -300.0, 300.0));
}

StationaryProfile regular_solution(const PotentialSpec& spec, double alpha, double r_max,
                                   const ShootOptions& opt) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("regular_solution: alpha must be > 0");
  const auto ce = potential::critical_exponents(spec);
  const auto fp = FowlerParams::make(spec, ce.l_u);
  if (!(r_max > 0.0)) throw std::invalid_argument("regular_solution: r_max must be > 0");
  // the expansion only gets better closer to the centre
  const double r0 = std::min(regular_start_radius(spec, alpha, opt.start_accuracy), r_max / std::exp(1.0));
  const auto st = regular_expansion(spec, alpha, r0);
  const auto p0 = fowler::to_fowler(st.U, st.Up, r0, fp);
  auto traj = integrate::integrate(fowler::make_field(spec, fp), {p0.y1, p0.y2}, p0.s, std::log(r_max),
                                   {zero_event()}, tolerance(opt));
  return StationaryProfile(spec, fp, Kind::Regular, alpha, std::move(traj));
}

StationaryProfile fast_decay_solution(const PotentialSpec& spec, double beta, double r_min,
                                      const ShootOptions& opt) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("fast_decay_solution: beta must be > 0");
  if (!(r_min > 0.0)) throw std::invalid_argument("fast_decay_solution: r_min must be > 0");
  const auto ce = potential::critical_exponents(spec);
  const auto fp = FowlerParams::make(spec, ce.l_s);
  // the tail expansion only gets better further out
  const double R0 = std::max(fast_decay_start_radius(spec, beta, opt.start_accuracy), std::exp(1.0) * r_min);
  const auto st = fast_tail(spec, beta, R0);
  const auto p0 = fowler::to_fowler(st.V, st.Vp, R0, fp);
  auto traj = integrate::integrate(fowler::make_field(spec, fp), {p0.y1, p0.y2}, p0.s, std::log(r_min),
                                   {zero_event()}, tolerance(opt));
  return StationaryProfile(spec, fp, Kind::FastDecay, beta, std::move(traj));
}

StationaryProfile singular_solution(const PotentialSpec& spec, double s0, double s_max,
                                    const ShootOptions& opt) {
  const auto ce = potential::critical_exponents(spec);
  if (!(ce.l_u > ce.serrin)) throw std::domain_error("singular_solution: needs l_u > 2_*");
  if (!(s_max > s0)) throw std::invalid_argument("singular_solution: s_max must exceed s0");
  const auto fp = FowlerParams::make(spec, ce.l_u);
  const auto P = fowler::fixed_point_P(spec, fp, SLimit::minus_inf());
  auto traj = integrate::integrate(fowler::make_field(spec, fp), {P.P1, P.P2}, s0, s_max,
                                   {zero_event()}, tolerance(opt));
  return StationaryProfile(spec, fp, Kind::Singular, kInf, std::move(traj));
}

StationaryProfile slow_decay_solution(const PotentialSpec& spec, double s0, double s_min,
                                      const ShootOptions& opt) {
  const auto ce = potential::critical_exponents(spec);
  if (!(ce.l_s > ce.serrin)) throw std::domain_error("slow_decay_solution: needs l_s > 2_*");
  if (!(s_min < s0)) throw std::invalid_argument("slow_decay_solution: s_min must be below s0");
  const auto fp = FowlerParams::make(spec, ce.l_s);
  const auto P = fowler::fixed_point_P(spec, fp, SLimit::plus_inf());
  auto traj = integrate::integrate(fowler::make_field(spec, fp), {P.P1, P.P2}, s0, s_min,
                                   {zero_event()}, tolerance(opt));
  return StationaryProfile(spec, fp, Kind::SlowDecay, kInf, std::move(traj));
}

Classification classify(const StationaryProfile& prof) {
  const auto& traj = prof.trajectory();
  if (traj.empty() || traj.steps() == 0) return {};
  if (prof.crossed()) return {ClassTag::Crossing, prof.zero_radius()};
  if (traj.termination != integrate::Termination::Endpoint) return {};
  const auto& spec = prof.spec();
  const auto ce = potential::critical_exponents(spec);
  const double decade = std::log(10.0);
  const double lo = prof.s_lo(), hi = prof.s_hi();
  if (hi - lo < decade) return {};
  const int pts = 64;
  const bool forward = prof.kind() == Kind::Regular || prof.kind() == Kind::Singular;
  const double wa = forward ? hi - decade : lo, wb = forward ? hi : lo + decade;

  // Neighbourhood of the limiting fixed point over the whole window.
  const double ml = forward ? ce.m_s : ce.m_u;
  const double cl = ml * (spec.n - 2.0 - ml);
  if (cl > 0.0) {
    const auto fp = FowlerParams::make(spec, forward ? ce.l_s : ce.l_u);
    const auto P = fowler::fixed_point_P(spec, fp, forward ? SLimit::plus_inf() : SLimit::minus_inf());
    double dmax = 0.0;
    for (int i = 0; i <= pts; ++i) {
      const double s = i == pts ? wb : wa + (wb - wa) * i / pts;
      const auto p = prof.phase(s, fp.m);
      dmax = std::max(dmax, std::hypot(p.y1 - P.P1, p.y2 - P.P2));
    }
    if (dmax <= 1e-3 * P.P1) {
      switch (prof.kind()) {
        case Kind::Regular: return {ClassTag::GroundStateSlow, 0.0};
        case Kind::Singular: return {ClassTag::SGSSlow, 0.0};
        case Kind::FastDecay: return {ClassTag::SGSFast, prof.param()};
        case Kind::SlowDecay: return {ClassTag::SGSSlow, 0.0};
      }
    }
  }

  // Forward: U r^{n-2} settles (fast decay). Backward: U settles (regular centre).
  double vmin = kInf, vmax = -kInf, vlast = 0.0;
  for (int i = 0; i <= pts; ++i) {
    const double s = i == pts ? wb : wa + (wb - wa) * i / pts;
    const auto p = prof.phase(s);
    const double v = forward ? p.y1 * std::exp((spec.n - 2.0 - prof.frame().m) * s)
                             : p.y1 * std::exp(-prof.frame().m * s);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
    if (forward ? i == pts : i == 0) vlast = v;
  }
  if (vmin > 0.0 && (vmax - vmin) <= 0.01 * vmax) {
    switch (prof.kind()) {
      case Kind::Regular: return {ClassTag::GroundStateFast, vlast};
      case Kind::Singular: return {ClassTag::SGSFast, vlast};
      case Kind::FastDecay: return {ClassTag::GroundStateFast, prof.param()};
      case Kind::SlowDecay: return {ClassTag::GroundStateSlow, 0.0};
    }
  }
  return {};
}

std::vector<CrossingPoint> crossing_radius_curve(const PotentialSpec& spec,
                                                 const std::vector<double>& alphas, double r_max,
                                                 const ShootOptions& opt) {
  std::vector<CrossingPoint> out;
  for (double a : alphas) {
    const auto prof = regular_solution(spec, a, r_max, opt);
    out.push_back({a, prof.crossed() ? prof.zero_radius() : kInf});
  }
  return out;
}

namespace {

struct DiffScan {
  std::vector<double> s;
  std::vector<double> d;  // zero where the difference is below the integration noise floor
};

// Differences below this fraction of the profile size are treated as zero.
constexpr double kNoise = 1e-8;

DiffScan scan_difference(const StationaryProfile& a, const StationaryProfile& b, double s1, double s2) {
  DiffScan sc;
  const double ds = 0.01;
  const std::size_t count = std::min<std::size_t>(
      400000, static_cast<std::size_t>(std::ceil((s2 - s1) / ds)) + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const double s = i == count ? s2 : s1 + (s2 - s1) * static_cast<double>(i) / static_cast<double>(count);
    const double ya = a.phase(s).y1;
    const double yb = b.phase(s, a.frame().m).y1;
    const double d = ya - yb;
    sc.s.push_back(s);
    sc.d.push_back(std::abs(d) <= kNoise * std::max(std::abs(ya), std::abs(yb)) ? 0.0 : d);
  }
  return sc;
}

double refine_zero(const StationaryProfile& a, const StationaryProfile& b, double lo, double hi) {
  auto h = [&](double s) { return a.phase(s).y1 - b.phase(s, a.frame().m).y1; };
  const double flo = h(lo), fhi = h(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  boost::uintmax_t it = 200;
  auto res = boost::math::tools::toms748_solve(h, lo, hi, flo, fhi,
                                               [](double x, double y) { return std::abs(x - y) < 1e-12; }, it);
  return 0.5 * (res.first + res.second);
}

}  // namespace

Intersection first_intersection(const StationaryProfile& a, const StationaryProfile& b, double r1,
                                double r2, ScanDirection dir) {
  const double s1 = std::max({a.s_lo(), b.s_lo(), std::log(r1)});
  const double s2 = std::min({a.s_hi(), b.s_hi(), std::log(r2)});
  if (!(s2 > s1)) throw NotFound("profiles do not overlap");
  const auto sc = scan_difference(a, b, s1, s2);
  bool identical = true;
  for (double v : sc.d)
    if (v != 0.0) identical = false;
  if (identical) throw std::invalid_argument("first_intersection: identical profiles");
  const std::size_t n = sc.s.size();
  auto found = [&](std::size_t i, std::size_t j) {
    const double z = refine_zero(a, b, std::min(sc.s[i], sc.s[j]), std::max(sc.s[i], sc.s[j]));
    const double r = std::exp(z);
    return Intersection{r, a.Up(r) - b.Up(r)};
  };
  std::size_t last = n;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = dir == ScanDirection::Outward ? k : n - 1 - k;
    if (sc.d[i] == 0.0) continue;
    if (last != n && sc.d[last] * sc.d[i] < 0.0) return found(std::min(i, last), std::max(i, last));
    last = i;
  }
  throw NotFound("no intersection in range");
}

Intersection first_intersection(const StationaryProfile& a, const StationaryProfile& b,
                                ScanDirection dir) {
  return first_intersection(a, b, 0.0, kInf, dir);
}

std::size_t count_sign_changes(const StationaryProfile& a, const StationaryProfile& b, double r1,
                               double r2) {
  if (!(r1 > 0.0) || !(r2 > r1)) throw std::invalid_argument("count_sign_changes: bad interval");
  const double s1 = std::max({a.s_lo(), b.s_lo(), std::log(r1)});
  const double s2 = std::min({a.s_hi(), b.s_hi(), std::log(r2)});
  if (!(s2 > s1)) return 0;
  const auto sc = scan_difference(a, b, s1, s2);
  std::size_t count = 0;
  double last = 0.0;
  for (double v : sc.d) {
    if (v == 0.0) continue;
    if (last != 0.0 && v * last < 0.0) ++count;
    last = v;
  }
  return count;
}

ManifoldSlice unstable_slice(const PotentialSpec& spec, double tau, const std::vector<double>& alphas,
                             const ShootOptions& opt) {
  const auto ce = potential::critical_exponents(spec);
  ManifoldSlice sl{tau, ce.l_u, true, alphas, {}};
  for (double a : alphas) {
    PhasePoint p{kNaN, kNaN, tau};
    try {
      const auto prof = regular_solution(spec, a, std::exp(tau), opt);
      if (!prof.crossed()) p = prof.phase(tau, ce.m_u);
    } catch (const std::invalid_argument&) {
      // start radius beyond e^tau: the point is the regular expansion itself
      const auto fp = FowlerParams::make(spec, ce.l_u);
      const double r = std::exp(tau);
      p = fowler::to_fowler(regular_expansion(spec, a, r).U, regular_expansion(spec, a, r).Up, r, fp);
    }
    sl.points.push_back(p);
  }
  return sl;
}

ManifoldSlice stable_slice(const PotentialSpec& spec, double tau, const std::vector<double>& betas,
                           const ShootOptions& opt) {
  const auto ce = potential::critical_exponents(spec);
  ManifoldSlice sl{tau, ce.l_s, false, betas, {}};
  for (double b : betas) {
    PhasePoint p{kNaN, kNaN, tau};
    try {
      const auto prof = fast_decay_solution(spec, b, std::exp(tau), opt);
      if (!prof.crossed()) p = prof.phase(tau, ce.m_s);
    } catch (const std::invalid_argument&) {
      const auto fp = FowlerParams::make(spec, ce.l_s);
      const double r = std::exp(tau);
      const auto t = fast_tail(spec, b, r);
      p = fowler::to_fowler(t.V, t.Vp, r, fp);
    }
    sl.points.push_back(p);
  }
  return sl;
}

}  // namespace radheat::shooting
