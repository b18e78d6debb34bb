#include "radheat/barriers.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

namespace radheat::barriers {

using shooting::Kind;
using shooting::NotFound;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

potential::ASign a_sign(const PotentialSpec& spec) {
  std::vector<double> s_grid;
  for (int i = 0; i <= 80; ++i) s_grid.push_back(-20.0 + 0.5 * i);
  return potential::check_A_sign(spec, s_grid, potential::log_grid(1e-3, 1e3, 25));
}

bool in_sub(double l, const potential::CriticalExponents& ce) {
  return l > ce.serrin && (l < ce.sobolev || near(l, ce.sobolev));
}

bool at_least_sobolev(double l, const potential::CriticalExponents& ce) {
  return l > ce.sobolev || near(l, ce.sobolev);
}

// Signed distance of the section crossing: y1 - R when the profile reaches s = tau,
// continued below -R by how far short of tau it stopped at a zero of U.
double section_gap(const StationaryProfile& prof, double tau, double m, double R) {
  if (prof.crossed()) {
    const double sz = std::log(prof.zero_radius());
    return -R - std::abs(sz - tau);
  }
  return prof.phase(tau, m).y1 - R;
}

struct Root {
  double param;
  double y2;
};

// First sign changes of gap(param) along a geometric sweep, refined by toms748.
// Returns every root found with its y2 at the section.
template <class Gap>
std::vector<Root> sweep_roots(Gap gap, double p0, std::size_t max_roots, std::string what) {
  std::vector<Root> roots;
  const double ratio = 1.2;
  double a = p0;
  auto ga = gap(a);
  if (!(ga.first < 0.0))
    throw NotFound(what + ": sweep starts above the section (gap " + fmt(ga.first) + " at " + fmt(a) + ")");
  for (int k = 0; k < 400 && roots.size() < max_roots; ++k) {
    const double b = a * ratio;
    const auto gb = gap(b);
    if ((ga.first < 0.0) != (gb.first < 0.0)) {
      boost::uintmax_t it = 200;
      auto f = [&](double p) { return gap(p).first; };
      auto res = boost::math::tools::toms748_solve(f, a, b, ga.first, gb.first,
                                                   boost::math::tools::eps_tolerance<double>(48), it);
      const double p = 0.5 * (res.first + res.second);
      roots.push_back({p, gap(p).second});
    }
    a = b;
    ga = gb;
  }
  return roots;
}

Piece piece(StationaryProfile prof, double a, double b) { return Piece{std::move(prof), a, b}; }

}  // namespace

const char* to_string(BarrierKind k) {
  switch (k) {
    case BarrierKind::Upper: return "Upper";
    case BarrierKind::Lower: return "Lower";
    case BarrierKind::Smooth: return "Smooth";
    case BarrierKind::Mixed: return "Mixed";
  }
  return "?";
}

BarrierProfile::BarrierProfile(std::vector<Piece> pieces, BarrierKind requested)
    : pieces_(std::move(pieces)), requested_(requested) {
  if (pieces_.empty()) throw std::invalid_argument("BarrierProfile: no pieces");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].r_to > pieces_[i].r_from)) throw std::invalid_argument("BarrierProfile: empty piece");
    if (i > 0 && pieces_[i].r_from != pieces_[i - 1].r_to)
      throw std::invalid_argument("BarrierProfile: pieces do not tile");
  }
  bool neg = false, pos = false;
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    const double R = pieces_[i].r_from;
    const auto& in = pieces_[i - 1].profile;
    const auto& out = pieces_[i].profile;
    const double ui = in.U(R), uo = out.U(R);
    const double pi = in.Up(R), po = out.Up(R);
    const double J = po - pi;
    const double scale = std::max(std::abs(ui), std::abs(uo));
    junctions_.push_back({R, J, scale > 0 ? std::abs(ui - uo) / scale : 0.0});
    if (std::abs(J) <= 1e-9 * (std::abs(pi) + std::abs(po))) continue;
    (J < 0 ? neg : pos) = true;
  }
  kind_ = neg && pos ? BarrierKind::Mixed
          : neg      ? BarrierKind::Upper
          : pos      ? BarrierKind::Lower
                     : BarrierKind::Smooth;
}

double BarrierProfile::R_glue() const { return junctions_.empty() ? kInf : junctions_.front().r; }
double BarrierProfile::J() const { return junctions_.empty() ? 0.0 : junctions_.front().jump; }

double BarrierProfile::D() const {
  const auto& p = inner();
  if (p.kind() == Kind::Regular) return p.param();
  return p.fit_singular();
}

double BarrierProfile::L() const {
  const auto& p = pieces_.back().profile;
  if (p.kind() == Kind::FastDecay) return p.param();
  return p.fit_slow();
}

std::string BarrierProfile::tail() const {
  return pieces_.back().profile.kind() == Kind::FastDecay ? "fast" : "slow";
}

const Piece& BarrierProfile::piece_at(double r) const {
  if (!covers(r)) throw std::out_of_range("barrier evaluated outside its range");
  for (const auto& p : pieces_)
    if (r <= p.r_to) return p;
  return pieces_.back();
}

double BarrierProfile::U(double r) const { return piece_at(r).profile.U(r); }
double BarrierProfile::Up(double r) const { return piece_at(r).profile.Up(r); }

std::vector<shooting::Sample> BarrierProfile::samples(double r1, double r2, std::size_t count) const {
  if (!(r1 > 0.0) || !(r2 > r1)) throw std::invalid_argument("samples: bad range");
  r1 = std::max(r1, r_begin());
  r2 = std::min(r2, r_end());
  std::vector<double> rs = potential::log_grid(r1, r2, std::max<std::size_t>(count, 2));
  for (const auto& j : junctions_)
    if (j.r > r1 && j.r < r2) rs.push_back(j.r);
  std::sort(rs.begin(), rs.end());
  std::vector<shooting::Sample> out;
  for (double r : rs) out.push_back({r, U(r), Up(r)});
  return out;
}

std::string fast_decay_regime(const PotentialSpec& spec) {
  const auto ce = potential::critical_exponents(spec);
  const auto a = a_sign(spec);
  if (near(ce.l_u, ce.sobolev) && near(ce.l_s, ce.sobolev)) return "";
  if (a == potential::ASign::AMinus && at_least_sobolev(ce.l_u, ce) && at_least_sobolev(ce.l_s, ce))
    return "";
  if (a == potential::ASign::APlus && in_sub(ce.l_u, ce) && in_sub(ce.l_s, ce)) return "";
  return std::string("fast-decay pair needs A- with l_u, l_s >= 2^* or A+ with l_u, l_s in (2_*, 2^*]; got ") +
         potential::to_string(a) + ", l_u = " + fmt(ce.l_u) + ", l_s = " + fmt(ce.l_s);
}

std::string slow_decay_regime(const PotentialSpec& spec) {
  const auto ce = potential::critical_exponents(spec);
  const auto a = a_sign(spec);
  if (near(ce.l_u, ce.sobolev) && near(ce.l_s, ce.sobolev)) return "";
  if (a == potential::ASign::APlus && in_sub(ce.l_u, ce) && in_sub(ce.l_s, ce)) return "";
  if (a == potential::ASign::AMinus && at_least_sobolev(ce.l_u, ce) && at_least_sobolev(ce.l_s, ce) &&
      ce.l_s < ce.sigma_high)
    return "";
  return std::string("slow-decay upper solution needs A+ with l_u, l_s in (2_*, 2^*] or A- with l_u >= 2^*, "
                     "2^* <= l_s < sigma^*; got ") +
         potential::to_string(a) + ", l_u = " + fmt(ce.l_u) + ", l_s = " + fmt(ce.l_s);
}

Section fast_decay_section(const PotentialSpec& spec, double tau, const ShootOptions& opt) {
  const auto ce = potential::critical_exponents(spec);
  if (near(ce.l_u, ce.sobolev) && near(ce.l_s, ce.sobolev)) {
    // half the smallest frozen fixed point of the 2^* frame
    const auto star = fowler::FowlerParams::sobolev_frame(spec);
    double P = kInf;
    for (int i = 0; i <= 800; ++i)
      P = std::min(P, fowler::solve_g_equals(spec, star, fowler::SLimit::at(-40.0 + 0.1 * i), star.C));
    P = std::min({P, fowler::solve_g_equals(spec, star, fowler::SLimit::minus_inf(), star.C),
                  fowler::solve_g_equals(spec, star, fowler::SLimit::plus_inf(), star.C)});
    return {0.5 * P, ce.sobolev, kNaN, kNaN};
  }
  const auto sing = shooting::singular_solution(spec, -30.0, 30.0, opt);
  if (sing.crossed() || sing.s_hi() < 0.0)
    throw RegimeError("singular ground state changes sign; no positive section value");
  double Ru = kInf, Rs = kInf;
  const double ds = 0.01;
  for (double s = sing.s_lo(); s <= 0.0; s += ds) Ru = std::min(Ru, sing.phase(s, ce.m_u).y1);
  for (double s = 0.0; s <= sing.s_hi(); s += ds) Rs = std::min(Rs, sing.phase(s, ce.m_s).y1);
  if (!(Ru > 0.0 && Rs > 0.0)) throw RegimeError("singular ground state is not positive");
  if (ce.m_s <= ce.m_u) return {0.5 * std::min(Ru, Rs), ce.l_s, Ru, Rs};
  // l_u frame; the l_s bound is carried to tau with the frame factor
  return {0.5 * std::min(Ru, Rs * std::exp((ce.m_u - ce.m_s) * std::max(tau, 0.0))), ce.l_u, Ru, Rs};
}

BarrierPair build_gs_pair(const PotentialSpec& spec, double alpha1, double alpha2, double r_max,
                          const ShootOptions& opt) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw std::invalid_argument("build_gs_pair: alphas must be > 0");
  if (alpha1 == alpha2) throw std::invalid_argument("build_gs_pair: alpha1 = alpha2");
  if (!(alpha1 < alpha2)) throw std::invalid_argument("build_gs_pair: need alpha1 < alpha2");
  const auto u1 = shooting::regular_solution(spec, alpha1, r_max, opt);
  const auto u2 = shooting::regular_solution(spec, alpha2, r_max, opt);
  const double r_end = std::min(u1.r_hi(), u2.r_hi());

  std::vector<double> glue;
  double from = 0.0;
  while (true) {
    try {
      const auto z = shooting::first_intersection(u1, u2, from, r_end, shooting::ScanDirection::Outward);
      if (!glue.empty() && z.r <= glue.back()) break;
      glue.push_back(z.r);
      from = z.r * std::exp(0.005);
      if (from >= r_end) break;
    } catch (const NotFound&) {
      break;
    }
  }
  if (glue.empty()) throw NotFound("build_gs_pair: the regular solutions do not intersect below r_max");

  auto assemble = [&](bool start_low, BarrierKind label) {
    std::vector<Piece> ps;
    double a = 0.0;
    for (std::size_t i = 0; i <= glue.size(); ++i) {
      const double b = i < glue.size() ? glue[i] : r_end;
      const bool low = (i % 2 == 0) == start_low;
      ps.push_back(piece(low ? u1 : u2, a, b));
      a = b;
    }
    return BarrierProfile(std::move(ps), label);
  };
  return {assemble(true, BarrierKind::Upper), assemble(false, BarrierKind::Lower), {alpha1, alpha2}, 0.0};
}

BarrierPair build_fast_decay_pair(const PotentialSpec& spec, double tau, const ShootOptions& opt) {
  if (!std::isfinite(tau)) throw std::invalid_argument("build_fast_decay_pair: tau must be finite");
  if (auto why = fast_decay_regime(spec); !why.empty()) throw RegimeError(why);
  const auto sec = fast_decay_section(spec, tau, opt);
  const double m = potential::m_of_l(sec.l);
  const double R = sec.value;
  const double rg = std::exp(tau);

  auto gap_u = [&](double a) {
    const auto p = shooting::regular_solution(spec, a, rg, opt);
    const double g = section_gap(p, tau, m, R);
    return std::pair{g, p.crossed() ? kNaN : p.phase(tau, m).y2};
  };
  auto gap_v = [&](double b) {
    const auto p = shooting::fast_decay_solution(spec, b, rg, opt);
    const double g = section_gap(p, tau, m, R);
    return std::pair{g, p.crossed() ? kNaN : p.phase(tau, m).y2};
  };
  const auto ra = sweep_roots(gap_u, 1e-3 * R * std::exp(-m * tau), 1, "alpha*");
  if (ra.empty()) throw NotFound("alpha*: no regular solution reaches y1 = " + fmt(R) + " at s = " + fmt(tau));
  const auto rb = sweep_roots(gap_v, 1e-3 * R * std::exp((spec.n - 2.0 - m) * tau), 2, "beta");
  if (rb.size() < 2)
    throw NotFound("beta: found " + std::to_string(rb.size()) + " fast-decay solution(s) through y1 = " + fmt(R) +
                   " at s = " + fmt(tau) + ", need 2");
  const Root a = ra.front(), b1 = rb[0], b2 = rb[1];
  if (!(b1.y2 < a.y2 && a.y2 < b2.y2))
    throw NotFound("section slopes do not bracket: y2(beta1) = " + fmt(b1.y2) + ", y2(alpha*) = " + fmt(a.y2) +
                   ", y2(beta2) = " + fmt(b2.y2));

  const auto inner = shooting::regular_solution(spec, a.param, rg, opt);
  const auto v1 = shooting::fast_decay_solution(spec, b1.param, rg, opt);
  const auto v2 = shooting::fast_decay_solution(spec, b2.param, rg, opt);
  BarrierProfile upper({piece(inner, 0.0, rg), piece(v1, rg, kInf)}, BarrierKind::Upper);
  BarrierProfile lower({piece(inner, 0.0, rg), piece(v2, rg, kInf)}, BarrierKind::Lower);
  return {std::move(upper), std::move(lower), {a.param, b1.param, b2.param}, R};
}

BarrierProfile build_slow_decay_upper(const PotentialSpec& spec, double tau, const ShootOptions& opt) {
  if (!std::isfinite(tau)) throw std::invalid_argument("build_slow_decay_upper: tau must be finite");
  if (auto why = slow_decay_regime(spec); !why.empty()) throw RegimeError(why);
  const double rg = std::exp(tau);
  const auto outer = shooting::slow_decay_solution(spec, std::max(30.0, tau + 20.0), tau - 0.5, opt);
  if (outer.crossed()) throw RegimeError("slow-decay singular solution changes sign above e^tau");
  const double V = outer.U(rg), Vp = outer.Up(rg);
  if (!(V > 0.0)) throw RegimeError("slow-decay singular solution is not positive at e^tau");

  auto gap = [&](double a) {
    const auto p = shooting::regular_solution(spec, a, rg, opt);
    const double g = section_gap(p, tau, 0.0, V);
    return std::pair{g, p.crossed() ? kNaN : p.Up(rg)};
  };
  const auto roots = sweep_roots(gap, 1e-3 * V, 6, "chi");
  for (const auto& r : roots) {
    if (!(r.y2 > Vp)) continue;
    const auto inner = shooting::regular_solution(spec, r.param, rg, opt);
    return BarrierProfile({piece(inner, 0.0, rg), piece(outer, rg, outer.r_hi())}, BarrierKind::Upper);
  }
  throw NotFound("chi: no regular solution meets the slow-decay solution at e^tau = " + fmt(rg) +
                 " with a larger slope (" + std::to_string(roots.size()) + " value matches)");
}

BarrierReport verify_barrier(const BarrierProfile& bp, const VerifyOptions& opt) {
  BarrierReport rep;
  rep.junctions = bp.junctions().size();
  rep.kind = bp.kind();
  std::ostringstream notes;
  if (!bp.junctions().empty()) {
    rep.min_jump = kInf;
    rep.max_jump = -kInf;
  }
  for (const auto& j : bp.junctions()) {
    rep.continuity = std::max(rep.continuity, j.gap);
    rep.min_jump = std::min(rep.min_jump, j.jump);
    rep.max_jump = std::max(rep.max_jump, j.jump);
  }
  for (const auto& p : bp.pieces()) {
    const double a = std::max(p.r_from, p.profile.r_lo());
    const double b = std::min(p.r_to, p.profile.r_hi());
    if (!(b > a)) continue;
    for (double r : potential::log_grid(a, b, opt.samples_per_piece))
      rep.residual = std::max(rep.residual, p.profile.residual(r));
  }
  rep.continuity_ok = rep.continuity <= opt.continuity_tol;
  rep.residual_ok = rep.residual <= opt.residual_tol;
  rep.jumps_ok = rep.kind != BarrierKind::Mixed;
  rep.label_mismatch = rep.kind != bp.requested();
  if (!rep.continuity_ok) notes << "continuity " << rep.continuity << " above " << opt.continuity_tol << "; ";
  if (!rep.residual_ok) notes << "residual " << rep.residual << " above " << opt.residual_tol << "; ";
  if (!rep.jumps_ok) notes << "jumps of both signs; ";
  if (rep.label_mismatch)
    notes << "requested " << to_string(bp.requested()) << " but jumps give " << to_string(rep.kind) << "; ";
  rep.notes = notes.str();
  rep.passed = rep.continuity_ok && rep.residual_ok && rep.jumps_ok && !rep.label_mismatch;
  return rep;
}

OrderReport check_order(const BarrierProfile& upper, const BarrierProfile& lower,
                        const std::vector<double>& radii, double tol) {
  OrderReport rep;
  rep.max_violation = -kInf;
  for (double r : radii) {
    if (!upper.covers(r) || !lower.covers(r)) continue;
    const double u = upper.U(r), l = lower.U(r);
    const double scale = std::max({std::abs(u), std::abs(l), 1e-300});
    const double v = (u - l) / scale;
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.at_r = r;
    }
  }
  rep.ordered = rep.max_violation <= tol;
  return rep;
}

}  // namespace radheat::barriers
