#include <algorithm>
#include <cmath>
#include <sstream>

#include "fv.hpp"
#include "radheat/parabolic.hpp"

namespace radheat::parabolic {

using detail::df_odd;
using detail::f_odd;
using detail::FvGeometry;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup(const std::vector<double>& u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& u) {
  return std::all_of(u.begin(), u.end(), [](double x) { return std::isfinite(x); });
}

// Solves the tridiagonal system in place; sub[0] and sup[N-1] are ignored.
void thomas(std::vector<double>& sub, std::vector<double>& diag, std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t N = diag.size();
  for (std::size_t j = 1; j < N; ++j) {
    const double w = sub[j] / diag[j - 1];
    diag[j] -= w * up[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  rhs[N - 1] /= diag[N - 1];
  for (std::size_t j = N - 1; j-- > 0;) rhs[j] = (rhs[j] - up[j] * rhs[j + 1]) / diag[j];
}

class Stepper {
 public:
  Stepper(const Source& src, const RadialGrid& grid, double nu, double kappa)
      : src_(src), g_(grid), nu_(nu), kappa_(kappa), sub_(g_.N), diag_(g_.N), up_(g_.N), rhs_(g_.N) {}

  // Largest df/du plus the inner Robin injection per unit volume.
  double stiffness(const std::vector<double>& u) const {
    double m = 0.0;
    for (std::size_t j = 0; j < g_.N; ++j) m = std::max(m, df_odd(src_, u[j], g_.rs[j]));
    if (!g_.centre) m += std::max(nu_, 0.0) * g_.inner_area / g_.vol[0];
    return m;
  }

  // Monotone explicit bound: keeps every diagonal weight of the update non-negative.
  double explicit_bound() const {
    double dt = kInf;
    for (std::size_t j = 0; j < g_.N; ++j) {
      double out = 0.0;
      if (j + 1 < g_.N) out += g_.c[j];
      if (j > 0) out += g_.c[j - 1];
      if (j + 1 == g_.N) out += std::max(kappa_, 0.0) * g_.outer_area;
      dt = std::min(dt, g_.vol[j] / out);
    }
    return dt;
  }

  void explicit_step(const std::vector<double>& u, double dt, std::vector<double>& out) const {
    out.resize(g_.N);
    for (std::size_t j = 0; j < g_.N; ++j)
      out[j] = u[j] + dt / g_.vol[j] * (g_.flux(u, j, nu_, kappa_) + g_.vol[j] * f_odd(src_, u[j], g_.rs[j]));
  }

  // Backward Euler by Newton; false when Newton does not converge.
  bool implicit_step(const std::vector<double>& u0, double dt, std::vector<double>& u) {
    const std::size_t N = g_.N;
    u = u0;
    const double scale = std::max(sup(u0), 1e-300);
    for (int it = 0; it < 40; ++it) {
      for (std::size_t j = 0; j < N; ++j) {
        const double V = g_.vol[j];
        const double A = g_.flux(u, j, nu_, kappa_) + V * f_odd(src_, u[j], g_.rs[j]);
        rhs_[j] = -(V * (u[j] - u0[j]) - dt * A);
        double d = V - dt * V * df_odd(src_, u[j], g_.rs[j]);
        if (j + 1 < N) d += dt * g_.c[j];
        if (j > 0) d += dt * g_.c[j - 1];
        if (j == 0 && !g_.centre) d -= dt * nu_ * g_.inner_area;
        if (j + 1 == N) d += dt * kappa_ * g_.outer_area;
        diag_[j] = d;
        sub_[j] = j > 0 ? -dt * g_.c[j - 1] : 0.0;
        up_[j] = j + 1 < N ? -dt * g_.c[j] : 0.0;
      }
      thomas(sub_, diag_, up_, rhs_);
      double change = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        u[j] += rhs_[j];
        change = std::max(change, std::abs(rhs_[j]));
      }
      if (!std::isfinite(change)) return false;
      if (change <= 1e-13 * std::max(scale, sup(u))) return true;
    }
    return false;
  }

  std::size_t size() const { return g_.N; }

 private:
  const Source& src_;
  FvGeometry g_;
  double nu_, kappa_;
  std::vector<double> sub_, diag_, up_, rhs_;
};

SeriesPoint make_point(const RadialGrid& grid, const std::vector<double>& u, double t, double dt,
                       const EvolveControls& ctl) {
  SeriesPoint p{t, weighted_norm(grid, u, ctl.weight), {}, dt};
  for (double nu : ctl.norm_nus) p.norm_nu.push_back(augmented_norm(grid, u, nu));
  return p;
}

}  // namespace

const char* to_string(Scheme s) { return s == Scheme::Implicit ? "implicit" : "explicit"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "implicit") return Scheme::Implicit;
  if (s == "explicit") return Scheme::Explicit;
  throw std::invalid_argument("unknown scheme '" + s + "' (implicit or explicit)");
}

const char* to_string(FateKind f) {
  switch (f) {
    case FateKind::Decayed: return "Decayed";
    case FateKind::BlowUp: return "BlowUp";
    case FateKind::Steady: return "Steady";
    case FateKind::Undecided: return "Undecided";
  }
  return "?";
}

Fate detect_fate(const std::vector<SeriesPoint>& series, const FateControls& fc) {
  if (series.empty()) return {};
  const auto& last = series.back();
  const double t_half = 0.5 * (series.front().t + last.t);
  std::size_t w0 = series.size() - 1;
  while (w0 > 0 && series[w0 - 1].t >= t_half) --w0;
  if (series.size() - w0 < fc.min_window) w0 = series.size() > fc.min_window ? series.size() - fc.min_window : 0;
  const std::size_t count = series.size() - w0;
  if (count < 2) return {FateKind::Undecided, last.t};

  double dt_max = 0.0;
  for (const auto& p : series) dt_max = std::max(dt_max, p.dt);

  bool rising = true, falling = true;
  double lo = kInf, hi = 0.0;
  for (std::size_t i = w0; i < series.size(); ++i) {
    lo = std::min(lo, series[i].norm_w);
    hi = std::max(hi, series[i].norm_w);
    if (i > w0) {
      if (!(series[i].norm_w > series[i - 1].norm_w)) rising = false;
      if (series[i].norm_w > series[i - 1].norm_w) falling = false;
    }
  }

  if (last.norm_w > fc.blowup_threshold && last.dt < fc.dt_collapse * dt_max && rising) {
    // growth rate of log-norm over the first and last interval of the window
    auto rate = [&](std::size_t i) {
      return std::log(series[i + 1].norm_w / series[i].norm_w) / series[i + 1].dt;
    };
    if (rate(series.size() - 2) > rate(w0)) return {FateKind::BlowUp, last.t};
  }
  if (last.norm_w < fc.decay_floor * series.front().norm_w && falling) return {FateKind::Decayed, last.t};
  if (hi == 0.0 || (hi - lo) <= fc.steady_tol * hi) return {FateKind::Steady, last.t};
  return {FateKind::Undecided, last.t};
}

double default_kappa(const PotentialSpec& spec, const std::string& tail) {
  if (tail == "fast") return spec.n - 2.0;
  if (tail == "slow") return potential::critical_exponents(spec).m_s;
  throw std::invalid_argument("default_kappa: tail must be 'fast' or 'slow'");
}

EvolutionResult evolve(const Source& src, const RadialGrid& grid, const std::vector<double>& phi,
                       const EvolveControls& ctl) {
  grid.validate();
  if (phi.size() != grid.size()) throw std::invalid_argument("evolve: data size does not match the grid");
  if (!all_finite(phi)) throw std::invalid_argument("evolve: data is not finite");
  for (double x : phi)
    if (x < 0.0) throw std::invalid_argument("evolve: data must be non-negative");
  if (!(ctl.t_end > 0.0)) throw std::invalid_argument("evolve: t_end must be > 0");
  if (!(ctl.rtol > 0.0) || !(ctl.cfl > 0.0) || !(ctl.mmatrix > 0.0))
    throw std::invalid_argument("evolve: rtol, cfl and mmatrix must be > 0");

  EvolutionResult res;
  res.kappa = std::isnan(ctl.kappa) ? grid.n - 2.0 : ctl.kappa;
  Stepper st(src, grid, grid.has_centre() ? 0.0 : ctl.inner_nu, res.kappa);
  std::ostringstream diag;

  std::vector<double> outs = ctl.output_times;
  std::sort(outs.begin(), outs.end());
  std::size_t next_out = 0;
  while (next_out < outs.size() && outs[next_out] <= 0.0) {
    res.snapshots.push_back({0.0, phi});
    ++next_out;
  }

  std::vector<double> u = phi, full, half, cand;
  // time kept as an unevaluated sum t + t_lo so steps far below eps * t still advance it
  double t = 0.0, t_lo = 0.0;
  const double h = grid.h_min();
  double dt = ctl.dt_init > 0.0 ? ctl.dt_init : std::min(0.1 * h * h, ctl.t_end);
  res.series.push_back(make_point(grid, u, 0.0, 0.0, ctl));
  const double explicit_dt = ctl.cfl * st.explicit_bound();
  const double initial_norm = res.series.front().norm_w;
  const double hard_cap = ctl.fate.blowup_threshold * ctl.fate.blowup_threshold;

  auto record_step = [&](const std::vector<double>& next, double step) {
    const double scale = std::max(sup(u), 1e-300);
    double rise = 0.0, drop = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      rise = std::max(rise, (next[j] - u[j]) / scale);
      drop = std::max(drop, (u[j] - next[j]) / scale);
    }
    res.max_rise = std::max(res.max_rise, rise);
    res.max_drop = std::max(res.max_drop, drop);
    if (rise > ctl.monotone_slack) res.nonincreasing = false;
    if (drop > ctl.monotone_slack) res.nondecreasing = false;
    const double nscale = std::max(sup(next), 1e-300);
    for (std::size_t j = 0; j + 1 < next.size(); ++j)
      if (next[j + 1] - next[j] > ctl.monotone_slack * nscale) {
        res.radially_nonincreasing = false;
        break;
      }
    u = next;
    const double sum = t + step;
    const double bv = sum - t;
    t_lo += (t - (sum - bv)) + (step - bv);
    t = sum + t_lo;
    t_lo -= t - sum;
    ++res.steps;
    res.series.push_back(make_point(grid, u, t, step, ctl));
  };

  bool stop = false;
  while (!stop) {
    if (t >= ctl.t_end) break;
    if (res.steps >= ctl.max_steps) {
      diag << "step limit " << ctl.max_steps << " reached at t = " << t << "; ";
      break;
    }
    // limits: end time, next output, dt_max, explicit bound, M-matrix bound on the current state
    double limit = std::min(ctl.t_end - t - t_lo, ctl.dt_max);
    if (next_out < outs.size()) limit = std::min(limit, outs[next_out] - t - t_lo);
    const double stiff = st.stiffness(u);
    const double mm = stiff > 0.0 ? ctl.mmatrix / stiff : kInf;
    double step = std::min({dt, limit, mm});
    if (ctl.scheme == Scheme::Explicit) step = std::min(step, explicit_dt);
    if (!(step > 1e-300)) {
      diag << "time step underflow at t = " << t << "; ";
      break;
    }
    bool hit_out = next_out < outs.size() && step == outs[next_out] - t - t_lo;

    if (ctl.scheme == Scheme::Explicit) {
      st.explicit_step(u, step, cand);
      if (!all_finite(cand)) throw EvolveError("evolve: non-finite state at t = " + std::to_string(t + step));
      if (stiff > 0.0 && step * st.stiffness(cand) > 2.0 * ctl.mmatrix) {
        dt = 0.5 * step;
        ++res.rejected;
        continue;
      }
      record_step(cand, step);
      dt = std::max(dt, explicit_dt);
    } else {
      const bool ok_full = st.implicit_step(u, step, full);
      const bool ok_h1 = ok_full && st.implicit_step(u, 0.5 * step, half);
      const bool ok_h2 = ok_h1 && 0.5 * step * st.stiffness(half) <= ctl.mmatrix && st.implicit_step(half, 0.5 * step, cand);
      if (!ok_h2 || 0.5 * step * st.stiffness(cand) > ctl.mmatrix) {
        dt = 0.25 * step;
        ++res.rejected;
        continue;
      }
      double err = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) err = std::max(err, std::abs(cand[j] - full[j]));
      err /= ctl.rtol * std::max(sup(cand), 1e-300);
      const double factor = std::clamp(0.9 / std::sqrt(std::max(err, 1e-12)), 0.2, 2.0);
      if (err > 1.0) {
        dt = step * factor;
        ++res.rejected;
        continue;
      }
      record_step(cand, step);
      // a step shortened by an output time or bound keeps the previous proposal
      dt = std::max(step == dt ? step * factor : dt, step * factor);
    }
    if (!all_finite(u)) throw EvolveError("evolve: non-finite state at t = " + std::to_string(t));

    if (hit_out) {
      t = outs[next_out];
      t_lo = 0.0;
      res.series.back().t = t;
      while (next_out < outs.size() && outs[next_out] <= t) {
        res.snapshots.push_back({t, u});
        ++next_out;
      }
    }

    const double nrm = res.series.back().norm_w;
    if (ctl.stop_on_fate) {
      const bool probe = nrm > ctl.fate.blowup_threshold || nrm < ctl.fate.decay_floor * initial_norm ||
                         res.steps % 256 == 0;
      if (probe) {
        const auto f = detect_fate(res.series, ctl.fate);
        if (f.kind == FateKind::BlowUp || f.kind == FateKind::Decayed ||
            (f.kind == FateKind::Steady && t >= 0.5 * ctl.t_end)) {
          stop = true;
        }
      }
    }
    if (nrm > hard_cap) {
      diag << "norm " << nrm << " above " << hard_cap << " at t = " << t << "; ";
      break;
    }
  }

  res.fate = detect_fate(res.series, ctl.fate);
  res.final_u = u;
  res.t_final = t;
  res.diagnostics = diag.str();
  return res;
}

EvolutionResult evolve(const PotentialSpec& spec, const RadialGrid& grid, const std::vector<double>& phi,
                       const EvolveControls& ctl) {
  spec.validate();
  if (grid.n != spec.n) throw std::invalid_argument("evolve: grid dimension differs from the potential's n");
  validate_weight(spec, ctl.weight);
  return evolve(Source::from_spec(spec), grid, phi, ctl);
}

ComparisonReport compare_results(const EvolutionResult& low, const EvolutionResult& high, const RadialGrid& grid,
                                 double slack) {
  ComparisonReport rep;
  rep.max_violation = -kInf;
  std::size_t common = 0;
  for (const auto& a : low.snapshots) {
    for (const auto& b : high.snapshots) {
      if (a.t != b.t) continue;
      if (a.u.size() != grid.size() || b.u.size() != grid.size())
        throw std::invalid_argument("compare_results: snapshot size does not match the grid");
      ++common;
      const double floor = 1e-12 * std::max(sup(a.u), sup(b.u));
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double scale = std::max({std::abs(a.u[j]), std::abs(b.u[j]), floor, 1e-300});
        const double v = (a.u[j] - b.u[j]) / scale;
        if (v > rep.max_violation) {
          rep.max_violation = v;
          rep.at_t = a.t;
          rep.at_r = grid.r[j];
        }
      }
      break;
    }
  }
  if (common == 0) throw std::invalid_argument("compare_results: no common snapshot times");
  rep.ordered = rep.max_violation <= slack;
  return rep;
}

bool comparison_check(const EvolutionResult& low, const EvolutionResult& high, const RadialGrid& grid) {
  return compare_results(low, high, grid).ordered;
}

}  // namespace radheat::parabolic
