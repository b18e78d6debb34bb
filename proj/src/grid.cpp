#include <algorithm>
#include <cmath>
#include <limits>

#include "fv.hpp"
#include "radheat/parabolic.hpp"

namespace radheat::parabolic {

using detail::f_odd;
using detail::FvGeometry;

Source Source::from_spec(const PotentialSpec& spec) {
  spec.validate();
  return {[spec](double u, double r) { return potential::eval_f(spec, u, r); },
          [spec](double u, double r) { return potential::eval_df_du(spec, u, r); }};
}

Source Source::zero() {
  return {[](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
}

Source Source::linear(double lambda) {
  return {[lambda](double u, double) { return lambda * u; }, [lambda](double, double) { return lambda; }};
}

RadialGrid RadialGrid::graded(int n, double r_min, double r_max, double h0, double growth) {
  if (n < 1) throw std::invalid_argument("graded grid: n must be >= 1");
  if (!(r_min >= 0.0 && r_max > r_min)) throw std::invalid_argument("graded grid: need 0 <= r_min < r_max");
  if (!(h0 > 0.0) || !(growth >= 1.0)) throw std::invalid_argument("graded grid: need h0 > 0, growth >= 1");
  RadialGrid g;
  g.n = n;
  g.h0 = h0;
  g.growth = growth;
  g.r.push_back(r_min);
  double h = h0;
  while (g.r.back() < r_max) {
    g.r.push_back(g.r.back() + h);
    h *= growth;
    if (g.r.size() > 50'000'000) throw std::invalid_argument("graded grid: too many nodes");
  }
  if (g.r.size() < 3) throw std::invalid_argument("graded grid: fewer than three nodes");
  // stretch so the last node lands on r_max
  const double scale = (r_max - r_min) / (g.r.back() - r_min);
  for (auto& x : g.r) x = r_min + (x - r_min) * scale;
  g.r.back() = r_max;
  g.h0 = h0 * scale;
  return g;
}

RadialGrid RadialGrid::uniform(int n, double r_max, std::size_t cells) {
  if (cells < 2) throw std::invalid_argument("uniform grid: need at least two cells");
  if (!(r_max > 0.0)) throw std::invalid_argument("uniform grid: r_max must be > 0");
  RadialGrid g;
  g.n = n;
  g.h0 = r_max / static_cast<double>(cells);
  g.growth = 1.0;
  for (std::size_t j = 0; j <= cells; ++j) g.r.push_back(r_max * static_cast<double>(j) / static_cast<double>(cells));
  return g;
}

RadialGrid RadialGrid::refined() const {
  if (growth == 1.0 && r.front() == 0.0) return uniform(n, r.back(), 2 * (r.size() - 1));
  return graded(n, r.front(), r.back(), 0.5 * h0, std::sqrt(growth));
}

double RadialGrid::h_min() const {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < r.size(); ++j) h = std::min(h, r[j + 1] - r[j]);
  return h;
}

void RadialGrid::validate() const {
  if (r.size() < 3) throw std::invalid_argument("grid needs at least three nodes");
  if (!(r.front() >= 0.0)) throw std::invalid_argument("grid radii must be >= 0");
  for (std::size_t j = 0; j + 1 < r.size(); ++j)
    if (!(r[j + 1] > r[j])) throw std::invalid_argument("grid radii must increase strictly");
}

double WeightSpec::operator()(double r) const {
  if (r <= 1.0) return nu == 0.0 ? 1.0 : std::pow(r, nu);
  return outer == 0.0 ? 1.0 : std::pow(r, outer);
}

void validate_weight(const PotentialSpec& spec, const WeightSpec& w) {
  const auto ce = potential::critical_exponents(spec);
  if (!(w.nu >= 0.0 && w.nu < ce.m_u)) throw std::invalid_argument("weight: need 0 <= nu < m(l_u)");
  if (!(w.outer >= 0.0)) throw std::invalid_argument("weight: outer exponent must be >= 0");
}

double weighted_norm(const RadialGrid& grid, const std::vector<double>& u, const WeightSpec& w) {
  if (u.size() != grid.size()) throw std::invalid_argument("weighted_norm: size mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) m = std::max(m, std::abs(u[j]) * w(grid.r[j]));
  return m;
}

double augmented_norm(const RadialGrid& grid, const std::vector<double>& u, double nu) {
  if (u.size() != grid.size()) throw std::invalid_argument("augmented_norm: size mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) m = std::max(m, std::abs(u[j]) * (1.0 + std::pow(grid.r[j], nu)));
  return m;
}

std::vector<double> march_outward(const Source& src, const RadialGrid& grid, double alpha) {
  grid.validate();
  if (!grid.has_centre()) throw std::invalid_argument("march_outward: grid needs a centre node");
  const FvGeometry g(grid);
  std::vector<double> u(g.N);
  u[0] = alpha;
  // flux through the right face of cell j balances the source in cells 0..j
  double F = 0.0;
  for (std::size_t j = 0; j + 1 < g.N; ++j) {
    F -= g.vol[j] * f_odd(src, u[j], g.rs[j]);
    u[j + 1] = u[j] + F / g.c[j];
  }
  return u;
}

std::vector<double> march_inward(const Source& src, const RadialGrid& grid, double u_last, double u_prev) {
  grid.validate();
  const FvGeometry g(grid);
  std::vector<double> u(g.N);
  u[g.N - 1] = u_last;
  u[g.N - 2] = u_prev;
  double F = g.c[g.N - 2] * (u_last - u_prev);  // flux through the left face of the last cell
  for (std::size_t j = g.N - 2; j >= 1; --j) {
    F += g.vol[j] * f_odd(src, u[j], g.rs[j]);
    u[j - 1] = u[j] - F / g.c[j - 1];
  }
  return u;
}

double matched_kappa(const Source& src, const RadialGrid& grid, const std::vector<double>& u) {
  const FvGeometry g(grid);
  const std::size_t N = g.N;
  const double inflow = g.vol[N - 1] * f_odd(src, u[N - 1], g.rs[N - 1]) - g.c[N - 2] * (u[N - 1] - u[N - 2]);
  return inflow / (g.outer_area * u[N - 1]);
}

double discrete_residual_violation(const Source& src, const RadialGrid& grid, const std::vector<double>& u,
                                   double kappa, double inner_nu, barriers::BarrierKind kind) {
  const FvGeometry g(grid);
  const double sign = kind == barriers::BarrierKind::Lower ? -1.0 : 1.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double fl = g.flux(u, j, inner_nu, kappa);
    const double src_term = g.vol[j] * f_odd(src, u[j], g.rs[j]);
    double scale = std::abs(src_term);
    if (j + 1 < g.N) scale += g.c[j] * std::abs(u[j + 1] - u[j]);
    if (j > 0) scale += g.c[j - 1] * std::abs(u[j] - u[j - 1]);
    if (j + 1 == g.N) scale += std::abs(kappa) * g.outer_area * std::abs(u[j]);
    if (scale == 0.0) continue;
    worst = std::max(worst, sign * (fl + src_term) / scale);
  }
  return worst;
}

DiscreteBarrier discretize_barrier(const PotentialSpec& spec, const barriers::BarrierProfile& bp,
                                   const RadialGrid& grid) {
  grid.validate();
  const auto src = Source::from_spec(spec);
  const auto& pieces = bp.pieces();
  const std::size_t N = grid.size();
  std::vector<std::vector<double>> disc;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i].profile;
    if (p.kind() == shooting::Kind::Regular) {
      disc.push_back(march_outward(src, grid, p.param()));
    } else {
      if (i + 1 != pieces.size())
        throw std::invalid_argument("discretize_barrier: only the outermost piece may be non-regular");
      const double a = grid.r[N - 1], b = grid.r[N - 2];
      if (!p.covers(a) && p.kind() != shooting::Kind::FastDecay)
        throw std::invalid_argument("discretize_barrier: outer piece does not reach r_max");
      disc.push_back(march_inward(src, grid, p.U(a), p.U(b)));
    }
  }
  DiscreteBarrier out;
  out.kind = bp.kind();
  std::size_t from = 0;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double R = pieces[k + 1].r_from;
    if (R >= grid.r_max()) break;
    const auto& a = disc[k];
    const auto& b = disc[k + 1];
    std::size_t best = N;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = from; j + 1 < N; ++j) {
      const double d0 = a[j] - b[j], d1 = a[j + 1] - b[j + 1];
      if (!std::isfinite(d0) || !std::isfinite(d1)) continue;
      if ((d0 <= 0.0 && d1 > 0.0) || (d0 >= 0.0 && d1 < 0.0)) {
        const double dist = std::abs(std::log(std::max(grid.r[j], 1e-300) / R));
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
    }
    if (best == N) throw std::runtime_error("discretize_barrier: discrete pieces do not cross near a glue radius");
    out.switch_nodes.push_back(best);
    from = best + 1;
  }
  out.u.resize(N);
  std::size_t piece = 0;
  for (std::size_t j = 0; j < N; ++j) {
    while (piece < out.switch_nodes.size() && j > out.switch_nodes[piece]) ++piece;
    out.u[j] = disc[piece][j];
  }
  const double km = matched_kappa(src, grid, out.u);
  out.kappa = bp.kind() == barriers::BarrierKind::Upper ? std::max(km, spec.n - 2.0) : km;
  return out;
}

}  // namespace radheat::parabolic
