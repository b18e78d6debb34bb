#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "radheat/parabolic.hpp"

namespace radheat::parabolic {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = boost::math::constants::pi<double>();

double integrate(const std::function<double(double)>& g, double a, double b) {
  return gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-11);
}

// 10-point Gauss-Legendre nodes and weights on [0, 1].
const std::vector<std::pair<double, double>>& gauss_nodes() {
  static const std::vector<std::pair<double, double>> nodes = [] {
    std::vector<std::pair<double, double>> v;
    const auto& x = boost::math::quadrature::gauss<double, 10>::abscissa();
    const auto& w = boost::math::quadrature::gauss<double, 10>::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      v.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
      if (x[i] != 0.0) v.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
    }
    return v;
  }();
  return nodes;
}

}  // namespace

double heat_semigroup_3d(const std::function<double(double)>& phi, double t, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("heat_semigroup_3d: r must be >= 0");
  if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup_3d: t must be >= 0");
  if (t == 0.0) return phi(r);
  const double w = 20.0 * std::sqrt(t);
  if (r == 0.0) {
    auto g = [&](double s) { return s * s * std::exp(-s * s / (4.0 * t)) * phi(s); };
    return 4.0 * kPi * integrate(g, 0.0, w) / std::pow(4.0 * kPi * t, 1.5);
  }
  // e^{-(r-s)^2/4t} - e^{-(r+s)^2/4t} = -expm1(-rs/t) e^{-(r-s)^2/4t}
  auto g = [&](double s) {
    const double d = r - s;
    return s * phi(s) * -std::expm1(-r * s / t) * std::exp(-d * d / (4.0 * t));
  };
  return integrate(g, std::max(0.0, r - w), r + w) / (r * std::sqrt(4.0 * kPi * t));
}

std::vector<double> heat_semigroup_3d(const std::function<double(double)>& phi, double t,
                                      const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(heat_semigroup_3d(phi, t, r));
  return out;
}

PicardResult picard_mild(const Source& src, int n, const std::function<double(double)>& phi, double t,
                         std::size_t iterations, const PicardOptions& opt) {
  if (n != 3) throw std::invalid_argument("picard_mild: only n = 3 is supported");
  if (!(t > 0.0)) throw std::invalid_argument("picard_mild: t must be > 0");
  if (opt.time_nodes < 32) throw std::invalid_argument("picard_mild: need at least 32 time nodes");
  if (opt.cells < 4 || !(opt.r_max > 0.0)) throw std::invalid_argument("picard_mild: bad lattice");
  const std::size_t K = opt.time_nodes, M = opt.cells;
  const double h = opt.r_max / static_cast<double>(M);
  const double dt = t / static_cast<double>(K);

  PicardResult res;
  for (std::size_t j = 0; j <= M; ++j) res.r.push_back(h * static_cast<double>(j));

  // free part S(t_k) phi on the lattice
  std::vector<std::vector<double>> free(K + 1);
  for (std::size_t k = 0; k <= K; ++k) free[k] = heat_semigroup_3d(phi, dt * static_cast<double>(k), res.r);

  // S(d dt) as a matrix on lattice data: local cubic interpolation, even about 0 and zero beyond r_max
  const std::size_t P = M + 1;
  std::vector<std::vector<double>> S(K + 1);
  const auto& gl = gauss_nodes();
  for (std::size_t d = 1; d <= K; ++d) {
    const double tau = dt * static_cast<double>(d);
    const double w = 20.0 * std::sqrt(tau);
    auto& mat = S[d];
    mat.assign(P * P, 0.0);
    for (std::size_t j = 0; j <= M; ++j) {
      const double r = res.r[j];
      const auto c_lo = static_cast<std::size_t>(std::max(0.0, std::floor((r - w) / h)));
      const auto c_hi = std::min(M, static_cast<std::size_t>(std::ceil((r + w) / h)));
      for (std::size_t c = c_lo; c < c_hi; ++c) {
        for (const auto& [x, wt] : gl) {
          const double s = h * (static_cast<double>(c) + x);
          double kern;
          if (r == 0.0) {
            kern = 4.0 * kPi * s * s * std::exp(-s * s / (4.0 * tau)) / std::pow(4.0 * kPi * tau, 1.5);
          } else {
            const double dd = r - s;
            kern = s * -std::expm1(-r * s / tau) * std::exp(-dd * dd / (4.0 * tau)) / (r * std::sqrt(4.0 * kPi * tau));
          }
          kern *= wt * h;
          // Lagrange weights on nodes c-1..c+2 at offset x
          const double L[4] = {-x * (x - 1.0) * (x - 2.0) / 6.0, (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
                               -(x + 1.0) * x * (x - 2.0) / 2.0, (x + 1.0) * x * (x - 1.0) / 6.0};
          for (int q = 0; q < 4; ++q) {
            const long node = static_cast<long>(c) - 1 + q;
            const long idx = node < 0 ? -node : node;
            if (idx > static_cast<long>(M)) continue;
            mat[j * P + static_cast<std::size_t>(idx)] += kern * L[q];
          }
        }
      }
    }
  }

  auto U = free;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<std::vector<double>> F(K + 1, std::vector<double>(P));
    for (std::size_t i = 0; i <= K; ++i)
      for (std::size_t j = 0; j <= M; ++j) {
        const double u = U[i][j];
        const double rs = j == 0 ? 0.5 * h : res.r[j];
        F[i][j] = u >= 0 ? src.f(u, rs) : -src.f(-u, rs);
      }
    std::vector<std::vector<double>> next(K + 1);
    double change = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
      next[k] = free[k];
      for (std::size_t i = 0; i <= k && k > 0; ++i) {
        const double wgt = (i == 0 || i == k) ? 0.5 * dt : dt;
        if (i == k) {
          for (std::size_t j = 0; j <= M; ++j) next[k][j] += wgt * F[i][j];
          continue;
        }
        const auto& mat = S[k - i];
        for (std::size_t j = 0; j <= M; ++j) {
          double acc = 0.0;
          for (std::size_t l = 0; l < P; ++l) acc += mat[j * P + l] * F[i][l];
          next[k][j] += wgt * acc;
        }
      }
      for (std::size_t j = 0; j <= M; ++j) change = std::max(change, std::abs(next[k][j] - U[k][j]));
    }
    U = std::move(next);
    if (!res.residuals.empty() && change > res.residuals.back() && change > 1e-14) res.contracting = false;
    res.residuals.push_back(change);
  }
  res.u = U[K];
  return res;
}

PicardResult picard_mild(const PotentialSpec& spec, const std::function<double(double)>& phi, double t,
                         std::size_t iterations, const PicardOptions& opt) {
  spec.validate();
  return picard_mild(Source::from_spec(spec), spec.n, phi, t, iterations, opt);
}

RhoT suggested_rho_T(const PotentialSpec& spec, double normX, const WeightSpec& w) {
  validate_weight(spec, w);
  if (!(normX >= 0.0)) throw std::invalid_argument("suggested_rho_T: norm must be >= 0");
  const double nu = w.nu, e = w.outer;
  const double D1 = nu == 0.0 ? 1.0 : std::exp(-nu / 2.0) * std::pow(16.0 * nu, nu / 2.0);
  const double rho = 2.0 * (2.0 * D1 + std::pow(2.0, nu + 1.0) + std::pow(2.0, e)) * normX;

  const auto ce = potential::critical_exponents(spec);
  const double delta = *std::max_element(spec.q.begin(), spec.q.end()) - 2.0;
  const double a = delta * (ce.m_u - nu) / 2.0;
  const double k = std::max(std::pow(rho, 1.0 + delta), std::pow(rho, delta));
  const double hhat = e == 0.0 ? 1.0 : std::pow(8.0 * e, e / 2.0) * std::exp(-e / 4.0);
  auto lambda = [&](double T) {
    return k * ((2.0 * std::pow(2.0, nu) + 2.0 * D1) / a * std::pow(T, a) + (1.0 + std::pow(2.0, e)) * T +
                std::pow(2.0, 1.5 * spec.n) * hhat * std::pow(T, 1.0 + e / 2.0));
  };
  if (rho == 0.0 || !(a > 0.0)) return {rho, std::numeric_limits<double>::infinity(), D1};
  double lo = 0.0, hi = 1.0;
  while (lambda(hi) < 0.5 && hi < 1e300) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lambda(mid) <= 0.5 ? lo : hi) = mid;
  }
  return {rho, lo, D1};
}

}  // namespace radheat::parabolic
