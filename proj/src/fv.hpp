// Finite-volume form of r^{1-n}(r^{n-1}u')' on a radial grid (internal).
#pragma once

#include <cmath>
#include <vector>

#include "radheat/parabolic.hpp"

namespace radheat::parabolic::detail {

struct FvGeometry {
  int n = 3;
  std::size_t N = 0;           // number of nodes
  std::vector<double> vol;     // cell volumes / omega_n
  std::vector<double> c;       // face conductances between j and j+1
  std::vector<double> rs;      // radius at which f is evaluated
  double inner_area = 0.0;     // r_min^{n-2}, zero for a centre node
  double outer_area = 0.0;     // r_max^{n-2}
  bool centre = true;

  explicit FvGeometry(const RadialGrid& g) {
    n = g.n;
    N = g.r.size();
    centre = g.has_centre();
    vol.resize(N);
    c.resize(N - 1);
    rs.resize(N);
    const auto& r = g.r;
    for (std::size_t j = 0; j + 1 < N; ++j) {
      const double face = 0.5 * (r[j] + r[j + 1]);
      c[j] = std::pow(face, n - 1) / (r[j + 1] - r[j]);
    }
    for (std::size_t j = 0; j < N; ++j) {
      const double left = j == 0 ? r[0] : 0.5 * (r[j - 1] + r[j]);
      const double right = j + 1 == N ? r[j] : 0.5 * (r[j] + r[j + 1]);
      vol[j] = (std::pow(right, n) - std::pow(left, n)) / n;
      rs[j] = r[j] > 0.0 ? r[j] : 0.5 * r[1];
    }
    inner_area = centre ? 0.0 : std::pow(r[0], n - 2);
    outer_area = std::pow(r[N - 1], n - 2);
  }

  // Net flux into cell j plus boundary terms (no source); Robin exponents nu (inner), kappa (outer).
  double flux(const std::vector<double>& u, std::size_t j, double nu, double kappa) const {
    double a = 0.0;
    if (j + 1 < N) a += c[j] * (u[j + 1] - u[j]);
    if (j > 0) a -= c[j - 1] * (u[j] - u[j - 1]);
    if (j == 0 && !centre) a += nu * inner_area * u[0];
    if (j + 1 == N) a -= kappa * outer_area * u[j];
    return a;
  }
};

inline double f_odd(const Source& s, double u, double r) { return u >= 0 ? s.f(u, r) : -s.f(-u, r); }
inline double df_odd(const Source& s, double u, double r) { return s.df(std::abs(u), r); }

}  // namespace radheat::parabolic::detail
