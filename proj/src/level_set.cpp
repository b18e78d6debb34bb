#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <stdexcept>

#include "radheat/fowler.hpp"

namespace radheat::fowler {

namespace {

struct Segment {
  long e0, e1;
  std::array<double, 2> p0, p1;
};

Topology expected_topology(double b, double b_star) {
  const double tol = 1e-12 * std::max(1.0, std::abs(b_star));
  if (std::abs(b) <= tol) return Topology::FigureEight;
  if (b < b_star - tol) return Topology::Empty;
  if (b < 0.0) return Topology::TwoLobes;
  return Topology::SingleLoop;
}

}  // namespace

LevelSet level_set_K(const PotentialSpec& spec, double b, double tau, const FowlerParams& p,
                     int resolution) {
  if (!std::isfinite(tau) || !std::isfinite(b)) throw std::invalid_argument("level_set_K: bad input");
  if (resolution < 8) throw std::invalid_argument("level_set_K: resolution too small");
  LevelSet out;
  out.b = b;
  out.tau = tau;
  const double ms = (p.n - 2.0) / 2.0;
  auto H = [&](double y1, double y2) {
    return ms * y1 * y2 + 0.5 * y2 * y2 + G_eval(spec, y1, tau, p);
  };
  const double ystar = solve_g_equals(spec, p, SLimit::at(tau), ms * ms);
  out.b_star = -0.5 * ms * ms * ystar * ystar + G_eval(spec, ystar, tau, p);
  out.expected = expected_topology(b, out.b_star);

  // Grow the box until H > b on its boundary.
  double Y1 = 2.0 * ystar, Y2 = 2.0 * ms * ystar + 1.0;
  auto boundary_min = [&]() {
    double mn = std::numeric_limits<double>::infinity();
    const int k = 200;
    for (int i = 0; i <= k; ++i) {
      const double t = -1.0 + 2.0 * i / k;
      mn = std::min({mn, H(t * Y1, Y2), H(t * Y1, -Y2), H(Y1, t * Y2), H(-Y1, t * Y2)});
    }
    return mn;
  };
  for (int it = 0; boundary_min() <= b; ++it) {
    Y1 *= 2.0;
    Y2 *= 2.0;
    if (it > 60) throw std::runtime_error("level_set_K: level set is unbounded");
  }

  // Odd node count keeps the origin at a cell centre, away from grid nodes.
  const int N = resolution | 1;
  std::vector<double> xs(N + 1), ys(N + 1), v((N + 1) * (N + 1));
  for (int i = 0; i <= N; ++i) {
    xs[i] = -Y1 + 2.0 * Y1 * i / N;
    ys[i] = -Y2 + 2.0 * Y2 * i / N;
  }
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i <= N; ++i) v[j * (N + 1) + i] = H(xs[i], ys[j]) - b;
  auto val = [&](int i, int j) { return v[j * (N + 1) + i]; };
  auto hedge = [&](int i, int j) { return 2L * (j * (N + 1) + i); };
  auto vedge = [&](int i, int j) { return 2L * (j * (N + 1) + i) + 1; };
  auto lerp = [](double a, double fa, double c, double fc) { return a + (c - a) * fa / (fa - fc); };

  std::vector<Segment> segs;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double f0 = val(i, j), f1 = val(i + 1, j), f2 = val(i + 1, j + 1), f3 = val(i, j + 1);
      const bool in0 = f0 > 0, in1 = f1 > 0, in2 = f2 > 0, in3 = f3 > 0;
      struct EP {
        long id;
        std::array<double, 2> pt;
      };
      EP e[4];
      bool has[4] = {in0 != in1, in1 != in2, in3 != in2, in0 != in3};
      if (has[0]) e[0] = {hedge(i, j), {lerp(xs[i], f0, xs[i + 1], f1), ys[j]}};
      if (has[1]) e[1] = {vedge(i + 1, j), {xs[i + 1], lerp(ys[j], f1, ys[j + 1], f2)}};
      if (has[2]) e[2] = {hedge(i, j + 1), {lerp(xs[i], f3, xs[i + 1], f2), ys[j + 1]}};
      if (has[3]) e[3] = {vedge(i, j), {xs[i], lerp(ys[j], f0, ys[j + 1], f3)}};
      const int count = has[0] + has[1] + has[2] + has[3];
      if (count == 2) {
        int a = -1, c = -1;
        for (int k = 0; k < 4; ++k)
          if (has[k]) (a < 0 ? a : c) = k;
        segs.push_back({e[a].id, e[c].id, e[a].pt, e[c].pt});
      } else if (count == 4) {
        const bool centre = H(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])) - b > 0;
        if (centre == in0) {
          segs.push_back({e[0].id, e[1].id, e[0].pt, e[1].pt});
          segs.push_back({e[2].id, e[3].id, e[2].pt, e[3].pt});
        } else {
          segs.push_back({e[0].id, e[3].id, e[0].pt, e[3].pt});
          segs.push_back({e[1].id, e[2].id, e[1].pt, e[2].pt});
        }
      }
    }
  }

  // Chain segments sharing edge points into polylines.
  std::map<long, std::vector<std::size_t>> by_edge;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    by_edge[segs[k].e0].push_back(k);
    by_edge[segs[k].e1].push_back(k);
  }
  std::vector<bool> used(segs.size(), false);
  for (std::size_t k0 = 0; k0 < segs.size(); ++k0) {
    if (used[k0]) continue;
    used[k0] = true;
    std::vector<std::array<double, 2>> poly = {segs[k0].p0, segs[k0].p1};
    const long start = segs[k0].e0;
    long cur = segs[k0].e1;
    bool closed = false;
    while (true) {
      if (cur == start) {
        closed = true;
        break;
      }
      std::size_t next = segs.size();
      for (auto k : by_edge[cur])
        if (!used[k]) next = k;
      if (next == segs.size()) break;
      used[next] = true;
      const auto& sg = segs[next];
      if (sg.e0 == cur) {
        poly.push_back(sg.p1);
        cur = sg.e1;
      } else {
        poly.push_back(sg.p0);
        cur = sg.e0;
      }
    }
    out.curves.push_back(std::move(poly));
    out.closed.push_back(closed);
  }

  const bool through_origin = std::abs(H(0.0, 0.0) - b) <= 1e-12 * std::max(1.0, std::abs(out.b_star));
  if (through_origin) {
    out.topology = Topology::FigureEight;
  } else if (out.curves.empty()) {
    out.topology = Topology::Empty;
  } else if (out.curves.size() == 1 && out.closed[0]) {
    out.topology = Topology::SingleLoop;
  } else if (out.curves.size() == 2 && out.closed[0] && out.closed[1]) {
    out.topology = Topology::TwoLobes;
  } else {
    out.topology = Topology::Unknown;
  }
  return out;
}

}  // namespace radheat::fowler
