#include "radheat/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radheat::integrate {

namespace {

// Dormand-Prince 5(4) tableau and Hairer's dense-output weights.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double initial_step(const Field& f, double s0, const std::vector<double>& y0,
                    const std::vector<double>& f0, double dir, double span, const Tolerance& tol) {
  const std::size_t n = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = tol.atol + tol.rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min({h, tol.h_max, span});
  std::vector<double> y1(n), f1(n);
  // shrink the probe step until the field is finite there
  for (int k = 0; k < 60; ++k) {
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + dir * h * f0[i];
    f(s0 + dir * h, y1.data(), f1.data());
    if (std::all_of(f1.begin(), f1.end(), [](double v) { return std::isfinite(v); })) break;
    h *= 0.1;
  }
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = tol.atol + tol.rtol * std::abs(y0[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                   : std::pow(0.01 / der12, 0.2);
  const double out = std::min({100 * std::abs(h), h1, tol.h_max, span});
  return std::isfinite(out) && out > 0.0 ? out : 1e-6 * span;
}

bool sign_change(double a, double b, int direction) {
  if (direction > 0) return a < 0.0 && b >= 0.0;
  if (direction < 0) return a > 0.0 && b <= 0.0;
  return (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0);
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Endpoint: return "endpoint";
    case Termination::Event: return "event";
    case Termination::StepUnderflow: return "step_underflow";
    case Termination::Overflow: return "overflow";
    case Termination::MaxSteps: return "max_steps";
  }
  return "unknown";
}

void Trajectory::start(double s0, const double* y0) {
  s_.assign(1, s0);
  y_.assign(y0, y0 + dim_);
  h_.clear();
  cont_.clear();
  s_end_ = s0;
}

void Trajectory::push_step(double h, const double* y_new, const double* coeffs) {
  h_.push_back(h);
  s_.push_back(s_.back() + h);
  y_.insert(y_.end(), y_new, y_new + dim_);
  cont_.insert(cont_.end(), coeffs, coeffs + 5 * dim_);
  s_end_ = s_.back();
}

bool Trajectory::contains(double s) const {
  if (s_.empty()) return false;
  const double lo = std::min(s_.front(), s_end_), hi = std::max(s_.front(), s_end_);
  return s >= lo && s <= hi;
}

std::size_t Trajectory::locate(double s) const {
  if (h_.empty()) throw std::out_of_range("trajectory has no steps");
  if (!contains(s)) throw std::out_of_range("s outside trajectory range");
  // Index of the step whose interval holds s.
  std::size_t k;
  if (forward()) {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - s_.begin()) - 1));
  } else {
    auto it = std::upper_bound(s_.begin(), s_.end(), s, [](double v, double e) { return v > e; });
    k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - s_.begin()) - 1));
  }
  return std::min(k, h_.size() - 1);
}

void Trajectory::eval(double s, double* y) const {
  if (h_.empty()) {
    if (!s_.empty() && s == s_.front()) {
      std::copy(y_.begin(), y_.begin() + dim_, y);
      return;
    }
    throw std::out_of_range("trajectory has no steps");
  }
  const std::size_t k = locate(s);
  const double th = (s - s_[k]) / h_[k];
  const double th1 = 1.0 - th;
  const double* r = &cont_[k * 5 * dim_];
  for (std::size_t i = 0; i < dim_; ++i) {
    const double r1 = r[i], r2 = r[dim_ + i], r3 = r[2 * dim_ + i], r4 = r[3 * dim_ + i],
                 r5 = r[4 * dim_ + i];
    y[i] = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
}

std::vector<double> Trajectory::eval(double s) const {
  std::vector<double> y(dim_);
  eval(s, y.data());
  return y;
}

void Trajectory::eval_derivative(double s, double* dy) const {
  const std::size_t k = locate(s);
  const double th = (s - s_[k]) / h_[k];
  const double th1 = 1.0 - th;
  const double* r = &cont_[k * 5 * dim_];
  for (std::size_t i = 0; i < dim_; ++i) {
    const double r2 = r[dim_ + i], r3 = r[2 * dim_ + i], r4 = r[3 * dim_ + i],
                 r5 = r[4 * dim_ + i];
    // y = r1 + th*r2 + th*th1*r3 + th^2*th1*r4 + th^2*th1^2*r5
    const double d = r2 + (1.0 - 2.0 * th) * r3 + (2.0 * th - 3.0 * th * th) * r4 +
                     (2.0 * th * th1 * th1 - 2.0 * th * th * th1) * r5;
    dy[i] = d / h_[k];
  }
}

Trajectory integrate(const Field& field, const std::vector<double>& y0, double s0, double s1,
                     const std::vector<Event>& events, const Tolerance& tol) {
  if (s0 == s1) throw std::invalid_argument("integrate: s0 == s1");
  if (y0.empty()) throw std::invalid_argument("integrate: empty state");
  const std::size_t n = y0.size();
  const double dir = s1 > s0 ? 1.0 : -1.0;

  Trajectory traj(n);
  traj.start(s0, y0.data());

  std::vector<double> y = y0, ynew(n), ytmp(n), err(n), cont(5 * n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  field(s0, y.data(), k1.data());

  std::vector<double> ev_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) ev_prev[e] = events[e].fn(s0, y.data());

  double h = tol.h_init > 0 ? tol.h_init : initial_step(field, s0, y, k1, dir, std::abs(s1 - s0), tol);
  double s = s0;
  double err_old = 1e-4;
  bool reject_last = false;

  for (std::size_t step = 0;; ++step) {
    if (step >= tol.max_steps) {
      traj.termination = Termination::MaxSteps;
      return traj;
    }
    const double remaining = std::abs(s1 - s);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double underflow = 32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s));
    if (!(h >= underflow)) {
      traj.termination = Termination::StepUnderflow;
      return traj;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    field(s + c2 * hs, ytmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    field(s + c3 * hs, ytmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    field(s + c4 * hs, ytmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    field(s + c5 * hs, ytmp.data(), k5.data());
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    field(s + hs, ytmp.data(), k6.data());
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    field(s + hs, ynew.data(), k7.data());

    double errn = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = tol.atol + tol.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      errn += (err[i] / sk) * (err[i] / sk);
      if (!std::isfinite(ynew[i]) || !std::isfinite(k7[i])) finite = false;
    }
    errn = finite ? std::sqrt(errn / static_cast<double>(n)) : std::numeric_limits<double>::infinity();

    if (errn > 1.0) {
      const double fac = std::isfinite(errn) ? std::max(0.2, 0.9 * std::pow(errn, -0.2)) : 0.1;
      h *= fac;
      reject_last = true;
      continue;
    }

    // Accepted step: build dense-output coefficients.
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = hs * k1[i] - ydiff;
      cont[i] = y[i];
      cont[n + i] = ydiff;
      cont[2 * n + i] = bspl;
      cont[3 * n + i] = ydiff - hs * k7[i] - bspl;
      cont[4 * n + i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                              d7 * k7[i]);
    }
    traj.push_step(hs, ynew.data(), cont.data());
    const double s_new = last ? s1 : s + hs;

    // Events: earliest terminal crossing wins; non-terminal hits are recorded in order.
    double stop_at = std::numeric_limits<double>::quiet_NaN();
    std::size_t stop_idx = 0;
    std::vector<EventHit> hits;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double vnew = events[e].fn(s_new, ynew.data());
      if (sign_change(ev_prev[e], vnew, events[e].direction)) {
        double a = s, b = s_new, fa = ev_prev[e];
        std::vector<double> ym(n);
        while (std::abs(b - a) > 1e-13 * std::max(1.0, std::abs(b))) {
          const double mid = 0.5 * (a + b);
          traj.eval(mid, ym.data());
          const double fm = events[e].fn(mid, ym.data());
          if ((fa < 0.0 && fm >= 0.0) || (fa > 0.0 && fm <= 0.0)) {
            b = mid;
          } else {
            a = mid;
            fa = fm;
          }
        }
        traj.eval(b, ym.data());
        hits.push_back({e, b, ym});
        if (events[e].terminal &&
            (std::isnan(stop_at) || dir * (b - stop_at) < 0.0)) {
          stop_at = b;
          stop_idx = e;
        }
      }
      ev_prev[e] = vnew;
    }
    std::sort(hits.begin(), hits.end(),
              [dir](const EventHit& x, const EventHit& z) { return dir * (x.s - z.s) < 0.0; });
    for (auto& hit : hits) {
      if (!std::isnan(stop_at) && dir * (hit.s - stop_at) > 0.0) break;
      traj.events.push_back(std::move(hit));
    }
    if (!std::isnan(stop_at)) {
      (void)stop_idx;
      traj.truncate(stop_at);
      traj.termination = Termination::Event;
      return traj;
    }

    double ymax = 0.0;
    for (std::size_t i = 0; i < n; ++i) ymax = std::max(ymax, std::abs(ynew[i]));
    if (ymax > tol.overflow) {
      traj.termination = Termination::Overflow;
      return traj;
    }

    s = s_new;
    y.swap(ynew);
    k1.swap(k7);
    if (last) {
      traj.truncate(s1);
      traj.termination = Termination::Endpoint;
      return traj;
    }

    // PI step-size controller.
    const double errc = std::max(errn, 1e-10);
    double fac = 0.9 * std::pow(errc, -0.17) * std::pow(err_old, 0.04);
    fac = std::clamp(fac, 0.2, 5.0);
    if (reject_last) fac = std::min(fac, 1.0);
    err_old = std::max(errn, 1e-4);
    reject_last = false;
    h = std::min(h * fac, tol.h_max);
  }
}

}  // namespace radheat::integrate
