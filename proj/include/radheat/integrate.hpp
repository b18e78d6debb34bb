// Adaptive Dormand-Prince 5(4) integration with dense output and events.
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace radheat::integrate {

// dy/ds = field(s, y); y and dy have the system dimension.
using Field = std::function<void(double s, const double* y, double* dy)>;

struct Event {
  std::function<double(double s, const double* y)> fn;
  int direction = 0;  // +1 rising only, -1 falling only, 0 both
  bool terminal = true;
  std::string name;
};

struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: automatic
  double h_max = std::numeric_limits<double>::infinity();
  double overflow = 1e150;
  std::size_t max_steps = 20'000'000;
};

enum class Termination { Endpoint, Event, StepUnderflow, Overflow, MaxSteps };

const char* to_string(Termination t);

struct EventHit {
  std::size_t index;
  double s;
  std::vector<double> y;
};

class Trajectory {
 public:
  explicit Trajectory(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t steps() const { return h_.size(); }
  bool empty() const { return s_.empty(); }
  double s_begin() const { return s_.front(); }
  double s_end() const { return s_end_; }
  bool forward() const { return s_end_ >= s_.front(); }
  bool contains(double s) const;

  // Accepted mesh point i (0..steps()).
  double mesh_s(std::size_t i) const { return s_[i]; }
  const double* mesh_y(std::size_t i) const { return &y_[i * dim_]; }

  void eval(double s, double* y) const;
  std::vector<double> eval(double s) const;
  // d/ds of the interpolant.
  void eval_derivative(double s, double* dy) const;

  Termination termination = Termination::Endpoint;
  std::vector<EventHit> events;

  // Builder interface used by the integrator.
  void start(double s0, const double* y0);
  void push_step(double h, const double* y_new, const double* coeffs);
  void truncate(double s_stop) { s_end_ = s_stop; }

 private:
  std::size_t locate(double s) const;

  std::size_t dim_;
  std::vector<double> s_;
  std::vector<double> y_;
  std::vector<double> h_;
  std::vector<double> cont_;  // 5*dim per step
  double s_end_ = 0.0;
};

Trajectory integrate(const Field& field, const std::vector<double>& y0, double s0, double s1,
                     const std::vector<Event>& events = {}, const Tolerance& tol = {});

}  // namespace radheat::integrate
