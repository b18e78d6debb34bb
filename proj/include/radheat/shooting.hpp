// Stationary radial solutions U'' + (n-1)/r U' + f(U,r) = 0 computed in Fowler variables.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radheat/fowler.hpp"
#include "radheat/integrate.hpp"
#include "radheat/potential.hpp"

namespace radheat::shooting {

using fowler::FowlerParams;
using potential::PotentialSpec;

enum class Kind { Regular, FastDecay, Singular, SlowDecay };
enum class ClassTag { Crossing, GroundStateFast, GroundStateSlow, SGSFast, SGSSlow, Undecided };

const char* to_string(Kind k);
const char* to_string(ClassTag c);

struct Classification {
  ClassTag tag = ClassTag::Undecided;
  double value = 0.0;  // R for Crossing, beta for the fast-decay tags
};

struct ShootOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  // relative size of the leading correction at the start radius; the neglected term is about its square
  double start_accuracy = 1e-10;
};

struct Sample {
  double r, U, Up;
};

class StationaryProfile {
 public:
  StationaryProfile(PotentialSpec spec, FowlerParams frame, Kind kind, double param,
                    integrate::Trajectory traj);

  const PotentialSpec& spec() const { return spec_; }
  const FowlerParams& frame() const { return frame_; }
  Kind kind() const { return kind_; }
  // alpha for Regular, beta for FastDecay, +inf otherwise
  double param() const { return param_; }
  const integrate::Trajectory& trajectory() const { return traj_; }

  double s_lo() const;
  double s_hi() const;
  double r_lo() const { return std::exp(s_lo()); }
  double r_hi() const { return std::exp(s_hi()); }
  bool covers(double r) const;

  // true when the integration stopped at a zero of U
  bool crossed() const { return traj_.termination == integrate::Termination::Event; }
  double zero_radius() const;

  fowler::PhasePoint phase(double s) const;
  fowler::PhasePoint phase(double s, double m) const;
  double U(double r) const;
  double Up(double r) const;
  double Upp(double r) const;
  // |U'' + (n-1)/r U' + f| relative to the size of its terms
  double residual(double r) const;

  std::vector<Sample> samples(std::size_t count) const;

  // U r^{m(l_u)} at the inner end, U r^{m(l_s)} and U r^{n-2} at the outer end.
  double fit_singular() const;
  double fit_slow() const;
  double fit_fast() const;

  Classification classification() const;

 private:
  PotentialSpec spec_;
  FowlerParams frame_;
  Kind kind_;
  double param_;
  integrate::Trajectory traj_;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

StationaryProfile regular_solution(const PotentialSpec& spec, double alpha, double r_max,
                                   const ShootOptions& opt = {});
StationaryProfile fast_decay_solution(const PotentialSpec& spec, double beta, double r_min,
                                      const ShootOptions& opt = {});
StationaryProfile singular_solution(const PotentialSpec& spec, double s0 = -30.0, double s_max = 30.0,
                                    const ShootOptions& opt = {});
StationaryProfile slow_decay_solution(const PotentialSpec& spec, double s0 = 30.0, double s_min = -30.0,
                                      const ShootOptions& opt = {});

// Start radius of the regular expansion and of the fast-decay tail.
double regular_start_radius(const PotentialSpec& spec, double alpha, double accuracy);
double fast_decay_start_radius(const PotentialSpec& spec, double beta, double accuracy);

Classification classify(const StationaryProfile& profile);

struct CrossingPoint {
  double alpha;
  double R;  // +inf when no zero in range
};
std::vector<CrossingPoint> crossing_radius_curve(const PotentialSpec& spec,
                                                 const std::vector<double>& alphas, double r_max,
                                                 const ShootOptions& opt = {});

enum class ScanDirection { Outward, Inward };

struct Intersection {
  double r;
  double slope_gap;  // U_a'(r) - U_b'(r)
};

Intersection first_intersection(const StationaryProfile& a, const StationaryProfile& b,
                                ScanDirection dir = ScanDirection::Outward);
// Same, restricted to [r1, r2].
Intersection first_intersection(const StationaryProfile& a, const StationaryProfile& b,
                                double r1, double r2, ScanDirection dir);
std::size_t count_sign_changes(const StationaryProfile& a, const StationaryProfile& b, double r1,
                               double r2);

struct ManifoldSlice {
  double tau;
  double l;
  bool unstable;
  std::vector<double> params;
  std::vector<fowler::PhasePoint> points;  // invalid entries have NaN coordinates
};

ManifoldSlice unstable_slice(const PotentialSpec& spec, double tau, const std::vector<double>& alphas,
                             const ShootOptions& opt = {});
ManifoldSlice stable_slice(const PotentialSpec& spec, double tau, const std::vector<double>& betas,
                           const ShootOptions& opt = {});

}  // namespace radheat::shooting
