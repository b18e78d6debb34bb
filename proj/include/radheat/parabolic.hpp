// Radial Cauchy problem u_t = u'' + (n-1)/r u' + f(u,r): grids, weights, evolution and oracles.
#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "radheat/barriers.hpp"
#include "radheat/potential.hpp"

namespace radheat::parabolic {

using potential::PotentialSpec;

// Nonlinearity and its u-derivative; f is extended oddly to u < 0.
struct Source {
  std::function<double(double u, double r)> f;
  std::function<double(double u, double r)> df;

  static Source from_spec(const PotentialSpec& spec);
  static Source zero();
  static Source linear(double lambda);
};

struct RadialGrid {
  int n = 3;
  std::vector<double> r;
  double h0 = 0.0;
  double growth = 1.0;

  // Spacing h0 at the inner end growing by `growth` per cell; r_min = 0 gives a centre node.
  static RadialGrid graded(int n, double r_min, double r_max, double h0, double growth);
  static RadialGrid uniform(int n, double r_max, std::size_t cells);
  // Same layout with h0 halved and the growth factor square-rooted.
  RadialGrid refined() const;

  std::size_t size() const { return r.size(); }
  double r_min() const { return r.front(); }
  double r_max() const { return r.back(); }
  bool has_centre() const { return r.front() == 0.0; }
  double h_min() const;
  void validate() const;
};

// w = r^nu for r <= 1 and r^{outer} for r >= 1, outer = l/delta.
struct WeightSpec {
  double nu = 0.0;
  double outer = 0.0;
  double operator()(double r) const;
};

// nu < m(l_u) and outer >= 0, else invalid_argument.
void validate_weight(const PotentialSpec& spec, const WeightSpec& w);

// sup over nodes of |u| w.
double weighted_norm(const RadialGrid& grid, const std::vector<double>& u, const WeightSpec& w);
// sup over nodes of |u| (1 + r^nu).
double augmented_norm(const RadialGrid& grid, const std::vector<double>& u, double nu);

// Exact radial heat flow in R^3 by adaptive quadrature of the image kernel.
double heat_semigroup_3d(const std::function<double(double)>& phi, double t, double r);
std::vector<double> heat_semigroup_3d(const std::function<double(double)>& phi, double t,
                                      const std::vector<double>& radii);

struct PicardOptions {
  std::size_t time_nodes = 32;
  double r_max = 8.0;
  std::size_t cells = 160;
};

struct PicardResult {
  std::vector<double> r;
  std::vector<double> u;                  // last iterate at time t
  std::vector<double> residuals;          // sup |u_{k+1} - u_k| over the space-time lattice
  bool contracting = true;
  double residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

// Picard iteration of the Duhamel formula on a uniform lattice (n = 3).
PicardResult picard_mild(const Source& src, int n, const std::function<double(double)>& phi, double t,
                         std::size_t iterations, const PicardOptions& opt = {});
PicardResult picard_mild(const PotentialSpec& spec, const std::function<double(double)>& phi, double t,
                         std::size_t iterations, const PicardOptions& opt = {});

struct RhoT {
  double rho;
  double T0;
  double D1;
};

// Radius of the contraction ball and an advisory existence time.
RhoT suggested_rho_T(const PotentialSpec& spec, double normX, const WeightSpec& w);

enum class Scheme { Implicit, Explicit };
const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

enum class FateKind { Decayed, BlowUp, Steady, Undecided };
const char* to_string(FateKind f);

struct Fate {
  FateKind kind = FateKind::Undecided;
  double time = 0.0;  // T_est for BlowUp, time reached otherwise
};

struct FateControls {
  double blowup_threshold = 1e6;
  double decay_floor = 1e-3;        // relative to the initial norm
  double dt_collapse = 1e-3;        // dt below this fraction of the largest accepted dt
  double steady_tol = 1e-8;
  std::size_t min_window = 5;
};

struct SeriesPoint {
  double t;
  double norm_w;                // sup |u| w
  std::vector<double> norm_nu;  // sup |u| (1 + r^nu) for the configured nu values
  double dt;
};

// Fate from a norm series; the window is the second half of the run in time.
Fate detect_fate(const std::vector<SeriesPoint>& series, const FateControls& fc = {});

struct EvolveControls {
  Scheme scheme = Scheme::Implicit;
  double t_end = 1e12;
  double dt_init = 0.0;      // 0: automatic
  double dt_max = std::numeric_limits<double>::infinity();
  double rtol = 1e-3;        // step-doubling tolerance (implicit)
  double cfl = 0.8;          // fraction of the monotone explicit bound
  double mmatrix = 0.5;      // bound on dt * (df/du + inner injection)
  double inner_nu = 0.0;     // inner Robin u' = -nu u / r when r_min > 0
  double kappa = std::numeric_limits<double>::quiet_NaN();  // outer Robin; NaN: n - 2
  WeightSpec weight;
  std::vector<double> norm_nus;
  std::vector<double> output_times;  // snapshots taken exactly at these times
  FateControls fate;
  bool stop_on_fate = true;
  double monotone_slack = 1e-8;
  std::size_t max_steps = 5'000'000;
};

struct Snapshot {
  double t;
  std::vector<double> u;
};

struct EvolutionResult {
  Fate fate;
  std::vector<SeriesPoint> series;
  std::vector<Snapshot> snapshots;
  std::vector<double> final_u;
  double t_final = 0.0;
  double kappa = 0.0;
  // u^{k+1} <= u^k (resp. >=) at every node and step within the slack
  bool nonincreasing = true;
  bool nondecreasing = true;
  // u_{j+1} <= u_j at every recorded step
  bool radially_nonincreasing = true;
  double max_rise = 0.0;  // largest relative increase of a node value over a step
  double max_drop = 0.0;  // largest relative decrease
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::string diagnostics;
};

class EvolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

EvolutionResult evolve(const Source& src, const RadialGrid& grid, const std::vector<double>& phi,
                       const EvolveControls& ctl = {});
EvolutionResult evolve(const PotentialSpec& spec, const RadialGrid& grid, const std::vector<double>& phi,
                       const EvolveControls& ctl = {});

// Default outer Robin exponent: n - 2 for fast-decay tails, m(l_s) for slow-decay tails.
double default_kappa(const PotentialSpec& spec, const std::string& tail);

struct ComparisonReport {
  bool ordered = false;
  double max_violation = 0.0;  // largest (low - high) relative to max(|low|, |high|), floored at 1e-12 sup
  double at_t = 0.0, at_r = 0.0;
};

// low <= high at every common snapshot and node within slack.
ComparisonReport compare_results(const EvolutionResult& low, const EvolutionResult& high,
                                 const RadialGrid& grid, double slack = 1e-8);
bool comparison_check(const EvolutionResult& low, const EvolutionResult& high, const RadialGrid& grid);

// Discrete stationary solutions of the grid operator.
std::vector<double> march_outward(const Source& src, const RadialGrid& grid, double alpha);
std::vector<double> march_inward(const Source& src, const RadialGrid& grid, double u_last, double u_prev);
// Outer Robin exponent making the last-node equation exact for u.
double matched_kappa(const Source& src, const RadialGrid& grid, const std::vector<double>& u);

struct DiscreteBarrier {
  std::vector<double> u;
  double kappa;  // outer Robin exponent that keeps the data an exact discrete upper/lower solution
  std::vector<std::size_t> switch_nodes;
  barriers::BarrierKind kind;
};

// Re-marches each piece on the grid and glues at the discrete crossing nearest each glue radius.
DiscreteBarrier discretize_barrier(const PotentialSpec& spec, const barriers::BarrierProfile& bp,
                                   const RadialGrid& grid);

// Largest relative discrete residual sign violation: A(u) <= 0 for upper, >= 0 for lower data.
double discrete_residual_violation(const Source& src, const RadialGrid& grid, const std::vector<double>& u,
                                   double kappa, double inner_nu, barriers::BarrierKind kind);

}  // namespace radheat::parabolic
