// Glued stationary profiles used as upper and lower initial data.
#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "radheat/shooting.hpp"

namespace radheat::barriers {

using potential::PotentialSpec;
using shooting::ShootOptions;
using shooting::StationaryProfile;

// Upper: every derivative jump is negative. Lower: every jump is positive.
enum class BarrierKind { Upper, Lower, Smooth, Mixed };
const char* to_string(BarrierKind k);

// A stationary profile used on [r_from, r_to].
struct Piece {
  StationaryProfile profile;
  double r_from;
  double r_to;
};

struct Junction {
  double r;
  double jump;  // outer slope - inner slope
  double gap;   // relative value mismatch
};

class BarrierProfile {
 public:
  // Pieces must tile [r_from of the first, r_to of the last] in increasing order.
  BarrierProfile(std::vector<Piece> pieces, BarrierKind requested);

  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Junction>& junctions() const { return junctions_; }
  const StationaryProfile& inner() const { return pieces_.front().profile; }
  const StationaryProfile& outer() const { return pieces_.size() > 1 ? pieces_[1].profile : pieces_.front().profile; }

  // First glue radius and its jump; +inf and 0 without glue.
  double R_glue() const;
  double J() const;
  BarrierKind kind() const { return kind_; }
  BarrierKind requested() const { return requested_; }

  // Value at the centre (or the singular fit there) and the tail constant.
  double D() const;
  double L() const;
  // "fast" when the outer tail is r^{2-n}, "slow" otherwise.
  std::string tail() const;

  double r_begin() const { return pieces_.front().r_from; }
  double r_end() const { return pieces_.back().r_to; }
  bool covers(double r) const { return r >= r_begin() && r <= r_end(); }
  // At a glue radius the inner piece is used.
  double U(double r) const;
  double Up(double r) const;
  // Log-spaced samples on [r1, r2] plus every glue radius inside it.
  std::vector<shooting::Sample> samples(double r1, double r2, std::size_t count) const;

 private:
  const Piece& piece_at(double r) const;

  std::vector<Piece> pieces_;
  std::vector<Junction> junctions_;
  BarrierKind kind_;
  BarrierKind requested_;
};

struct BarrierPair {
  BarrierProfile upper;
  BarrierProfile lower;
  // anchors: alpha1, alpha2 for the ground-state pair; alpha*, beta1, beta2 for the fast-decay pair
  std::vector<double> anchors;
  double section = 0.0;  // y1 section value of the fast-decay construction
};

// min and max of two intersecting regular solutions, glued at every crossing in (0, r_max].
BarrierPair build_gs_pair(const PotentialSpec& spec, double alpha1, double alpha2, double r_max = 1e4,
                          const ShootOptions& opt = {1e-13, 1e-15, 1e-8});

// Common regular inner piece up to e^tau, fast-decay tails V(.,beta1) and V(.,beta2) outside.
BarrierPair build_fast_decay_pair(const PotentialSpec& spec, double tau,
                                  const ShootOptions& opt = {1e-13, 1e-15, 1e-8});

// Regular inner piece up to e^tau, slow-decay singular ground state outside.
BarrierProfile build_slow_decay_upper(const PotentialSpec& spec, double tau,
                                      const ShootOptions& opt = {1e-13, 1e-15, 1e-8});

// Section value y1 = R used by the fast-decay construction at tau, in the frame it returns.
struct Section {
  double value;
  double l;  // frame
  double R_bar_u, R_bar_s;
};
Section fast_decay_section(const PotentialSpec& spec, double tau,
                           const ShootOptions& opt = {1e-13, 1e-15, 1e-8});

// Empty string when the construction applies, otherwise the reason.
std::string fast_decay_regime(const PotentialSpec& spec);
std::string slow_decay_regime(const PotentialSpec& spec);

class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BarrierReport {
  double continuity = 0.0;  // largest relative mismatch at glue radii
  double residual = 0.0;    // largest relative ODE residual of the pieces
  std::size_t junctions = 0;
  double min_jump = 0.0, max_jump = 0.0;
  BarrierKind kind = BarrierKind::Smooth;
  bool label_mismatch = false;
  bool continuity_ok = false, residual_ok = false, jumps_ok = false;
  bool passed = false;
  std::string notes;
};

struct VerifyOptions {
  double continuity_tol = 1e-10;
  double residual_tol = 1e-8;
  std::size_t samples_per_piece = 400;
};

BarrierReport verify_barrier(const BarrierProfile& profile, const VerifyOptions& opt = {});

struct OrderReport {
  double max_violation = 0.0;  // largest (upper - lower) / scale, <= 0 when ordered
  double at_r = 0.0;
  bool ordered = false;
};

// upper <= lower on the given radii within tol relative to max(|upper|, |lower|).
OrderReport check_order(const BarrierProfile& upper, const BarrierProfile& lower,
                        const std::vector<double>& radii, double tol = 1e-10);

}  // namespace radheat::barriers
