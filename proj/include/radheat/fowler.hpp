// Fowler variables y1 = U r^m, y2 = U' r^{m+1}, s = ln r and the planar system they satisfy.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "radheat/integrate.hpp"
#include "radheat/potential.hpp"

namespace radheat::fowler {

using potential::PotentialSpec;

struct FowlerParams {
  int n = 3;
  double l = 0.0;
  double m = 0.0;
  double A = 0.0;
  double C = 0.0;
  double varpi = 1.0;

  static FowlerParams make(const PotentialSpec& spec, double l);
  static FowlerParams sobolev_frame(const PotentialSpec& spec);
};

struct PhasePoint {
  double y1 = 0.0, y2 = 0.0, s = 0.0;
};

struct RadialPoint {
  double U = 0.0, Up = 0.0, r = 1.0;
};

PhasePoint to_fowler(double U, double Up, double r, const FowlerParams& p);
RadialPoint from_fowler(const PhasePoint& pt, const FowlerParams& p);
// Same solution seen in a frame with exponent m_to.
PhasePoint change_frame(const PhasePoint& pt, double m_from, double m_to);

// g(y1,s;l) = f(y1 e^{-ms}, e^s) e^{(m+2)s}, extended oddly to y1 < 0.
double g_eval(const PotentialSpec& spec, double y1, double s, const FowlerParams& p);
double dg_dy(const PotentialSpec& spec, double y1, double s, const FowlerParams& p);
// G(y1,s;l) = integral_0^{y1} g(a,s;l) da
double G_eval(const PotentialSpec& spec, double y1, double s, const FowlerParams& p);
// dG/ds at fixed y1 (centered difference, step 1e-5).
double dG_ds(const PotentialSpec& spec, double y1, double s, const FowlerParams& p);

std::array<double, 2> vector_field(const PotentialSpec& spec, const PhasePoint& pt,
                                   const FowlerParams& p);
integrate::Field make_field(const PotentialSpec& spec, const FowlerParams& p);

// Where the s-dependence of g is frozen or taken to its limit.
struct SLimit {
  enum Kind { MinusInf, PlusInf, Finite } kind = Finite;
  double tau = 0.0;
  static SLimit minus_inf() { return {MinusInf, 0.0}; }
  static SLimit plus_inf() { return {PlusInf, 0.0}; }
  static SLimit at(double tau) { return {Finite, tau}; }
};

// g with s frozen at a finite tau, or its limit as s -> -inf / +inf (frame must match l_u / l_s).
double g_frozen(const PotentialSpec& spec, double y1, const FowlerParams& p, SLimit lim);
double dg_frozen(const PotentialSpec& spec, double y1, const FowlerParams& p, SLimit lim);
double G_frozen(const PotentialSpec& spec, double y1, const FowlerParams& p, SLimit lim);

enum class Stability { UnstableNode, UnstableFocus, Center, StableFocus, StableNode };
const char* to_string(Stability s);

struct FixedPointInfo {
  double P1 = 0.0;
  double P2 = 0.0;
  Stability tag = Stability::Center;
  double discriminant = 0.0;  // A^2 - 4[dg/dy(P1) - C]
  double dg = 0.0;
  double H_at_P = 0.0;
  double b_star = 0.0;  // minimum of H(.,.,tau;l)
};

FixedPointInfo fixed_point_P(const PotentialSpec& spec, const FowlerParams& p, SLimit lim);

// Positive root of g_frozen(y) = c*y.
double solve_g_equals(const PotentialSpec& spec, const FowlerParams& p, SLimit lim, double c);

// H(y1,y2,s;l) = (n-2)/2 y1 y2 + y2^2/2 + G(y1,s;l); in the 2^* frame this is the
// transposed Pohozaev function and e^{A(l)s} H(.;l) equals it for the same solution.
double pohozaev_H(const PotentialSpec& spec, const PhasePoint& pt, const FowlerParams& p);
// Value in the 2^* frame of a point given in frame p.
double pohozaev_H_sobolev(const PotentialSpec& spec, const PhasePoint& pt, const FowlerParams& p);

enum class Topology { Empty, TwoLobes, FigureEight, SingleLoop, Unknown };
const char* to_string(Topology t);

struct LevelSet {
  double b = 0.0;
  double tau = 0.0;
  double b_star = 0.0;
  Topology topology = Topology::Unknown;
  Topology expected = Topology::Unknown;  // from the y1-interval structure of H
  std::vector<std::vector<std::array<double, 2>>> curves;
  std::vector<bool> closed;
};

LevelSet level_set_K(const PotentialSpec& spec, double b, double tau, const FowlerParams& p,
                     int resolution = 400);

}  // namespace radheat::fowler
