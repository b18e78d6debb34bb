// Nonlinearity f(u,r) for the radial semilinear heat equation.
#pragma once

#include <limits>
#include <string>
#include <vector>

namespace radheat::potential {

enum class Family { PurePower, SingleK, SumK, MinK };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

// Leading behaviour coeff * r^exponent at one end of (0, inf).
struct Asymptote {
  double coeff;
  double exponent;
  // Exponent of the first relative correction (inf when exact).
  double correction = std::numeric_limits<double>::infinity();
};

// k(r) = K0 r^delta (c0 + c1 r^a) / (d0 + d1 r^a), a > 0.
// The named forms are presets of this one closed form.
struct Coefficient {
  std::string form = "power";
  double K0 = 1.0, delta = 0.0;
  double c0 = 1.0, c1 = 0.0, d0 = 1.0, d1 = 0.0, a = 1.0;

  static Coefficient constant(double K0 = 1.0);
  static Coefficient power(double K0, double delta);
  static Coefficient affine_power(double c0, double c1, double a);
  static Coefficient rational_power(double c0, double c1, double a);
  static Coefficient ratio_power(double c0, double c1, double d0, double d1, double a);

  void validate() const;
  double value(double r) const;
  // ln k(e^s), stable for large |s|.
  double log_value_s(double s) const;
  // d ln k / d ln r at r = e^s.
  double dlog_ds(double s) const;
  Asymptote at_zero() const;
  Asymptote at_infinity() const;
};

struct PotentialSpec {
  int n = 3;
  Family family = Family::PurePower;
  std::vector<double> q;
  std::vector<Coefficient> k;

  void validate() const;
  std::size_t terms() const { return q.size(); }

  static PotentialSpec pure_power(int n, double q);
  static PotentialSpec single_k(int n, double q, Coefficient k);
  static PotentialSpec sum_k(int n, double q1, Coefficient k1, double q2, Coefficient k2);
  static PotentialSpec min_k(int n, double q1, double q2, Coefficient k);
};

double eval_f(const PotentialSpec& spec, double u, double r);
double eval_F_primitive(const PotentialSpec& spec, double u, double r);
double eval_df_du(const PotentialSpec& spec, double u, double r);

double serrin(int n);
double sobolev(int n);
double fujita_plus_one(int n);
double m_of_l(double l);
// l for which k ~ r^delta with exponent q gives an s-independent Fowler limit.
double l_of(double q, double delta);

struct CriticalExponents {
  double serrin, sobolev, fujita_plus_one;
  double sigma_low;
  double sigma_high;      // closed form, +inf for n <= 10
  double node_threshold;  // root of the node/focus defining equation above 2^*, +inf for n <= 10
  double l_u, l_s, m_u, m_s;
};

CriticalExponents critical_exponents(const PotentialSpec& spec);

// Terms of the limiting Fowler nonlinearity: g_lim(y) = sum coeff_i y^{q_i-1}.
struct LimitTerm {
  double coeff;
  double q;
};
std::vector<LimitTerm> limit_terms(const PotentialSpec& spec, bool at_infinity);

// Smallest exponent by which g approaches its limit at s -> -inf / +inf
// (inf when the limit is reached exactly).
double limit_rate(const PotentialSpec& spec, bool at_infinity);
// Half the smallest finite limit rate, 1 when both limits are exact.
double augmentation_rate(const PotentialSpec& spec);

enum class HSign { HPlus, HMinus, Boundary, Indeterminate };
enum class ASign { APlus, AMinus, Neither };
const char* to_string(HSign s);
const char* to_string(ASign s);

struct HReport {
  HSign sign;
  // integrals[i][j]: term i up to r_grid[j]
  std::vector<std::vector<double>> integrals;
  double scale;
};

HReport check_H_sign(const PotentialSpec& spec, const std::vector<double>& r_grid);
ASign check_A_sign(const PotentialSpec& spec, const std::vector<double>& s_grid,
                   const std::vector<double>& y1_grid);

std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace radheat::potential
