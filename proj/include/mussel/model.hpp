#pragma once

#include <map>
#include <string>

#include "mussel/settings.hpp"

namespace mussel {

/// Parameters of the dimensional mussel-algae system (all strictly positive).
struct DimensionalParams {
  double e = 0.0;     // conversion constant
  double c = 0.0;     // consumption constant
  double d_M = 0.0;   // maximal mussel mortality rate
  double k_M = 0.0;   // mussel density at half-maximal mortality
  double f = 0.0;     // water exchange rate between layers
  double H = 0.0;     // height of the lower water layer
  double A_up = 0.0;  // algae concentration of the upper layer
  double D_M = 0.0;   // mussel diffusivity
  double D_A = 0.0;   // algae diffusivity
};

/// Dimensionless parameters. The spatial domain is (0, l*pi).
struct ModelParams {
  double r = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double tau = 0.0;
  double l = 0.0;

  /// Throws DomainError unless r, gamma, alpha, d, l > 0 and tau >= 0.
  void validate() const;
};

struct Nondimensionalized {
  ModelParams params;
  /// m_scale, a_scale, time_scale, length_scale, omega.
  std::map<std::string, double> scales;
};

/// Positive constant steady state E*(m*, a*).
struct Equilibrium {
  double m_star = 0.0;
  double a_star = 0.0;
};

struct HypothesisReport {
  bool h1_holds = false;
  bool h2_holds = false;
  bool h2_defined = true;  // false when r == 1 makes P0 singular
  double H0_value = 0.0;
  double P0_value = 0.0;
  std::string diagnostic;
};

/// Maps the dimensional system onto the dimensionless one. The domain
/// (0, domain_length) becomes (0, l*pi).
Nondimensionalized nondimensionalize(const DimensionalParams& dp, double tau_dimensional,
                                     double domain_length);

/// (H1): 0 < alpha < 1 < r < 1/alpha.
bool h1_holds(const ModelParams& p);

HypothesisReport hypotheses(const ModelParams& p);

/// Throws HypothesisError unless both (H1) and (H2) hold.
void require_hypotheses(const ModelParams& p);

/// m* = alpha(r-1)/(1-alpha r), a* = (1-alpha r)/(r(1-alpha)).
Equilibrium positive_equilibrium(const ModelParams& p,
                                 const NumericalSettings& s = default_settings());

/// Reaction terms of the dimensionless system; a_rate is not yet divided by gamma.
struct Reaction {
  double m_rate;
  double a_rate;
};
Reaction reaction(const ModelParams& p, double m, double a, double m_tau, double a_tau);

}  // namespace mussel
