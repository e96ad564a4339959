#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mussel/model.hpp"
#include "mussel/settings.hpp"

namespace mussel {

using cplx = std::complex<double>;

/// Coefficients of the per-mode characteristic quasi-polynomial
///   E_n(lambda) = gamma lambda^2 + T_n lambda + (B lambda + M_n) e^{-lambda tau} + D_n.
struct ModeCoeffs {
  int n = 0;
  double T = 0.0;
  double M = 0.0;
  double D = 0.0;
  double B = 0.0;
};

struct HopfBranch {
  int n = 0;
  double omega = 0.0;
  std::vector<double> taus;  // tau_n^j, j = 0..j_max
  // T_n^2 - 2 gamma D_n - B^2 > 0; checked rather than assumed.
  bool quadratic_coefficient_positive = true;
};

struct TuringThreshold {
  double d0 = 0.0;          // closed-form continuous threshold
  int n2 = 0;               // critical integer mode
  double k2_star = 0.0;     // continuous minimiser n^2/l^2 at d0
  double d_marginal = 0.0;  // root of D_n2 + M_n2 = 0 in d for the integer n2
};

/// Turing-Hopf point in the (tau, d) plane.
struct THPoint {
  double tau0 = 0.0;
  double d0 = 0.0;
  int n1 = 0;
  int n2 = 0;
  double omega0 = 0.0;
  double d_marginal = 0.0;
};

struct GammaMembership {
  bool member = false;    // D_n + M_n > 0 for every s = n^2/l^2 >= 0
  bool marginal = false;  // vertex value within tolerance of zero
  double vertex_value = 0.0;
};

struct TuringTransversality {
  double derivative = 0.0;          // d lambda / d d at lambda = 0
  double simplicity_witness = 0.0;  // T_n + B - tau M_n
};

struct SearchBox {
  double re_min = -2.0;
  double re_max = 1.0;
  double im_max = 20.0;
  int grid = 40;  // seeds per side
};

struct RootScan {
  std::vector<cplx> roots;  // closed upper half-plane, sorted by descending real part
  std::string warning;
};

ModeCoeffs mode_coeffs(const ModelParams& p, const Equilibrium& eq, int n);

template <typename Scalar>
Scalar char_value(const ModeCoeffs& mc, double gamma, const Scalar& lambda, double tau) {
  using std::exp;
  return gamma * lambda * lambda + mc.T * lambda + (mc.B * lambda + mc.M) * exp(-lambda * tau) +
         mc.D;
}

/// dE_n/dlambda.
cplx char_derivative(const ModeCoeffs& mc, double gamma, cplx lambda, double tau);

std::optional<double> hopf_frequency(const ModelParams& p, const Equilibrium& eq, int n);

/// Critical delays of mode n; throws NumericalError if the mode has no Hopf pair.
HopfBranch hopf_branch(const ModelParams& p, const Equilibrium& eq, int n, int j_max);

/// S(d, alpha, r): n^2/l^2 < S iff D_n - M_n < 0.
double spatial_scale(const ModelParams& p, const Equilibrium& eq);

/// l_n = n / sqrt(S).
double critical_length(const ModelParams& p, const Equilibrium& eq, int n);

GammaMembership gamma_membership(const ModelParams& p, const Equilibrium& eq,
                                 const NumericalSettings& s = default_settings());

/// d0(alpha, r) and the critical mode for domain length parameter l. p.d and
/// p.tau are ignored.
TuringThreshold turing_threshold(const ModelParams& p, const Equilibrium& eq, double l);

/// Re (d lambda / d tau)^{-1} at (i omega_n, tau_c). Throws NumericalError if
/// it is not positive.
double hopf_transversality(const ModelParams& p, const Equilibrium& eq, int n, double tau_c);

/// Evaluated at d = p.d (expected to be d0).
TuringTransversality turing_transversality(const ModelParams& p, const Equilibrium& eq, int n2,
                                           double tau);

/// Locates the Turing-Hopf point; p.d and p.tau are ignored.
THPoint turing_hopf_point(const ModelParams& p, const Equilibrium& eq, double l);

RootScan rightmost_roots(const ModelParams& p, const Equilibrium& eq, int n, double tau,
                         const SearchBox& box = {}, std::size_t max_roots = 64,
                         const NumericalSettings& s = default_settings());

}  // namespace mussel
