#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "mussel/model.hpp"
#include "mussel/spectrum.hpp"

namespace mussel {

/// Linear part of the delayed system around E*:
///   U' = Diff * Laplace U + L1 U(t) + L2 U(t - tau).
struct Linearization {
  Eigen::Matrix2d L1;
  Eigen::Matrix2d L2;
  Eigen::Matrix2d diffusion;  // diag(d, 1/gamma)
};

Linearization linearize(const ModelParams& p, const Equilibrium& eq);

/// Characteristic matrix lambda I + k2 Diff - L1 - L2 e^{-lambda tau} of the
/// mode with wavenumber squared k2, in original time.
Eigen::Matrix2cd characteristic_matrix(const Linearization& lin, double k2, cplx lambda,
                                       double tau);

/// How a solver-computed quantity relates to its closed-form expression.
struct PrintedFormMatch {
  enum class Kind { Exact, Negated, Scaled, Mismatch };
  Kind kind = Kind::Mismatch;
  cplx ratio{};  // solver / closed form
};

std::string to_string(PrintedFormMatch::Kind k);

struct EigenData {
  THPoint th;
  Eigen::Vector2cd q;          // (1, q1): mode n1, lambda = i omega0
  Eigen::RowVector2cd q_star;  // (q2, 1)
  Eigen::Vector2d p;           // (1, p1): mode n2, lambda = 0
  Eigen::RowVector2d p_star;   // (p2, 1)
  cplx M1{};
  double M2 = 0.0;

  double q_residual = 0.0;
  double q_star_residual = 0.0;
  double p_residual = 0.0;       // at (tau0, d_marginal)
  double p_star_residual = 0.0;  // at (tau0, d_marginal)
  double p_residual_at_d0 = 0.0;

  // Bilinear forms evaluated by quadrature of the delay integral.
  cplx pairing_11{};      // (psi1, phi1)
  cplx pairing_1conj{};   // (psi1, conj phi1)
  double pairing_22 = 0.0;  // (psi2, phi2)

  PrintedFormMatch q1_printed, q2_printed, p1_printed, p2_printed;

  Eigen::RowVector2cd psi1() const { return M1 * q_star; }
  Eigen::RowVector2d psi2() const { return M2 * p_star; }
};

EigenData eigen_data(const ModelParams& p, const Equilibrium& eq, const THPoint& th);

/// (psi, phi) = psi(0) phi(0) + tau0 * int_{-1}^{0} psi(xi + 1) L2 phi(xi) dxi for
/// psi(s) = row e^{-z s}, phi(theta) = col e^{z' theta} in rescaled time.
cplx delay_pairing(const Eigen::RowVector2cd& row, cplx z_row, const Eigen::Vector2cd& col,
                   cplx z_col, const Eigen::Matrix2d& L2, double tau0);

/// Arguments of the nonlinearity: m(t), a(t), m(t-1), a(t-1) in rescaled time.
enum class Arg : int { m = 0, a = 1, m_tau = 2, a_tau = 3 };

/// Second and third partial derivatives of F = tau0 (f1, f2 / gamma) at the
/// origin. Missing entries are zero; lookups are symmetric in the arguments.
class DerivTable {
 public:
  using Key = std::vector<int>;

  Eigen::Vector2d operator()(Arg i, Arg j) const;
  Eigen::Vector2d operator()(Arg i, Arg j, Arg k) const;
  void set(std::initializer_list<Arg> args, const Eigen::Vector2d& value);
  const std::map<Key, Eigen::Vector2d>& entries() const { return entries_; }

 private:
  Eigen::Vector2d lookup(Key key) const;
  std::map<Key, Eigen::Vector2d> entries_;
};

DerivTable deriv_table(const ModelParams& p, const Equilibrium& eq, double tau0);

/// Coefficient vectors of the quadratic and cubic terms. F_mnk carries the multinomial
/// factor (m+n+k)!/(m! n! k!); the y-z rows are F_{y_i(theta) z_j}.
struct AppendixVectors {
  Eigen::Vector2cd F200, F110, F101, F002, F020, F011;
  Eigen::Vector2cd F210, F102, F111, F003;
  // Index [i][s]: i = 0 for y1 (m), 1 for y2 (a); s = 0 for theta = 0, 1 for theta = -1.
  std::array<std::array<Eigen::Vector2cd, 2>, 2> Fy_z1;
  std::array<std::array<Eigen::Vector2cd, 2>, 2> Fy_z2;
};

AppendixVectors appendix_vectors(const EigenData& ed, const DerivTable& dt);

/// A centre-manifold term <h_mnk(theta) b, b'> evaluated at theta = 0 and -1.
struct HComponent {
  Eigen::Vector2cd at_zero = Eigen::Vector2cd::Zero();
  Eigen::Vector2cd at_minus_one = Eigen::Vector2cd::Zero();
  Eigen::Vector2cd resolvent_solution = Eigen::Vector2cd::Zero();  // x with bracket x = F
  Eigen::Matrix2cd bracket = Eigen::Matrix2cd::Zero();
  double solve_residual = 0.0;
  double resolvent_weight = 0.0;  // multiplies the resolvent part
  cplx resolvent_exponent{};      // resolvent part varies as e^{exponent * theta}
};

struct HComponents {
  HComponent h200_n1;    // <h200 b_n1, b_n1>
  HComponent h110_n1;    // <h110 b_n1, b_n1> (= <h110 b_n2, b_n2>)
  HComponent h101_n2n1;  // <h101 b_n2, b_n1> (= <h101 b_n1, b_n2>)
  HComponent h011_n1n2;  // <h011 b_n1, b_n2>
  HComponent h002_n1;    // <h002 b_n1, b_n1>
  HComponent h002_n2;    // <h002 b_n2, b_n2>
};

HComponents h_components(const ModelParams& p, const Equilibrium& eq, const EigenData& ed,
                         const AppendixVectors& v);

struct NFCoeffs {
  cplx f11_11{}, f11_21{};
  double f13_12 = 0.0, f13_22 = 0.0;
  cplx g11_210{}, g11_102{};
  double g13_111 = 0.0, g13_003 = 0.0;
  double g13_111_imag = 0.0, g13_003_imag = 0.0;
  double f13_12_imag = 0.0, f13_22_imag = 0.0;

  // Projected quadratic and cubic coefficients, keyed like "f11_200".
  std::map<std::string, cplx> f_terms;
  HComponents h;
  double omega_tau = 0.0;  // omega0 * tau0, the rescaled Hopf frequency
};

NFCoeffs nf_coeffs(const ModelParams& p, const Equilibrium& eq, const EigenData& ed,
                   const DerivTable& dt);

/// Planar amplitude system
///   rho' = rho (eps1 + rho^2 + b eta^2),  eta' = eta (eps2 + c rho^2 + d_hat eta^2)
/// in the time t~ = t / epsilon, with eps1, eps2 linear in (tau_eps, d_eps).
struct AmplitudeSystem {
  double eps1_tau = 0.0, eps1_d = 0.0;
  double eps2_tau = 0.0, eps2_d = 0.0;
  double b = 0.0, c = 0.0;
  double d_hat = 0.0;    // +-1
  double epsilon = 0.0;  // +-1
  double d_hat_minus_bc = 0.0;
  THPoint th;

  double eps1(double tau_eps, double d_eps) const { return eps1_tau * tau_eps + eps1_d * d_eps; }
  double eps2(double tau_eps, double d_eps) const { return eps2_tau * tau_eps + eps2_d * d_eps; }
};

AmplitudeSystem amplitude_system(const NFCoeffs& nf, const THPoint& th);

/// Everything from the TH point to the amplitude system, for set-up code and the CLI.
struct NormalFormReport {
  ModelParams params;  // with d = d0, tau = tau0
  Equilibrium eq;
  THPoint th;
  EigenData eigen;
  DerivTable derivs;
  AppendixVectors vectors;
  NFCoeffs coeffs;
  AmplitudeSystem amplitude;
};

/// p.d and p.tau are ignored.
NormalFormReport compute_normal_form(const ModelParams& p);

}  // namespace mussel
