#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mussel/normal_form.hpp"

namespace mussel {

enum class Stability { StableNode, UnstableNode, Saddle, Marginal };

std::string to_string(Stability s);

struct AmplitudePoint {
  double rho = 0.0;
  double eta = 0.0;
  Stability stability = Stability::Marginal;
  Eigen::Vector2cd eigenvalues = Eigen::Vector2cd::Zero();  // forward-time Jacobian
};

/// Equilibria of the amplitude system at one (tau_eps, d_eps). E3 and E4 come
/// in pairs related by eta -> -eta; both are listed.
struct AmplitudeEquilibria {
  double eps1 = 0.0;
  double eps2 = 0.0;
  AmplitudePoint E1;
  std::optional<AmplitudePoint> E2;
  std::optional<std::array<AmplitudePoint, 2>> E3;
  std::optional<std::array<AmplitudePoint, 2>> E4;
  bool on_boundary = false;  // some radicand vanished to within tolerance
  std::string boundary_note;
};

/// Right-hand side of the amplitude system in forward original time.
Eigen::Vector2d amplitude_field(const AmplitudeSystem& as, double eps1, double eps2,
                                const Eigen::Vector2d& state);

AmplitudeEquilibria equilibria(const AmplitudeSystem& as, double tau_eps, double d_eps,
                               const NumericalSettings& s = default_settings());

/// A line a_tau * tau_eps + a_d * d_eps = 0 through the origin.
struct BifurcationLine {
  std::string name;
  double a_tau = 0.0;
  double a_d = 0.0;
  bool vertical() const { return a_d == 0.0; }
  /// d_eps = slope * tau_eps; NaN for a vertical line.
  double slope() const;
};

struct BifurcationLines {
  BifurcationLine L1, L2, T1, T2;
};

BifurcationLines bifurcation_lines(const AmplitudeSystem& as);

enum class Region { D1, D2, D3, D4, D5, D6, L1, L2, T1, T2, Origin, Unlabelled };

std::string to_string(Region r);

/// Sign pattern (d_hat, b, c, d_hat - bc) selecting one of the 12 unfoldings.
struct UnfoldingCase {
  int d_hat = 0, b = 0, c = 0, d_hat_minus_bc = 0;
  int index = 0;      // 1..12
  std::string label;  // "Ia" for the case treated with named regions, otherwise "case k"
  bool has_named_regions = false;
};

UnfoldingCase unfolding_case(const AmplitudeSystem& as);

struct RegionResult {
  Region region = Region::Unlabelled;
  UnfoldingCase unfolding;
  AmplitudeEquilibria equilibria;
  std::string signature;  // existing equilibria with forward-time stability
};

/// Equilibrium signature, quotiented by eta -> -eta, e.g. "E1:saddle,E2:stable-node".
std::string signature(const AmplitudeEquilibria& eq);

RegionResult classify_region(const AmplitudeSystem& as, double tau_eps, double d_eps);

struct AmplitudeTrajectory {
  std::vector<double> t;
  std::vector<Eigen::Vector2d> states;
  bool diverged = false;
  double divergence_time = 0.0;
};

/// Classical RK4 in forward original time; stops when |state| > 1e6.
AmplitudeTrajectory integrate(const AmplitudeSystem& as, double tau_eps, double d_eps,
                              const Eigen::Vector2d& initial, double horizon, double dt,
                              int record_stride = 1);

}  // namespace mussel
