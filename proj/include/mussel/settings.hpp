#pragma once

namespace mussel {

/// Numerical tolerances shared by the analysis modules.
struct NumericalSettings {
  double residual_tol = 1e-10;  // accepted |E_n(lambda)| for a root
  double dedupe_tol = 1e-7;     // two roots closer than this are one root
  double golden_tol = 1e-6;     // agreement with reported reference values
  double degeneracy_tol = 1e-10;  // |1 - alpha r| below this is rejected
  double marginal_tol = 1e-9;     // quadratic vertex within this of 0 is marginal
  double boundary_tol = 1e-12;    // angular distance that counts as "on a line"
  double radicand_tol = 1e-14;    // equilibria radicands this close to 0 sit on a boundary
};

inline const NumericalSettings& default_settings() {
  static const NumericalSettings s{};
  return s;
}

}  // namespace mussel
