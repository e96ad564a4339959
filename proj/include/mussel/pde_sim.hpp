#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "mussel/model.hpp"

namespace mussel {

struct SimConfig {
  int grid_points = 256;           // N intervals, N + 1 nodes on [0, l pi]
  double horizon = 3000.0;         // model time
  double snapshot_interval = 2.0;  // model time between stored snapshots
  double transient_fraction = 0.5;
  double spatial_tol = 1e-3;
  double temporal_tol = 1e-3;
  double drift_tol = 0.1;
  double dt_request = 0.0;  // 0: largest stable dt; otherwise an upper bound on dt
  bool enforce_stability_bound = true;
  bool abort_on_violation = true;
  double violation_tol = 1e-9;
  double reference_period = 0.0;  // if > 0, the window must cover 10 periods

  void validate() const;
};

/// m0(x) = m* + c0_m + c1_m cos(k_m x / l), a0 likewise; constant on [-tau, 0].
struct InitialCondition {
  double c0_m = 0.0, c1_m = 0.0, k_m = 0.0;
  double c0_a = 0.0, c1_a = 0.0, k_a = 0.0;
};

struct WellposednessReport {
  double min_m = 0.0;
  double min_a = 0.0;
  double max_a = 0.0;
  double a_bound = 0.0;  // max(sup a0, 1)
  double positivity_violation = 0.0;
  double bound_violation = 0.0;
  double first_violation_time = -1.0;
  bool ok = true;
};

struct FieldTrajectory {
  Eigen::ArrayXd x;
  std::vector<double> times;
  std::vector<Eigen::ArrayXd> m, a;
  std::vector<double> sup_deviation;  // sup_x |(m, a) - E*| at each snapshot
  double dt = 0.0;
  int steps_per_delay = 0;
  Equilibrium eq;
  double l = 0.0;
  WellposednessReport monitors;
  bool aborted = false;
  std::string abort_reason;
};

enum class Pattern {
  HomogeneousSteady,
  HomogeneousPeriodic,
  InhomogeneousSteady,
  InhomogeneousPeriodic,
  Undetermined
};

std::string to_string(Pattern p);

struct PatternClass {
  Pattern pattern = Pattern::Undetermined;
  int dominant_mode = 0;
  double oscillation_amplitude = 0.0;  // half the range of the spatial mean of m
  double spatial_measure = 0.0;        // time-averaged (max - min) of m over m*
  double temporal_measure = 0.0;       // oscillation amplitude over m*
  std::string note;
};

/// Largest time step allowed by the explicit diffusion bound.
double stability_dt(const ModelParams& p, int grid_points);

FieldTrajectory simulate(const ModelParams& p, const InitialCondition& ic, const SimConfig& cfg);

PatternClass classify_pattern(const FieldTrajectory& tr, const SimConfig& cfg);

WellposednessReport monitor_wellposedness(const FieldTrajectory& tr);

/// Rows t,x,m,a for every stored snapshot whose index is a multiple of stride.
void write_trajectory_csv(std::ostream& os, const FieldTrajectory& tr, int stride = 1);

}  // namespace mussel
