#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mussel/model.hpp"
#include "mussel/pde_sim.hpp"
#include "mussel/settings.hpp"

namespace mussel {

struct HopfOptions {
  int j_max = 3;
  int n_max = 20;
};

struct TuringOptions {
  double alpha_min = 0.3;
  double alpha_max = 0.9;
  int alpha_steps = 61;
};

struct ClassifyOptions {
  double tau_eps = 0.0;
  double d_eps = 0.0;
};

struct SweepOptions {
  double tau_eps_min = -1.0, tau_eps_max = 1.0;
  int tau_eps_steps = 41;
  double d_eps_min = -0.004, d_eps_max = 0.004;
  int d_eps_steps = 41;
  int threads = 0;  // 0: hardware concurrency
};

struct SimulateOptions {
  SimConfig sim;
  InitialCondition ic;
  // Offsets from the Turing-Hopf point; when absent model.d and model.tau are used.
  std::optional<std::pair<double, double>> offset;
  int csv_stride = 1;
};

struct RunConfig {
  ModelParams model;
  bool d_given = false;    // model.d present; otherwise d0 is used where needed
  bool tau_given = false;  // model.tau present; otherwise tau0 is used where needed
  std::optional<DimensionalParams> dimensional;
  double tau_dimensional = 0.0;
  double domain_length = 0.0;
  HopfOptions hopf;
  TuringOptions turing;
  ClassifyOptions classify;
  SweepOptions sweep;
  SimulateOptions simulate;
  NumericalSettings numerics;
};

/// Built-in reference parameter set: r = 1.1, gamma = 4, alpha = 0.654, l = 6.
nlohmann::json default_config_json();

/// Applies "a.b.c" = value overrides. The value text is read as JSON when it
/// parses, otherwise as a string.
void apply_overrides(nlohmann::json& j, const std::vector<std::pair<std::string, std::string>>& kv);

/// Validates against the schema; throws ValidationError with a path-scoped message.
RunConfig parse_config(const nlohmann::json& j);

/// Resolved configuration, for embedding in outputs.
nlohmann::json to_json(const RunConfig& c);

}  // namespace mussel
