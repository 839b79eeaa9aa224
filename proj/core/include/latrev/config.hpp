#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latrev/analysis.hpp"
#include "latrev/classical.hpp"
#include "latrev/quantum.hpp"
#include "latrev/resonance.hpp"
#include "latrev/units.hpp"

namespace latrev::config {

struct InitialState {
  double z0 = constants::kPi / 2.0;  // well centre
  double p0 = 0.0;
  double delta_p = 0.5;
};

struct RunBlock {
  double tau_end = 20.0 * constants::kTwoPi;
  double dt = constants::kTwoPi / 1000.0;
  int snapshot_stride = 1000 / 16;
  bool with_interaction = false;
};

struct AnalysisBlock {
  std::optional<double> t_cl_hint;
  std::optional<double> t_rev_hint;
  analysis::ClassicalOptions classical;
  analysis::EnvelopeOptions envelope;
};

struct ClassicalBlock {
  std::optional<double> kappa;  // defaults to V′
  classical::ClassicalParams params;
  int periods = 500;
  int seeds_z = 5;
  int seeds_p = 4;
};

struct RunConfig {
  std::optional<PhysicalSetup> physical;
  ScaledParams scaled;
  quantum::Grid grid;
  RunBlock run;
  InitialState initial;
  AnalysisBlock analysis;
  ClassicalBlock classical;
  resonance::ContextOptions resonance;
  std::optional<std::string> lambda_grid;
  std::vector<std::string> warnings;
};

// Parses and validates. Schema problems raise Error{Validation} whose message
// starts with the JSON pointer of the offending value; physics invariants
// raise Error{Validation} naming the invariant.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Fully materialised echo, including derived scaled quantities.
nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ScaledParams& params);
nlohmann::json to_json(const PhysicalSetup& setup);

// Input form that parse_config accepts and that reproduces `config`.
nlohmann::json to_input_json(const RunConfig& config);

// 2π/dt must be an integer (to 1e-9) for stroboscopic sampling.
int steps_per_period_from_dt(double dt);

}  // namespace latrev::config
