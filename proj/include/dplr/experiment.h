// Copyright 2026 The dplr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded Monte Carlo replications of the inference paths against a known
// model. Reports are JSON documents that embed the resolved configuration
// and are byte-identical for identical configurations.

#ifndef DPLR_EXPERIMENT_H_
#define DPLR_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dplr/interval_report.h"
#include "dplr/ols_core.h"
#include "dplr/private_projection.h"
#include "dplr/synth_model.h"

#include "json.hpp"

namespace dplr {

enum class Scenario {
  kCoverage,       // interval coverage of the path's target
  kPower,          // rejection rate of beta_j = 0
  kPivotSandwich,  // projected pivot CDF against the sandwich band
  kWidthRatio,     // projected / OLS interval width
  kAgCoverage,     // analyze-gauss variance bound and interval coverage
  kRidgeSign,      // sign agreement of beta'_j with beta_j
};

std::string_view ScenarioName(Scenario scenario);
Scenario ParseScenario(std::string_view name);

struct ExperimentConstants {
  PowerConstants ols_power;        // sample-size bound for OLS
  PowerConstants projected_power;  // row bound for the projected test
  double ag_ci = 4.0;
  double ag_rho = 1.0;
  double interval_condition = 64.0;
  double sign_condition = 1.0;
  double gate_c = 2.0;
  // omega of ChooseR; 0 selects GateConsistentOmega(delta, gate_c).
  double choose_r_omega = 1.0;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kCoverage;
  ModelParams model;
  std::int64_t n = 1000;
  // Sketch rows; 0 derives r from the model (ChooseR for the projected
  // path, SelectRRidge for the ridge path).
  std::int64_t r = 0;
  std::int64_t trials = 100;
  double alpha = 0.05;
  double nu = 0.05;
  double epsilon = 1.0;
  double delta = 1e-6;
  std::uint64_t seed = 1;
  InferencePath path = InferencePath::kOls;
  Eigen::Index j = 0;
  double eta = 0.5;
  ExperimentConstants constants;
  // Draws the dataset once and re-randomizes only the mechanism.
  bool fix_data = false;
  // Runs the private gate before projecting; otherwise the projected path
  // analyzes an unaltered sketch directly and the ridge path always
  // appends w I.
  bool run_gate = false;
  SketchMethod sketch = SketchMethod::kExplicit;
  int threads = 0;  // 0 selects the hardware concurrency
};

// Missing fields keep their defaults; "model" is required. The default
// path depends on the scenario.
ExperimentConfig ConfigFromJson(const nlohmann::json& doc);
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& config);

// Errors raised inside a trial are rethrown with the trial index.
nlohmann::ordered_json RunExperiment(const ExperimentConfig& config);

struct PowerCell {
  std::int64_t n = 0;
  std::int64_t r = 0;
  double epsilon = 1.0;
};

// One CSV row per cell: the empirical rejection rate of the base config's
// power scenario, plus the analytic OLS sample-size and projected row
// bounds.
std::string PowerTables(const ExperimentConfig& base,
                        const std::vector<PowerCell>& cells);

}  // namespace dplr

#endif  // DPLR_EXPERIMENT_H_
