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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Criteria may be selected by number on
// the command line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dplr/analyze_gauss.h"
#include "dplr/experiment.h"
#include "dplr/matrix_kernels.h"
#include "dplr/ols_core.h"
#include "dplr/private_projection.h"
#include "dplr/projected_inference.h"
#include "dplr/rng.h"
#include "dplr/stats_kernels.h"
#include "dplr/synth_model.h"
#include "test_util.h"

namespace dplr {
namespace {

using testing::GaussianEliminationSolve;
using testing::NormalEquationsOracle;
using testing::RandomMatrix;

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string Fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, static_cast<double>(args)...);
  return buf;
}

double Metric(const nlohmann::ordered_json& report, const char* key) {
  const nlohmann::ordered_json& m = report["metrics"];
  if (!m.contains(key) || m[key].is_null()) return std::nan("");
  return m[key].get<double>();
}

Outcome OlsOracle() {
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd x = RandomMatrix(50, 5, rng);
    const Eigen::VectorXd y = RandomMatrix(50, 1, rng);
    const Eigen::VectorXd want = NormalEquationsOracle(x, y);
    worst = std::max(worst, (FitOls(x, y).beta_hat - want).norm() / want.norm());
  }
  return {worst <= 1e-8, Fmt("max relative error %.3g over 100 instances", worst)};
}

Outcome RidgeIdentity() {
  Rng rng(102);
  double worst = 0.0;
  int deficient = 0;
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd x = RandomMatrix(30, 6, rng);
    if (i % 3 == 0) {
      x.col(5) = x.col(0) - 2.0 * x.col(1);
      ++deficient;
    }
    const Eigen::VectorXd y = RandomMatrix(30, 1, rng);
    const double w = 0.1 + 3.0 * rng.Uniform();
    Eigen::MatrixXd appended(36, 6);
    appended << x, w * Eigen::MatrixXd::Identity(6, 6);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(36);
    padded.head(30) = y;
    const Eigen::VectorXd ridge = RidgeSolve(x, y, w * w).beta;
    const Eigen::VectorXd ls = LeastSquaresSolve(appended, padded).beta;
    Eigen::MatrixXd shifted = x.transpose() * x;
    shifted.diagonal().array() += w * w;
    const Eigen::VectorXd oracle = GaussianEliminationSolve(shifted, x.transpose() * y);
    worst = std::max({worst, (ridge - ls).norm() / ls.norm(),
                      (ridge - oracle).norm() / oracle.norm()});
  }
  return {worst <= 1e-8,
          Fmt("max relative error %.3g over 100 instances (%.0f rank deficient)", worst,
              deficient)};
}

Outcome AppendSpectrum() {
  Rng rng(103);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index d = 2 + i % 6;
    const Eigen::MatrixXd a = RandomMatrix(d + 3 + i % 17, d, rng);
    const double w = 5.0 * rng.Uniform();
    const double s = MinSingularValue(a);
    const double got = std::pow(MinSingularValue(AppendRegularizer(a, w)), 2);
    const double want = s * s + w * w;
    worst = std::max(worst, std::fabs(got - want) / want);
  }
  return {worst <= 1e-8, Fmt("max relative error %.3g over 100 matrices", worst)};
}

ExperimentConfig SketchRegime(Scenario scenario, std::int64_t trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  cfg.path = InferencePath::kProjected;
  cfg.model = IsotropicModel(5, 0, 1.0, 1.0);
  cfg.n = 2000;
  cfg.r = 100;
  cfg.trials = trials;
  cfg.alpha = 0.05;
  cfg.seed = seed;
  cfg.sketch = SketchMethod::kExplicit;
  return cfg;
}

Outcome PivotSandwich() {
  const nlohmann::ordered_json rep =
      RunExperiment(SketchRegime(Scenario::kPivotSandwich, 5000, 104));
  const bool inside = rep["metrics"]["within_band"].get<bool>();
  return {inside, Fmt("a=%.4f, max band violation %.4f (DKW radius %.4f), KS vs T_95 %.4f",
                      Metric(rep, "a_ratio"), Metric(rep, "max_band_violation"),
                      Metric(rep, "dkw_radius"), Metric(rep, "pivot_ks_statistic"))};
}

Outcome ProjectedCoverage() {
  const nlohmann::ordered_json rep = RunExperiment(SketchRegime(Scenario::kCoverage, 2000, 105));
  const double c = Metric(rep, "coverage");
  return {c >= 0.93, Fmt("coverage %.4f (se %.4f) over 2000 trials", c,
                         Metric(rep, "coverage_se"))};
}

Outcome WidthRatio() {
  const nlohmann::ordered_json rep =
      RunExperiment(SketchRegime(Scenario::kWidthRatio, 200, 106));
  const double ratio = Metric(rep, "ratio_to_predicted");
  return {ratio >= 0.5 && ratio <= 2.0,
          Fmt("median ratio %.4f, predicted %.4f, quotient %.4f",
              Metric(rep, "median_width_ratio"), Metric(rep, "predicted_ratio"), ratio)};
}

Outcome PowerAtRowBound() {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::kPower;
  cfg.path = InferencePath::kProjected;
  cfg.model = IsotropicModel(5, 0, 1.0, 1.0);
  cfg.n = 100000;
  cfg.alpha = 0.05;
  cfg.nu = 0.05;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-6;
  cfg.trials = 500;
  cfg.seed = 107;
  cfg.run_gate = true;
  cfg.sketch = SketchMethod::kGramFactor;
  cfg.constants.choose_r_omega = 0.0;
  cfg.r = MinRForPower(1.0, 1.0, 1.0, TailMass(0.05), TailMass(0.05), 5,
                       cfg.constants.projected_power, cfg.n);
  // Smallest budget on a doubling grid at which the sample-size r fits
  // under the privacy-feasible r.
  const double bound = std::sqrt(AnalyticRowBoundSquared(cfg.model, cfg.n));
  std::int64_t r_private = 0;
  for (double eps : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    cfg.epsilon = eps;
    r_private = ChooseR(cfg.n, 5, bound, PrivacyBudget(eps, cfg.delta),
                        SigmaAMinBound(cfg.model), GateConsistentOmega(cfg.delta));
    if (r_private >= cfg.r) break;
  }
  const nlohmann::ordered_json rep = RunExperiment(cfg);
  const double power = Metric(rep, "rejection_rate");
  const double gate = Metric(rep, "gate_pass_rate_at_choose_r");
  return {power >= 0.90 && gate >= 0.95,
          Fmt("eps=%.0f, r=%.0f (private r %.0f): rejection %.4f, gate pass at the private "
              "r %.4f, release altered %.4f",
              cfg.epsilon, static_cast<double>(cfg.r), static_cast<double>(r_private), power,
              gate, Metric(rep, "altered_rate"))};
}

Outcome PtrBehavior() {
  const PrivacyBudget budget(1.0, 1e-6);
  const double b = 1.0;
  const Eigen::Index r = 100;
  const double w = NoiseMagnitudeW(b, budget, r);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(50, 4);
  // Stacked copies of a scaled identity: rows within B, sigma_min = 10 w.
  const auto copies = static_cast<Eigen::Index>(std::ceil(100.0 * w * w / (b * b)));
  const double entry = 10.0 * w / std::sqrt(static_cast<double>(copies));
  const Eigen::MatrixXd scaled =
      Eigen::MatrixXd::Identity(4, 4).replicate(copies, 1) * entry;
  const BoundedDataset bounded(scaled, b, 3);
  const double smin = MinSingularValue(scaled);
  int zero_altered = 0, scaled_unaltered = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng = Rng::ForTrial(108, t);
    zero_altered += !PtrGate(zero, b, budget, w, rng).passed;
    scaled_unaltered += PtrGate(bounded, budget, w, rng).passed;
  }
  Rng rng(109);
  const int draws = 400000;
  double s2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double z = PtrGateFromSigmaMinSq(1.0, b, budget, w, rng).laplace_noise;
    s2 += z * z;
  }
  const double want = 2.0 * std::pow(4.0 * b * b / budget.epsilon(), 2);
  const double rel = std::fabs(s2 / draws - want) / want;
  return {zero_altered >= 990 && scaled_unaltered >= 990 && rel <= 0.02 &&
              std::fabs(smin / w - 10.0) < 1e-9,
          Fmt("zero altered %.0f/1000, unaltered at sigma_min/w = %.3f: %.0f/1000, noise "
              "variance %.4f vs %.4f (rel %.4f)",
              zero_altered, smin / w, scaled_unaltered, s2 / draws, want, rel)};
}

// Fixed data, fresh projection per trial. The interval and pivot are
// checked against the OLS estimate as stated, and the same statistics are
// reported for the ridge solution (X^T X + w^2 I)^{-1} X^T y.
Outcome RidgePath() {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::kCoverage;
  cfg.path = InferencePath::kRidge;
  cfg.model = IsotropicModel(5, 0, 1.0, 1.0);
  cfg.n = 20000;
  cfg.r = 200;
  cfg.trials = 2000;
  cfg.alpha = 0.05;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-6;
  cfg.seed = 110;
  cfg.fix_data = true;
  cfg.sketch = SketchMethod::kGramFactor;
  const nlohmann::ordered_json rep = RunExperiment(cfg);
  const double cover = Metric(rep, "coverage");
  const double ks = Metric(rep, "pivot_ks_statistic");
  const double crit = Metric(rep, "pivot_ks_critical_1e-3");
  const double z = Metric(rep, "center_z");
  const bool pass = cover >= 0.93 && ks <= crit && std::fabs(z) <= 3.0;
  std::string detail = Fmt(
      "vs OLS estimate: coverage %.4f, KS %.4f (crit %.4f), mean z %.2f; vs ridge solution: "
      "coverage %.4f, KS %.4f, mean z %.2f",
      cover, ks, crit, z, Metric(rep, "coverage_of_ridge_solution"),
      Metric(rep, "ridge_solution_pivot_ks_statistic"),
      Metric(rep, "center_z_vs_ridge_solution"));
  detail += Fmt("; center mean %.5f, OLS estimate %.5f, ridge solution %.5f",
                Metric(rep, "center_mean"), Metric(rep, "target_mean"),
                Metric(rep, "ridge_solution_mean"));
  return {pass, detail};
}

Outcome SignRecovery() {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::kRidgeSign;
  cfg.path = InferencePath::kRidge;
  cfg.model = IsotropicModel(5, 0, 1.0, 1.0);
  cfg.n = 20000;
  cfg.r = 0;
  cfg.eta = 0.1;
  cfg.trials = 2000;
  cfg.alpha = 0.05;
  cfg.nu = 0.05;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-6;
  cfg.seed = 111;
  cfg.sketch = SketchMethod::kGramFactor;
  const nlohmann::ordered_json rep = RunExperiment(cfg);
  const bool condition = rep["metrics"]["sign_condition"]["satisfied"].get<bool>();
  const double rate = Metric(rep, "sign_rate");
  const double threshold = 1.0 - cfg.nu - cfg.alpha - 0.02;
  return {condition && rate >= threshold,
          Fmt("r=%.0f, ", rep["config"]["r"].get<double>()) + "sign condition " +
              (condition ? "met" : "not met") +
              Fmt(", sign rate %.4f (threshold %.2f)", rate, threshold)};
}

Outcome AnalyzeGauss() {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::kAgCoverage;
  cfg.path = InferencePath::kAnalyzeGauss;
  cfg.model = IsotropicModel(5, 0, 1.0, 1.0);
  cfg.n = 5000;
  cfg.trials = 1000;
  cfg.nu = 0.05;
  cfg.eta = 0.5;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-6;
  cfg.seed = 112;
  const nlohmann::ordered_json rep = RunExperiment(cfg);
  const double rho = Metric(rep, "rho_upper_rate");
  const double cover = Metric(rep, "coverage");

  Rng rng(113);
  const SyntheticData d = GenerateDataset(cfg.model, cfg.n, rng);
  const BoundedDataset ds(d.Joined(), EmpiricalRowBound(d.x, d.y), 5);
  AgOptions options;
  options.delta_override = 0.0;
  const AgRelease rel = MakeAgRelease(ds, PrivacyBudget(1.0, 1e-6), 1, options);
  const AgFit fit = FitAg(rel);
  const OlsFit ols = FitOls(d.x, d.y);
  const double scale = d.y.squaredNorm();
  double worst = (fit.beta_ag - ols.beta_hat).norm();
  worst = std::max(worst, std::fabs(fit.zeta2_ag - ols.zeta_norm2) / scale);
  worst = std::max(worst, std::fabs(AgSigmaMle(rel) - ols.zeta_norm2 / (cfg.n - 5.0)));
  worst = std::max(worst, (fit.xtx_inverse.diagonal() - ols.xtx_inverse_diag).norm());
  const double root = std::sqrt(cfg.n - 5.0) - 2.0 * std::sqrt(std::log(16.0 / cfg.nu));
  const double rho2 = AgVarianceUpperBound(rel, ds.row_bound(), TailMass(cfg.nu), cfg.eta);
  worst = std::max(worst, std::fabs(rho2 - ols.zeta_norm2 / (root * root)));
  const IntervalReport ci = AgCi(rel, 0, ds.row_bound(), TailMass(cfg.nu), cfg.eta);
  worst = std::max(worst, std::fabs(ci.center - ols.beta_hat(0)));
  worst = std::max(worst, std::fabs(ci.half_width -
                                    4.0 * std::sqrt(rho2 * ols.xtx_inverse_diag(0) *
                                                    std::log(1.0 / cfg.nu))));
  return {rho >= 0.95 && cover >= 0.92 && worst <= 1e-8,
          Fmt("rho^2 >= sigma^2 in %.4f, coverage %.4f, sigma MLE mean %.4f, zero-noise "
              "reduction error %.3g",
              rho, cover, Metric(rep, "sigma_mle_mean"), worst)};
}

Outcome DistributionKernels() {
  double worst_round = 0.0;
  for (std::int64_t k : {1, 2, 3, 5, 10, 30, 100, 1000, 1000000}) {
    for (double q : {1e-6, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999,
                     1.0 - 1e-6}) {
      const double x = StudentTQuantile(TailMass(q), Dof(k));
      worst_round = std::max(worst_round, std::fabs(StudentTCdf(x, Dof(k)) - q));
    }
  }
  double worst_normal = 0.0;
  for (double q : {1e-4, 0.01, 0.05, 0.2, 0.5, 0.8, 0.95, 0.99, 1.0 - 1e-4}) {
    worst_normal = std::max(worst_normal, std::fabs(StudentTQuantile(TailMass(q), Dof(1000000)) -
                                                    NormalQuantile(TailMass(q))));
  }
  Rng rng(114);
  const Interval iv = Chi2TailInterval(Dof(50), TailMass(0.01));
  int inside = 0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    double s = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double z = rng.Normal();
      s += z * z;
    }
    inside += iv.lo <= s && s <= iv.hi;
  }
  const double contain = static_cast<double>(inside) / draws;
  return {worst_round <= 1e-8 && worst_normal <= 1e-3 && contain >= 0.99,
          Fmt("round-trip error %.3g, T_1e6 vs normal %.3g, chi^2 containment %.5f",
              worst_round, worst_normal, contain)};
}

}  // namespace
}  // namespace dplr

int main(int argc, char** argv) {
  using dplr::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"OLS oracle equivalence", dplr::OlsOracle},
      {"ridge identity", dplr::RidgeIdentity},
      {"appending spectrum", dplr::AppendSpectrum},
      {"pivot sandwich", dplr::PivotSandwich},
      {"projected CI coverage", dplr::ProjectedCoverage},
      {"width ratio", dplr::WidthRatio},
      {"power at the row bound", dplr::PowerAtRowBound},
      {"PTR behavior", dplr::PtrBehavior},
      {"ridge path", dplr::RidgePath},
      {"sign recovery", dplr::SignRecovery},
      {"analyze gauss", dplr::AnalyzeGauss},
      {"distribution kernels", dplr::DistributionKernels},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id,
                criteria[k].first, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
