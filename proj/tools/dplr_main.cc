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

// Command-line front end: private releases, fits from releases, and the
// Monte Carlo experiment runners.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dplr/analyze_gauss.h"
#include "dplr/csv_io.h"
#include "dplr/error.h"
#include "dplr/experiment.h"
#include "dplr/json_util.h"
#include "dplr/ols_core.h"
#include "dplr/privacy_ledger.h"
#include "dplr/private_projection.h"
#include "dplr/projected_inference.h"
#include "dplr/ridge_projected.h"

namespace {

struct GlobalFlags {
  std::uint64_t seed = 1;
  double epsilon = 1.0;
  double delta = 1e-6;
  std::optional<double> bound;
  std::string label;
  std::string config;
  std::string out;
  std::string ledger;
};

struct ReportFlags {
  double alpha = 0.05;
  int coordinate = -1;
  std::string format;
};

void Emit(const GlobalFlags& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    dplr::WriteTextFile(g.out, text);
  }
}

bool WantsCsv(const GlobalFlags& g, const ReportFlags& r) {
  if (!r.format.empty()) return r.format == "csv";
  return g.out.size() >= 4 && g.out.compare(g.out.size() - 4, 4, ".csv") == 0;
}

std::vector<Eigen::Index> Coordinates(const ReportFlags& r, Eigen::Index p) {
  if (r.coordinate >= 0) return {r.coordinate};
  std::vector<Eigen::Index> all;
  for (Eigen::Index j = 0; j < p; ++j) all.push_back(j);
  return all;
}

void EmitReports(const GlobalFlags& g, const ReportFlags& r,
                 const std::vector<dplr::IntervalReport>& reports,
                 nlohmann::ordered_json extra = {}) {
  if (WantsCsv(g, r)) {
    Emit(g, dplr::ReportsToCsv(reports));
    return;
  }
  nlohmann::ordered_json doc = extra.is_null() ? nlohmann::ordered_json::object() : extra;
  doc["reports"] = nlohmann::ordered_json::array();
  for (const dplr::IntervalReport& rep : reports) doc["reports"].push_back(dplr::ReportToJson(rep));
  Emit(g, doc.dump(2) + "\n");
}

dplr::LoadedCsv LoadInput(const GlobalFlags& g, const std::string& path, bool clip) {
  dplr::CsvOptions options;
  options.label = g.label;
  options.bound = g.bound;
  options.policy = clip ? dplr::BoundPolicy::kClip : dplr::BoundPolicy::kReject;
  return dplr::LoadCsv(path, options);
}

double RequireBound(const GlobalFlags& g) {
  if (!g.bound) {
    throw dplr::Error(dplr::ErrorCode::kInvalidParameter,
                      "this command needs a declared row bound (--bound)");
  }
  return *g.bound;
}

void RecordRelease(const GlobalFlags& g, const std::string& mechanism,
                   const dplr::PrivacyBudget& budget) {
  if (g.ledger.empty()) return;
  dplr::BudgetLedger ledger = dplr::BudgetLedger::Load(g.ledger);
  ledger.Record(mechanism, budget);
  ledger.Save(g.ledger);
}

void AddReportFlags(CLI::App* cmd, ReportFlags& r) {
  cmd->add_option("--alpha", r.alpha, "Significance level")->capture_default_str();
  cmd->add_option("--coordinate", r.coordinate, "Single coordinate (default: all)");
  cmd->add_option("--format", r.format, "json or csv (default: from --out extension)")
      ->check(CLI::IsMember({"json", "csv"}));
}

nlohmann::json LoadConfig(const GlobalFlags& g) {
  if (g.config.empty()) {
    throw dplr::Error(dplr::ErrorCode::kInvalidParameter, "this command needs --config");
  }
  return dplr::ParseJson(dplr::ReadTextFile(g.config), g.config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private linear-regression inference"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--epsilon", g.epsilon, "Privacy parameter epsilon")->capture_default_str();
  app.add_option("--delta", g.delta, "Privacy parameter delta")->capture_default_str();
  app.add_option("--bound", g.bound, "Declared l2 bound B on every row");
  app.add_option("--label", g.label, "Label column name or index (default: last)");
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output path (default: stdout)");
  app.add_option("--ledger", g.ledger, "Privacy ledger file to append releases to");

  std::string input;
  std::string release_path;
  ReportFlags report_flags;

  CLI::App* project = app.add_subcommand("project", "Release a private JL sketch");
  std::int64_t r = 0;
  bool clip = false;
  std::string w_formula = "algorithm";
  std::string sketch = "explicit";
  project->add_option("--input", input, "CSV dataset")->required();
  project->add_option("--r", r, "Sketch rows")->required();
  project->add_flag("--clip", clip, "Rescale rows above the bound instead of refusing them");
  project->add_option("--w-formula", w_formula, "algorithm or compat")
      ->check(CLI::IsMember({"algorithm", "compat"}))
      ->capture_default_str();
  project->add_option("--sketch", sketch, "explicit or gram_factor")
      ->check(CLI::IsMember({"explicit", "gram_factor"}))
      ->capture_default_str();

  CLI::App* fit_ols = app.add_subcommand("fit-ols", "Non-private OLS inference on a CSV");
  bool two_sided = false;
  fit_ols->add_option("--input", input, "CSV dataset")->required();
  fit_ols->add_flag("--two-sided", two_sided, "Two-sided p-values");
  AddReportFlags(fit_ols, report_flags);

  CLI::App* fit_projected =
      app.add_subcommand("fit-projected", "Inference from an unaltered release");
  bool normal_quantiles = false;
  fit_projected->add_option("--release", release_path, "Release JSON")->required();
  fit_projected->add_flag("--normal-quantiles", normal_quantiles,
                          "Use normal instead of T quantiles");
  AddReportFlags(fit_projected, report_flags);

  CLI::App* fit_ridge = app.add_subcommand("fit-ridge", "Inference from an altered release");
  fit_ridge->add_option("--release", release_path, "Release JSON")->required();
  AddReportFlags(fit_ridge, report_flags);

  CLI::App* ag = app.add_subcommand(
      "analyze-gauss", "Release a noisy Gram (--input) or analyze one (--release)");
  double nu = 0.05;
  double eta = 0.5;
  double ci_constant = 4.0;
  double rho_constant = 1.0;
  auto* ag_input = ag->add_option("--input", input, "CSV dataset to release");
  auto* ag_release = ag->add_option("--release", release_path, "Release JSON to analyze");
  ag_input->excludes(ag_release);
  ag->add_option("--nu", nu, "Failure probability")->capture_default_str();
  ag->add_option("--eta", eta, "Spectral margin parameter in (0, 1)")->capture_default_str();
  ag->add_option("--ci-constant", ci_constant, "Interval constant")->capture_default_str();
  ag->add_option("--rho-constant", rho_constant, "Variance-bound constant")
      ->capture_default_str();
  ag->add_option("--coordinate", report_flags.coordinate, "Single coordinate (default: all)");
  ag->add_option("--format", report_flags.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment (--config)");
  CLI::App* power = app.add_subcommand(
      "power", "Rejection-rate table over a grid (--config {base, cells})");

  CLI::App* choose_r = app.add_subcommand("choose-r", "Sketch size for the projected path");
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::optional<double> sigma_min;
  double omega = 1.0;
  choose_r->add_option("--n", n, "Number of rows");
  choose_r->add_option("--p", p, "Number of features");
  choose_r->add_option("--sigma-min", sigma_min, "Smallest eigenvalue of Sigma_A");
  choose_r->add_option("--omega", omega, "Divisor of the privacy branch")->capture_default_str();
  choose_r->add_option("--input", input,
                       "Estimate sigma_min privately from this CSV instead (spends budget)");
  choose_r->add_option("--nu", nu, "Failure probability of the private estimate")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*project) {
      const dplr::PrivacyBudget budget(g.epsilon, g.delta);
      RequireBound(g);
      const dplr::LoadedCsv data = LoadInput(g, input, clip);
      dplr::ProjectOptions options;
      options.w_formula = w_formula == "compat" ? dplr::WFormula::kCompatibility
                                                : dplr::WFormula::kAlgorithm;
      options.sketch = sketch == "gram_factor" ? dplr::SketchMethod::kGramFactor
                                               : dplr::SketchMethod::kExplicit;
      const dplr::ProjectionRelease release = dplr::Project(data.dataset, budget, r, g.seed, options);
      RecordRelease(g, "jl_projection", budget);
      Emit(g, dplr::ReleaseToJson(release));
      std::cerr << "released " << (release.altered ? "altered" : "unaltered") << " sketch, r="
                << release.r << ", w=" << dplr::FormatDouble(release.w);
      if (data.dataset.clipped_rows() > 0) {
        std::cerr << ", clipped " << data.dataset.clipped_rows() << " row(s)";
      }
      std::cerr << "\n";
    } else if (*fit_ols) {
      const dplr::LoadedCsv data = LoadInput(g, input, false);
      const dplr::OlsFit fit = dplr::FitOls(data.dataset.Features(), data.dataset.Label());
      std::vector<dplr::IntervalReport> reports;
      for (Eigen::Index j : Coordinates(report_flags, fit.p)) {
        dplr::IntervalReport rep =
            fit.degenerate
                ? dplr::ConfidenceInterval(fit, j, dplr::TailMass(report_flags.alpha))
                : dplr::RejectNull(fit, j, dplr::TailMass(report_flags.alpha),
                                   two_sided ? dplr::Sidedness::kTwoSided
                                             : dplr::Sidedness::kOneSided);
        reports.push_back(rep);
      }
      EmitReports(g, report_flags, reports,
                  {{"n", fit.n}, {"p", fit.p}, {"zeta_norm2", fit.zeta_norm2},
                   {"degenerate", fit.degenerate}});
      if (fit.degenerate) return dplr::ExitCodeFor(dplr::ErrorCode::kDegenerate);
    } else if (*fit_projected) {
      const dplr::ProjectionRelease release =
          dplr::ReleaseFromJson(dplr::ReadTextFile(release_path));
      const dplr::ProjectedFit fit = dplr::FitProjected(release);
      std::vector<dplr::IntervalReport> reports;
      for (Eigen::Index j : Coordinates(report_flags, fit.p)) {
        reports.push_back(dplr::ProjectedCi(fit, j, dplr::TailMass(report_flags.alpha),
                                            normal_quantiles
                                                ? dplr::QuantileMode::kNormalShortcut
                                                : dplr::QuantileMode::kExact));
      }
      EmitReports(g, report_flags, reports,
                  {{"r", fit.r}, {"n", fit.n}, {"p", fit.p}, {"a_ratio", fit.a_ratio},
                   {"sigma_tilde2", fit.sigma_tilde2}, {"degenerate", fit.degenerate}});
      if (fit.degenerate) return dplr::ExitCodeFor(dplr::ErrorCode::kDegenerate);
    } else if (*fit_ridge) {
      const dplr::ProjectionRelease release =
          dplr::ReleaseFromJson(dplr::ReadTextFile(release_path));
      const dplr::RidgeFit fit = dplr::FitProjectedRidge(release);
      std::vector<dplr::IntervalReport> reports;
      for (Eigen::Index j : Coordinates(report_flags, fit.p)) {
        reports.push_back(dplr::RidgeCiForHatBeta(fit, j, dplr::TailMass(report_flags.alpha)));
      }
      EmitReports(g, report_flags, reports,
                  {{"r", fit.r}, {"n", fit.n}, {"p", fit.p}, {"w", fit.w},
                   {"target", "ols_estimate"}, {"degenerate", fit.degenerate}});
      if (fit.degenerate) return dplr::ExitCodeFor(dplr::ErrorCode::kDegenerate);
    } else if (*ag) {
      if (!input.empty()) {
        const dplr::PrivacyBudget budget(g.epsilon, g.delta);
        RequireBound(g);
        const dplr::LoadedCsv data = LoadInput(g, input, false);
        const dplr::AgRelease release = dplr::MakeAgRelease(data.dataset, budget, g.seed);
        RecordRelease(g, "analyze_gauss", budget);
        Emit(g, dplr::AgReleaseToJson(release));
      } else if (!release_path.empty()) {
        const double bound = RequireBound(g);
        const dplr::AgRelease release = dplr::AgReleaseFromJson(dplr::ReadTextFile(release_path));
        const dplr::AgFit fit = dplr::FitAg(release);
        const double rho2 =
            dplr::AgVarianceUpperBound(release, bound, dplr::TailMass(nu), eta, rho_constant);
        std::vector<dplr::IntervalReport> reports;
        for (Eigen::Index j : Coordinates(report_flags, release.p)) {
          reports.push_back(dplr::AgCi(release, j, bound, dplr::TailMass(nu), eta,
                                       dplr::AgCiOptions{ci_constant, rho_constant}));
        }
        EmitReports(g, report_flags, reports,
                    {{"zeta2_ag", fit.zeta2_ag}, {"zeta2_negative", fit.zeta2_negative},
                     {"rho2", rho2}, {"sigma2_mle", dplr::AgSigmaMle(release)},
                     {"ci_constant", ci_constant}, {"rho_constant", rho_constant}});
      } else {
        throw dplr::Error(dplr::ErrorCode::kInvalidParameter,
                          "analyze-gauss needs --input or --release");
      }
    } else if (*simulate) {
      const dplr::ExperimentConfig cfg = dplr::ConfigFromJson(LoadConfig(g));
      Emit(g, dplr::RunExperiment(cfg).dump(2) + "\n");
    } else if (*power) {
      const nlohmann::json doc = LoadConfig(g);
      const dplr::ExperimentConfig base =
          dplr::ConfigFromJson(dplr::RequireField(doc, "base"));
      std::vector<dplr::PowerCell> cells;
      for (const nlohmann::json& c : dplr::RequireField(doc, "cells")) {
        cells.push_back({dplr::RequireInteger(c, "n"),
                         c.contains("r") ? dplr::RequireInteger(c, "r") : base.r,
                         c.contains("epsilon") ? dplr::RequireNumber(c, "epsilon") : base.epsilon});
      }
      Emit(g, dplr::PowerTables(base, cells));
    } else if (*choose_r) {
      const dplr::PrivacyBudget budget(g.epsilon, g.delta);
      const double bound = RequireBound(g);
      nlohmann::ordered_json doc;
      double sigma = 0.0;
      if (!input.empty()) {
        const dplr::LoadedCsv data = LoadInput(g, input, false);
        dplr::Rng rng(g.seed);
        const dplr::SigmaMinEstimate est =
            dplr::PrivateSigmaMinEstimate(data.dataset, budget, dplr::TailMass(nu), rng);
        RecordRelease(g, "sigma_min_estimate", budget);
        n = data.dataset.rows();
        p = data.dataset.cols() - 1;
        sigma = est.lower_bound / static_cast<double>(n);
        doc["private_lambda"] = est.lambda;
        doc["private_lower_bound"] = est.lower_bound;
      } else if (sigma_min) {
        sigma = *sigma_min;
      } else {
        throw dplr::Error(dplr::ErrorCode::kInvalidParameter,
                          "choose-r needs --sigma-min or --input");
      }
      if (!(sigma > 0.0)) {
        throw dplr::Error(dplr::ErrorCode::kInfeasible,
                          "estimated sigma_min(Sigma_A) is not positive");
      }
      doc["n"] = n;
      doc["p"] = p;
      doc["sigma_min_sigma_a"] = sigma;
      doc["omega"] = omega;
      doc["r"] = dplr::ChooseR(n, p, bound, budget, sigma, omega);
      Emit(g, doc.dump(2) + "\n");
    }
  } catch (const dplr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dplr::ExitCodeFor(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON field: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
