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

#include "dplr/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "dplr/analyze_gauss.h"
#include "dplr/error.h"
#include "dplr/json_util.h"
#include "dplr/matrix_kernels.h"
#include "dplr/projected_inference.h"
#include "dplr/ridge_projected.h"
#include "dplr/stats_kernels.h"

namespace dplr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, count) on `threads` workers. Each index writes
// only its own slot, so results do not depend on scheduling. The error of
// the lowest failing index is rethrown.
template <typename Fn>
void ParallelFor(std::int64_t count, int threads, Fn&& fn) {
  const int workers = threads > 0
                          ? threads
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::int64_t> next{0};
  std::mutex mu;
  std::int64_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::int64_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1 || count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<std::int64_t>(workers, count); ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (!failure) return;
  try {
    std::rethrow_exception(failure);
  } catch (const Error& e) {
    throw Error(e.code(), "trial " + std::to_string(failed_index) + ": " + e.what());
  }
}

struct Trial {
  std::optional<IntervalReport> report;
  double target = kNaN;
  double pivot = kNaN;
  double ridge_target = kNaN;
  double ridge_pivot = kNaN;
  bool altered = false;
  std::optional<bool> gate_at_choose_r;
  double rho2 = kNaN;
  double sigma_mle = kNaN;
  bool zeta2_negative = false;
  double ols_half_width = kNaN;
  std::optional<bool> sign_correct;
};

struct RateStat {
  double rate = kNaN;
  double se = kNaN;
  std::int64_t count = 0;
};

RateStat Rate(const std::vector<bool>& hits) {
  RateStat s;
  s.count = static_cast<std::int64_t>(hits.size());
  if (hits.empty()) return s;
  const double m = static_cast<double>(hits.size());
  s.rate = static_cast<double>(std::count(hits.begin(), hits.end(), true)) / m;
  s.se = std::sqrt(s.rate * (1.0 - s.rate) / m);
  return s;
}

nlohmann::ordered_json Num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double Median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double SmallestEigenvalue(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrize(s), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

class Runner {
 public:
  explicit Runner(const ExperimentConfig& config)
      : cfg_(config), budget_(config.epsilon, config.delta) {
    ValidateModel(cfg_.model);
    p_ = cfg_.model.p();
    if (cfg_.j < 0 || cfg_.j >= p_) {
      throw Error(ErrorCode::kInvalidParameter, "coordinate j out of range");
    }
    if (cfg_.trials < 1) throw Error(ErrorCode::kInvalidParameter, "trials must be >= 1");
    if (cfg_.n <= p_) throw Error(ErrorCode::kInvalidParameter, "need n > p");
    sigma_a_min_ = SigmaAMinBound(cfg_.model);
    ResolveR();
    if (cfg_.fix_data) {
      Rng rng(cfg_.seed, 0);
      fixed_ = GenerateDataset(cfg_.model, cfg_.n, rng);
      fixed_ols_ = FitOls(fixed_->x, fixed_->y);
    }
  }

  const ExperimentConfig& config() const { return cfg_; }

  std::vector<Trial> RunAll() {
    std::vector<Trial> trials(static_cast<std::size_t>(cfg_.trials));
    ParallelFor(cfg_.trials, cfg_.threads, [&](std::int64_t t) {
      trials[static_cast<std::size_t>(t)] = RunOne(t);
    });
    return trials;
  }

  double GateOmega() const {
    return cfg_.constants.choose_r_omega > 0.0
               ? cfg_.constants.choose_r_omega
               : GateConsistentOmega(cfg_.delta, cfg_.constants.gate_c);
  }

  double sigma_a_min() const { return sigma_a_min_; }

 private:
  bool UsesSketch() const {
    return cfg_.path == InferencePath::kProjected || cfg_.path == InferencePath::kRidge;
  }

  void ResolveR() {
    if (!UsesSketch()) return;
    if (cfg_.r == 0) {
      const double b = std::sqrt(AnalyticRowBoundSquared(cfg_.model, cfg_.n));
      if (cfg_.path == InferencePath::kProjected) {
        cfg_.r = ChooseR(cfg_.n, p_, b, budget_, sigma_a_min_, GateOmega());
      } else {
        const RidgeModelHint hint{cfg_.model.beta.squaredNorm(), cfg_.model.beta(cfg_.j),
                                  cfg_.model.sigma2};
        cfg_.r = SelectRRidge(cfg_.n, p_, cfg_.eta, b, budget_,
                              SmallestEigenvalue(cfg_.model.sigma), hint,
                              cfg_.constants.sign_condition);
      }
    }
    if (cfg_.r <= p_) {
      throw Error(ErrorCode::kInsufficientRows, "sketch paths need r > p");
    }
  }

  Trial RunOne(std::int64_t t) {
    Rng rng = Rng::ForTrial(cfg_.seed, static_cast<std::uint64_t>(t));
    std::optional<SyntheticData> local;
    if (!fixed_) local = GenerateDataset(cfg_.model, cfg_.n, rng);
    const SyntheticData& data = fixed_ ? *fixed_ : *local;
    switch (cfg_.path) {
      case InferencePath::kOls:
        return RunOls(data);
      case InferencePath::kProjected:
        return RunProjected(data, rng);
      case InferencePath::kRidge:
        return RunRidge(data, rng);
      case InferencePath::kAnalyzeGauss:
        return RunAnalyzeGauss(data, rng);
    }
    return {};
  }

  Trial RunOls(const SyntheticData& data) {
    const OlsFit fit = FitOls(data.x, data.y);
    Trial trial;
    trial.report = ConfidenceInterval(fit, cfg_.j, TailMass(cfg_.alpha));
    trial.target = cfg_.model.beta(cfg_.j);
    if (!fit.degenerate) trial.pivot = TValue(fit, cfg_.j, trial.target);
    return trial;
  }

  Trial RunProjected(const SyntheticData& data, Rng& rng) {
    const Eigen::MatrixXd a = data.Joined();
    Trial trial;
    Eigen::MatrixXd sketch;
    if (cfg_.run_gate) {
      const double b = EmpiricalRowBound(data.x, data.y);
      const BoundedDataset dataset(a, b, p_);
      ProjectOptions options;
      options.sketch = cfg_.sketch;
      const ProjectionRelease release = Project(dataset, budget_, cfg_.r, rng(), options);
      if (cfg_.scenario == Scenario::kPower) {
        const std::int64_t r_cor =
            ChooseR(cfg_.n, p_, b, budget_, sigma_a_min_, GateOmega());
        const double w = NoiseMagnitudeW(b, budget_, r_cor);
        trial.gate_at_choose_r =
            PtrGateFromSigmaMinSq(release.gate.sigma_min_sq, b, budget_, w, rng).passed;
      }
      trial.altered = release.altered;
      if (release.altered) return trial;
      sketch = release.sketch;
    } else {
      sketch = JlSketch(a, cfg_.r, rng, cfg_.sketch);
    }
    const ProjectedFit fit = FitProjectedSketch(sketch.leftCols(p_), sketch.col(p_), cfg_.n);
    trial.report = ProjectedCi(fit, cfg_.j, TailMass(cfg_.alpha));
    trial.target = cfg_.model.beta(cfg_.j);
    if (!fit.degenerate) trial.pivot = ProjectedTValue(fit, cfg_.j, trial.target);
    if (cfg_.scenario == Scenario::kWidthRatio) {
      trial.ols_half_width =
          ConfidenceInterval(FitOls(data.x, data.y), cfg_.j, TailMass(cfg_.alpha)).half_width;
    }
    return trial;
  }

  Trial RunRidge(const SyntheticData& data, Rng& rng) {
    const Eigen::MatrixXd a = data.Joined();
    const double b = EmpiricalRowBound(data.x, data.y);
    const BoundedDataset dataset(a, b, p_);
    ProjectOptions options;
    options.sketch = cfg_.sketch;
    if (!cfg_.run_gate) options.force_altered = true;
    const ProjectionRelease release = Project(dataset, budget_, cfg_.r, rng(), options);
    Trial trial;
    trial.altered = release.altered;
    if (!release.altered) return trial;
    const RidgeFit fit = FitProjectedRidgeSketch(release.sketch.leftCols(p_),
                                                 release.sketch.col(p_), release.w, cfg_.n);
    const double beta_j = cfg_.model.beta(cfg_.j);
    if (beta_j != 0.0) {
      trial.sign_correct = (fit.beta_prime(cfg_.j) > 0.0) == (beta_j > 0.0) &&
                           fit.beta_prime(cfg_.j) != 0.0;
    }
    const TailMass alpha(cfg_.alpha);
    if (fixed_ols_) {
      trial.target = fixed_ols_->beta_hat(cfg_.j);
      trial.report = RidgeCiForHatBeta(fit, cfg_.j, alpha);
      if (!fit.degenerate) trial.pivot = RidgePivot(fit, cfg_.j, trial.target);
      trial.ridge_target =
          RidgeSolve(fixed_->x, fixed_->y, release.w * release.w).beta(cfg_.j);
      if (!fit.degenerate) trial.ridge_pivot = RidgePivot(fit, cfg_.j, trial.ridge_target);
    } else {
      const OlsFit ols = FitOls(data.x, data.y);
      trial.target = beta_j;
      trial.report = CombinedCiForBeta(
          fit, OlsSide{ols.zeta_norm2, ols.xtx_inverse_diag(cfg_.j), ols.dof}, cfg_.j, alpha);
    }
    return trial;
  }

  Trial RunAnalyzeGauss(const SyntheticData& data, Rng& rng) {
    const double b = EmpiricalRowBound(data.x, data.y);
    const BoundedDataset dataset(data.Joined(), b, p_);
    const AgRelease release = MakeAgRelease(dataset, budget_, rng());
    const TailMass nu(cfg_.nu);
    Trial trial;
    trial.zeta2_negative = FitAg(release).zeta2_negative;
    trial.rho2 = AgVarianceUpperBound(release, b, nu, cfg_.eta, cfg_.constants.ag_rho);
    trial.sigma_mle = AgSigmaMle(release);
    trial.report = AgCi(release, cfg_.j, b, nu, cfg_.eta,
                        AgCiOptions{cfg_.constants.ag_ci, cfg_.constants.ag_rho});
    trial.target = cfg_.model.beta(cfg_.j);
    return trial;
  }

  ExperimentConfig cfg_;
  PrivacyBudget budget_;
  Eigen::Index p_ = 0;
  double sigma_a_min_ = 0.0;
  std::optional<SyntheticData> fixed_;
  std::optional<OlsFit> fixed_ols_;
};

InferencePath DefaultPath(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCoverage:
      return InferencePath::kOls;
    case Scenario::kPower:
    case Scenario::kPivotSandwich:
    case Scenario::kWidthRatio:
      return InferencePath::kProjected;
    case Scenario::kAgCoverage:
      return InferencePath::kAnalyzeGauss;
    case Scenario::kRidgeSign:
      return InferencePath::kRidge;
  }
  return InferencePath::kOls;
}

void CheckScenarioPath(const ExperimentConfig& cfg) {
  bool ok = true;
  switch (cfg.scenario) {
    case Scenario::kCoverage:
      break;
    case Scenario::kPower:
      ok = cfg.path == InferencePath::kOls || cfg.path == InferencePath::kProjected;
      break;
    case Scenario::kPivotSandwich:
    case Scenario::kWidthRatio:
      ok = cfg.path == InferencePath::kProjected;
      break;
    case Scenario::kAgCoverage:
      ok = cfg.path == InferencePath::kAnalyzeGauss;
      break;
    case Scenario::kRidgeSign:
      ok = cfg.path == InferencePath::kRidge;
      break;
  }
  if (!ok) {
    throw Error(ErrorCode::kInvalidParameter,
                "scenario " + std::string(ScenarioName(cfg.scenario)) +
                    " does not support path " + std::string(PathName(cfg.path)));
  }
}

std::optional<Dof> ReferenceDof(const ExperimentConfig& cfg) {
  switch (cfg.path) {
    case InferencePath::kOls:
      return Dof(cfg.n - cfg.model.p());
    case InferencePath::kProjected:
      return Dof(cfg.r - cfg.model.p());
    case InferencePath::kRidge:
      if (cfg.fix_data) return Dof(cfg.r - cfg.model.p());
      return std::nullopt;
    case InferencePath::kAnalyzeGauss:
      return std::nullopt;
  }
  return std::nullopt;
}

void AddRate(nlohmann::ordered_json& m, const std::string& name, const RateStat& s) {
  m[name] = Num(s.rate);
  m[name + "_se"] = Num(s.se);
}

void AddKs(nlohmann::ordered_json& m, const std::vector<double>& pivots, Dof k,
           const std::string& prefix = "pivot") {
  if (pivots.empty()) return;
  const double ks = KolmogorovSmirnovStatistic(
      pivots, [k](double x) { return StudentTCdf(x, k); });
  const double crit = KolmogorovSmirnovCritical(pivots.size(), 1e-3);
  m[prefix + "_reference_dof"] = k.value();
  m[prefix + "_ks_statistic"] = ks;
  m[prefix + "_ks_critical_1e-3"] = crit;
  m[prefix + "_ks_pass"] = ks <= crit;
}

}  // namespace

std::string_view ScenarioName(Scenario scenario) {
  switch (scenario) {
    case Scenario::kCoverage:
      return "coverage";
    case Scenario::kPower:
      return "power";
    case Scenario::kPivotSandwich:
      return "pivot_sandwich";
    case Scenario::kWidthRatio:
      return "width_ratio";
    case Scenario::kAgCoverage:
      return "ag_coverage";
    case Scenario::kRidgeSign:
      return "ridge_sign";
  }
  return "unknown";
}

Scenario ParseScenario(std::string_view name) {
  for (Scenario s : {Scenario::kCoverage, Scenario::kPower, Scenario::kPivotSandwich,
                     Scenario::kWidthRatio, Scenario::kAgCoverage, Scenario::kRidgeSign}) {
    if (ScenarioName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidParameter,
              "unknown scenario \"" + std::string(name) + "\"");
}

ExperimentConfig ConfigFromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidInput, "config must be an object");
  ExperimentConfig cfg;
  if (doc.contains("scenario")) {
    cfg.scenario = ParseScenario(doc.at("scenario").get<std::string>());
  }
  const nlohmann::json& model = RequireField(doc, "model");
  if (model.contains("isotropic")) {
    const nlohmann::json& iso = model.at("isotropic");
    cfg.model = IsotropicModel(RequireInteger(iso, "p"), RequireInteger(iso, "j"),
                               RequireNumber(iso, "beta_j"), RequireNumber(iso, "sigma2"));
  } else {
    cfg.model = ModelFromJson(model);
  }
  auto get_int = [&](const char* key, auto& out) {
    if (doc.contains(key)) out = static_cast<std::remove_reference_t<decltype(out)>>(RequireInteger(doc, key));
  };
  auto get_num = [&](const nlohmann::json& d, const char* key, double& out) {
    if (d.contains(key)) out = RequireNumber(d, key);
  };
  auto get_bool = [&](const char* key, bool& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_boolean()) {
      throw Error(ErrorCode::kInvalidInput, std::string("field \"") + key + "\" must be boolean");
    }
    out = doc.at(key).get<bool>();
  };
  get_int("n", cfg.n);
  get_int("r", cfg.r);
  get_int("trials", cfg.trials);
  get_int("seed", cfg.seed);
  get_int("j", cfg.j);
  get_int("threads", cfg.threads);
  get_num(doc, "alpha", cfg.alpha);
  get_num(doc, "nu", cfg.nu);
  get_num(doc, "epsilon", cfg.epsilon);
  get_num(doc, "delta", cfg.delta);
  get_num(doc, "eta", cfg.eta);
  get_bool("fix_data", cfg.fix_data);
  get_bool("run_gate", cfg.run_gate);
  cfg.path = doc.contains("path") ? ParsePath(doc.at("path").get<std::string>())
                                  : DefaultPath(cfg.scenario);
  if (doc.contains("sketch")) {
    const std::string s = doc.at("sketch").get<std::string>();
    if (s == "explicit") {
      cfg.sketch = SketchMethod::kExplicit;
    } else if (s == "gram_factor") {
      cfg.sketch = SketchMethod::kGramFactor;
    } else {
      throw Error(ErrorCode::kInvalidParameter, "unknown sketch method \"" + s + "\"");
    }
  }
  if (doc.contains("constants")) {
    const nlohmann::json& c = doc.at("constants");
    ExperimentConstants& k = cfg.constants;
    get_num(c, "ols_c1", k.ols_power.c1);
    get_num(c, "ols_c2", k.ols_power.c2);
    get_num(c, "projected_c1", k.projected_power.c1);
    get_num(c, "projected_c2", k.projected_power.c2);
    get_num(c, "ag_ci", k.ag_ci);
    get_num(c, "ag_rho", k.ag_rho);
    get_num(c, "interval_condition", k.interval_condition);
    get_num(c, "sign_condition", k.sign_condition);
    get_num(c, "gate_c", k.gate_c);
    get_num(c, "choose_r_omega", k.choose_r_omega);
  }
  static_cast<void>(TailMass(cfg.alpha));
  static_cast<void>(TailMass(cfg.nu));
  return cfg;
}

nlohmann::ordered_json ConfigToJson(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = ScenarioName(cfg.scenario);
  j["path"] = PathName(cfg.path);
  j["model"] = ModelToJson(cfg.model);
  j["n"] = cfg.n;
  j["r"] = cfg.r;
  j["trials"] = cfg.trials;
  j["alpha"] = cfg.alpha;
  j["nu"] = cfg.nu;
  j["epsilon"] = cfg.epsilon;
  j["delta"] = cfg.delta;
  j["seed"] = cfg.seed;
  j["j"] = cfg.j;
  j["eta"] = cfg.eta;
  j["fix_data"] = cfg.fix_data;
  j["run_gate"] = cfg.run_gate;
  j["sketch"] = cfg.sketch == SketchMethod::kExplicit ? "explicit" : "gram_factor";
  j["threads"] = cfg.threads;
  const ExperimentConstants& k = cfg.constants;
  j["constants"] = {{"ols_c1", k.ols_power.c1},
                    {"ols_c2", k.ols_power.c2},
                    {"projected_c1", k.projected_power.c1},
                    {"projected_c2", k.projected_power.c2},
                    {"ag_ci", k.ag_ci},
                    {"ag_rho", k.ag_rho},
                    {"interval_condition", k.interval_condition},
                    {"sign_condition", k.sign_condition},
                    {"gate_c", k.gate_c},
                    {"choose_r_omega", k.choose_r_omega}};
  return j;
}

nlohmann::ordered_json RunExperiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  CheckScenarioPath(cfg);
  Runner runner(cfg);
  cfg = runner.config();
  const std::vector<Trial> trials = runner.RunAll();
  const Eigen::Index p = cfg.model.p();

  std::vector<bool> covered, rejected, altered, gate_ok, signs, rho_ok;
  std::vector<double> pivots, centers, widths, ratios, mles;
  double target_sum = 0.0;
  std::vector<bool> covered_ridge;
  std::vector<double> ridge_pivots;
  double ridge_target_sum = 0.0;
  std::int64_t negative_zeta2 = 0;
  const IntervalReport* example = nullptr;
  for (const Trial& t : trials) {
    altered.push_back(t.altered);
    if (t.gate_at_choose_r) gate_ok.push_back(*t.gate_at_choose_r);
    if (t.sign_correct) signs.push_back(*t.sign_correct);
    if (!t.report) {
      rejected.push_back(false);
      continue;
    }
    if (!example) example = &*t.report;
    covered.push_back(t.report->Covers(t.target));
    rejected.push_back(t.report->rejected);
    centers.push_back(t.report->center);
    widths.push_back(t.report->half_width);
    target_sum += t.target;
    if (std::isfinite(t.ridge_target)) {
      covered_ridge.push_back(t.report->Covers(t.ridge_target));
      ridge_target_sum += t.ridge_target;
    }
    if (std::isfinite(t.pivot)) pivots.push_back(t.pivot);
    if (std::isfinite(t.ridge_pivot)) ridge_pivots.push_back(t.ridge_pivot);
    if (std::isfinite(t.ols_half_width) && t.ols_half_width > 0.0) {
      ratios.push_back(t.report->half_width / t.ols_half_width);
    }
    if (std::isfinite(t.rho2)) rho_ok.push_back(t.rho2 >= cfg.model.sigma2);
    if (std::isfinite(t.sigma_mle)) mles.push_back(t.sigma_mle);
    if (t.zeta2_negative) ++negative_zeta2;
  }

  nlohmann::ordered_json m;
  const auto analyzed = static_cast<std::int64_t>(centers.size());
  m["analyzed"] = analyzed;
  AddRate(m, "altered_rate", Rate(altered));
  std::string summary;
  char buf[256];

  if (analyzed > 0) {
    const double mean = [&] {
      double s = 0.0;
      for (double c : centers) s += c;
      return s / static_cast<double>(analyzed);
    }();
    double ss = 0.0;
    for (double c : centers) ss += (c - mean) * (c - mean);
    const double se = analyzed > 1 ? std::sqrt(ss / static_cast<double>(analyzed - 1) /
                                               static_cast<double>(analyzed))
                                    : kNaN;
    const double target_mean = target_sum / static_cast<double>(analyzed);
    m["center_mean"] = mean;
    m["center_se"] = Num(se);
    m["target_mean"] = target_mean;
    m["center_z"] = Num((mean - target_mean) / se);
    if (!covered_ridge.empty()) {
      const double ridge_mean = ridge_target_sum / static_cast<double>(covered_ridge.size());
      m["ridge_solution_mean"] = ridge_mean;
      m["center_z_vs_ridge_solution"] = Num((mean - ridge_mean) / se);
      AddRate(m, "coverage_of_ridge_solution", Rate(covered_ridge));
    }
    double wsum = 0.0;
    for (double w : widths) wsum += w;
    m["mean_half_width"] = wsum / static_cast<double>(analyzed);
  }

  switch (cfg.scenario) {
    case Scenario::kCoverage: {
      const RateStat c = Rate(covered);
      AddRate(m, "coverage", c);
      AddRate(m, "rejection_rate", Rate(rejected));
      if (const auto k = ReferenceDof(cfg)) {
        AddKs(m, pivots, *k);
        AddKs(m, ridge_pivots, *k, "ridge_solution_pivot");
      }
      std::snprintf(buf, sizeof(buf), "coverage %.4f (se %.4f) over %lld analyzed trials",
                    c.rate, c.se, static_cast<long long>(analyzed));
      summary = buf;
      break;
    }
    case Scenario::kPower: {
      const RateStat rj = Rate(rejected);
      AddRate(m, "rejection_rate", rj);
      if (!gate_ok.empty()) {
        AddRate(m, "gate_pass_rate_at_choose_r", Rate(gate_ok));
        m["choose_r_omega"] = runner.GateOmega();
      }
      const double beta_j = cfg.model.beta(cfg.j);
      if (beta_j != 0.0) {
        const double lmin = SmallestEigenvalue(cfg.model.sigma);
        m["ols_min_n"] = MinSampleSizeBaseline(cfg.model.sigma2, beta_j, lmin,
                                               TailMass(cfg.alpha), TailMass(cfg.nu), p,
                                               cfg.constants.ols_power);
        m["projected_min_r"] =
            MinRForPower(cfg.model.sigma2, beta_j, lmin, TailMass(cfg.alpha),
                         TailMass(cfg.nu), p, cfg.constants.projected_power, cfg.n);
      } else {
        m["ols_min_n"] = nullptr;
        m["projected_min_r"] = nullptr;
      }
      std::snprintf(buf, sizeof(buf), "rejection rate %.4f (se %.4f) over %lld trials",
                    rj.rate, rj.se, static_cast<long long>(cfg.trials));
      summary = buf;
      break;
    }
    case Scenario::kPivotSandwich: {
      const double radius = pivots.empty() ? kNaN : DkwRadius(pivots.size(), 1e-3);
      std::vector<double> sorted = pivots;
      std::sort(sorted.begin(), sorted.end());
      double worst = -std::numeric_limits<double>::infinity();
      nlohmann::ordered_json grid = nlohmann::ordered_json::array();
      for (int g = -40; g <= 40; ++g) {
        const double x = 0.1 * g;
        const double ecdf =
            sorted.empty() ? kNaN
                           : static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                                 sorted.begin()) /
                                 static_cast<double>(sorted.size());
        const Interval band = SandwichCdfBounds(x, cfg.r, p, cfg.n);
        worst = std::max({worst, band.lo - radius - ecdf, ecdf - band.hi - radius});
        grid.push_back({{"x", x}, {"ecdf", Num(ecdf)}, {"lo", band.lo}, {"hi", band.hi}});
      }
      m["a_ratio"] = static_cast<double>(cfg.r - p) / static_cast<double>(cfg.n - p);
      m["dkw_radius"] = Num(radius);
      m["max_band_violation"] = Num(worst);
      m["within_band"] = !pivots.empty() && worst <= 0.0;
      AddKs(m, pivots, Dof(cfg.r - p));
      m["grid"] = grid;
      std::snprintf(buf, sizeof(buf), "pivot CDF %s the widened sandwich band (max violation %.4f)",
                    worst <= 0.0 ? "inside" : "outside", worst);
      summary = buf;
      break;
    }
    case Scenario::kWidthRatio: {
      const double a = static_cast<double>(cfg.r - p) / static_cast<double>(cfg.n - p);
      const double c = StudentTQuantile(TailMass(1.0 - cfg.alpha / 2.0), Dof(cfg.n - p));
      const double c_tilde = std::exp(a) * StudentTQuantile(
                                               TailMass(1.0 - cfg.alpha / 2.0 * std::exp(-a)),
                                               Dof(cfg.r - p));
      const double predicted = c_tilde / c *
                               std::sqrt(static_cast<double>(cfg.n) / static_cast<double>(cfg.r));
      const double median = Median(ratios);
      m["median_width_ratio"] = Num(median);
      m["predicted_ratio"] = predicted;
      m["ratio_to_predicted"] = Num(median / predicted);
      m["within_factor_two"] = median >= 0.5 * predicted && median <= 2.0 * predicted;
      std::snprintf(buf, sizeof(buf), "median width ratio %.3f vs predicted %.3f", median,
                    predicted);
      summary = buf;
      break;
    }
    case Scenario::kAgCoverage: {
      const RateStat c = Rate(covered);
      const RateStat rho = Rate(rho_ok);
      AddRate(m, "coverage", c);
      AddRate(m, "rho_upper_rate", rho);
      double mle_mean = 0.0;
      for (double v : mles) mle_mean += v;
      mle_mean /= std::max<double>(1.0, static_cast<double>(mles.size()));
      m["sigma_mle_mean"] = mle_mean;
      m["sigma_mle_rel_error"] = std::abs(mle_mean - cfg.model.sigma2) / cfg.model.sigma2;
      m["negative_zeta2_count"] = negative_zeta2;
      std::snprintf(buf, sizeof(buf), "coverage %.4f, rho^2 >= sigma^2 in %.4f of trials",
                    c.rate, rho.rate);
      summary = buf;
      break;
    }
    case Scenario::kRidgeSign: {
      const RateStat s = Rate(signs);
      AddRate(m, "sign_rate", s);
      m["sign_threshold"] = 1.0 - cfg.nu - cfg.alpha;
      Rng rng(cfg.seed, 0);
      const SyntheticData reference = GenerateDataset(cfg.model, cfg.n, rng);
      const Eigen::MatrixXd gram = Gram(reference.x);
      const DesignSummary design{SpdInverse<double>(gram).Diagonal().sum(),
                                 SmallestEigenvalue(gram) / static_cast<double>(cfg.n)};
      m["sign_condition"] = ConditionToJson(CheckSignCondition(
          SignModel{cfg.model.beta, cfg.model.sigma2}, design, cfg.r, cfg.n, p,
          TailMass(cfg.alpha), TailMass(cfg.nu), cfg.eta, cfg.j,
          cfg.constants.sign_condition));
      std::snprintf(buf, sizeof(buf), "sign recovered in %.4f of %lld trials", s.rate,
                    static_cast<long long>(s.count));
      summary = buf;
      break;
    }
  }

  nlohmann::ordered_json report;
  report["config"] = ConfigToJson(cfg);
  report["scenario"] = ScenarioName(cfg.scenario);
  report["trials"] = cfg.trials;
  report["metrics"] = m;
  report["example_report"] = example ? ReportToJson(*example) : nlohmann::ordered_json();
  report["summary"] = summary;
  return report;
}

std::string PowerTables(const ExperimentConfig& base, const std::vector<PowerCell>& cells) {
  std::string out =
      "n,r,epsilon,trials,rejection_rate,rejection_se,altered_rate,ols_min_n,projected_min_r\n";
  for (const PowerCell& cell : cells) {
    ExperimentConfig cfg = base;
    cfg.scenario = Scenario::kPower;
    cfg.n = cell.n;
    cfg.r = cell.r;
    cfg.epsilon = cell.epsilon;
    const nlohmann::ordered_json report = RunExperiment(cfg);
    const nlohmann::ordered_json& m = report["metrics"];
    auto field = [&](const char* key) {
      if (!m.contains(key) || m[key].is_null()) return std::string("NA");
      const nlohmann::ordered_json& v = m[key];
      if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
      return FormatDouble(v.get<double>());
    };
    out += std::to_string(cell.n) + "," +
           std::to_string(report["config"]["r"].get<std::int64_t>()) + "," +
           FormatDouble(cell.epsilon) + "," + std::to_string(cfg.trials) + "," +
           field("rejection_rate") + "," + field("rejection_rate_se") + "," +
           field("altered_rate") + "," + field("ols_min_n") + "," +
           field("projected_min_r") + "\n";
  }
  return out;
}

}  // namespace dplr
