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

#include "dplr/ridge_projected.h"

#include <algorithm>
#include <cmath>

#include "dplr/error.h"
#include "dplr/json_util.h"
#include "dplr/matrix_kernels.h"
#include "dplr/ols_core.h"

namespace dplr {

namespace {

void CheckCoordinate(Eigen::Index j, std::int64_t p) {
  if (j < 0 || j >= p) {
    throw Error(ErrorCode::kInvalidParameter,
                "coordinate " + std::to_string(j) + " out of range");
  }
}

void CheckEta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "eta must lie in (0, 1)");
  }
}

// sqrt(zeta'^2 r / (r - p) * (M'^T M')^{-1}_jj)
double RidgeScale(const RidgeFit& fit, Eigen::Index j) {
  return std::sqrt(fit.zeta_prime_norm2 * static_cast<double>(fit.r) /
                   static_cast<double>(fit.dof) * fit.mptm_inverse_diag(j));
}

ConditionReport Finish(ConditionReport report) {
  report.satisfied = std::all_of(report.margins.begin(), report.margins.end(),
                                 [](const auto& m) { return m.second >= 0.0; });
  return report;
}

}  // namespace

RidgeFit FitProjectedRidgeSketch(const Eigen::MatrixXd& m_prime,
                                 const Eigen::VectorXd& ry_prime, double w,
                                 std::int64_t n) {
  const std::int64_t r = m_prime.rows();
  const std::int64_t p = m_prime.cols();
  if (r <= p) {
    throw Error(ErrorCode::kInsufficientRows,
                "need r > p, got r=" + std::to_string(r) +
                    ", p=" + std::to_string(p));
  }
  const LeastSquaresSolution<double> ls = LeastSquaresSolve(m_prime, ry_prime);
  if (ls.rank < p) {
    throw Error(ErrorCode::kSingular, "sketched design is rank deficient");
  }
  RidgeFit fit;
  fit.beta_prime = ls.beta;
  fit.zeta_prime_norm2 = ls.residual.squaredNorm() / static_cast<double>(r);
  fit.r = r;
  fit.p = p;
  fit.dof = r - p;
  fit.w = w;
  fit.n = n;
  fit.mptm_inverse_diag = SpdInverse<double>(Gram(m_prime)).Diagonal();
  fit.degenerate = ResidualVanishes(ls.residual.squaredNorm(), ry_prime.squaredNorm());
  return fit;
}

RidgeFit FitProjectedRidge(const ProjectionRelease& release) {
  if (!release.altered) {
    throw Error(ErrorCode::kWrongPath,
                "release is unaltered; use the projected path (fit-projected)");
  }
  const FeatureLabel split = SplitAtLabel(release.sketch, release.label_column);
  return FitProjectedRidgeSketch(split.features, split.label, release.w,
                                 release.n_public);
}

double RidgePivot(const RidgeFit& fit, Eigen::Index j, double target) {
  CheckCoordinate(j, fit.p);
  if (fit.degenerate) {
    throw Error(ErrorCode::kDegenerate, "zero residual: pivot undefined");
  }
  return (fit.beta_prime(j) - target) / RidgeScale(fit, j);
}

IntervalReport RidgeCiForHatBeta(const RidgeFit& fit, Eigen::Index j,
                                 TailMass alpha) {
  CheckCoordinate(j, fit.p);
  IntervalReport report;
  report.coordinate = j;
  report.center = fit.beta_prime(j);
  report.alpha = alpha.value();
  report.path = InferencePath::kRidge;
  if (fit.degenerate) {
    report.degenerate = true;
    return report;
  }
  const double c = StudentTQuantile(TailMass(1.0 - alpha.value() / 2.0), Dof(fit.dof));
  report.half_width = c * RidgeScale(fit, j);
  return report;
}

IntervalReport CombinedCiForBeta(const RidgeFit& fit,
                                 const std::optional<OlsSide>& ols_side,
                                 Eigen::Index j, TailMass alpha) {
  if (!ols_side) {
    throw Error(ErrorCode::kDiagnosticUnavailable,
                "combined interval needs the non-private OLS side");
  }
  CheckCoordinate(j, fit.p);
  if (ols_side->dof < 1 || !(ols_side->zeta_norm2 >= 0.0) ||
      !(ols_side->xtx_inverse_diag_j > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "malformed OLS side");
  }
  IntervalReport report;
  report.coordinate = j;
  report.center = fit.beta_prime(j);
  report.alpha = alpha.value();
  report.path = InferencePath::kRidge;
  report.diagnostic = true;
  report.degenerate = fit.degenerate;
  const TailMass upper(1.0 - alpha.value() / 4.0);
  const double c = StudentTQuantile(upper, Dof(ols_side->dof));
  const double c_prime = StudentTQuantile(upper, Dof(fit.dof));
  const double ols_term = c * std::sqrt(ols_side->zeta_norm2 /
                                        static_cast<double>(ols_side->dof) *
                                        ols_side->xtx_inverse_diag_j);
  const double sketch_term = fit.degenerate ? 0.0 : c_prime * RidgeScale(fit, j);
  report.half_width = ols_term + sketch_term;
  return report;
}

nlohmann::ordered_json ConditionToJson(const ConditionReport& report) {
  nlohmann::ordered_json j;
  j["condition_id"] = report.condition_id == ConditionId::kIntervalCondition
                          ? "interval_cond"
                          : "sign_cond";
  j["satisfied"] = report.satisfied;
  j["eta"] = report.eta;
  nlohmann::ordered_json margins = nlohmann::ordered_json::object();
  for (const auto& [name, value] : report.margins) margins[name] = value;
  j["margins"] = margins;
  return j;
}

ConditionReport CheckIntervalCondition(std::int64_t n, std::int64_t r,
                                       std::int64_t p, double eta,
                                       double row_bound,
                                       const PrivacyBudget& budget,
                                       double sigma_min_scaled_gram,
                                       double constant) {
  CheckEta(eta);
  if (!(sigma_min_scaled_gram > 0.0) || !(row_bound > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "need sigma_min > 0 and B > 0");
  }
  const double nd = static_cast<double>(n);
  const double rd = static_cast<double>(r);
  ConditionReport report;
  report.condition_id = ConditionId::kIntervalCondition;
  report.eta = eta;
  report.margins.emplace_back(
      "dof_ratio", static_cast<double>(n - p) - 2.0 / (eta * eta) * static_cast<double>(r - p));
  report.margins.emplace_back(
      "sample_size",
      nd * nd - constant * std::pow(rd, 1.5) * row_bound * row_bound *
                    std::log(1.0 / budget.delta()) /
                    (budget.epsilon() * eta * eta * sigma_min_scaled_gram));
  return Finish(std::move(report));
}

ConditionReport CheckSignCondition(const SignModel& model,
                                   const DesignSummary& design, std::int64_t r,
                                   std::int64_t n, std::int64_t p,
                                   TailMass alpha, TailMass nu, double eta,
                                   Eigen::Index j, double constant) {
  CheckEta(eta);
  CheckCoordinate(j, model.beta.size());
  const double beta_j = model.beta(j);
  if (beta_j == 0.0) {
    throw Error(ErrorCode::kSignUndefined, "beta_j = 0 has no sign");
  }
  if (r <= p || !(design.sigma_min_scaled_gram > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "need r > p and sigma_min > 0");
  }
  const double beta_norm2 = model.beta.squaredNorm();
  const double c_prime =
      StudentTQuantile(TailMass(1.0 - alpha.value() / 2.0), Dof(r - p));
  ConditionReport report;
  report.condition_id = ConditionId::kSignCondition;
  report.eta = eta;
  report.margins.emplace_back(
      "samples", static_cast<double>(n - p) - constant * std::log(1.0 / nu.value()));
  report.margins.emplace_back(
      "signal", beta_norm2 - constant * model.sigma2 * design.pseudo_frob2 *
                                 std::log(static_cast<double>(p) / nu.value()));
  report.margins.emplace_back(
      "rows", static_cast<double>(r - p) -
                  constant * c_prime * c_prime * (1 + eta) * (1 + eta) /
                      (beta_j * beta_j) *
                      (1.0 + beta_norm2 + model.sigma2 / design.sigma_min_scaled_gram));
  return Finish(std::move(report));
}

std::int64_t SelectRRidge(std::int64_t n, std::int64_t p, double eta,
                          double row_bound, const PrivacyBudget& budget,
                          double sigma_min_scaled_gram,
                          const RidgeModelHint& hint, double constant) {
  CheckEta(eta);
  if (n <= p || !(sigma_min_scaled_gram > 0.0) || !(row_bound > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "need n > p, sigma_min > 0, B > 0");
  }
  if (hint.beta_j == 0.0) {
    throw Error(ErrorCode::kSignUndefined, "beta_j = 0 has no sign");
  }
  const double nd = static_cast<double>(n);
  const double dof_cap = std::floor(static_cast<double>(p) + eta * eta * (nd - p));
  const double privacy_cap = std::floor(std::pow(
      eta * eta * budget.epsilon() * nd * nd * sigma_min_scaled_gram /
          (row_bound * row_bound * std::log(1.0 / budget.delta())),
      2.0 / 3.0));
  const double r = std::min(dof_cap, privacy_cap);
  const double b2 = hint.beta_j * hint.beta_j;
  const double needed =
      constant * ((1.0 + hint.beta_norm2) / b2 + hint.sigma2 / (b2 * sigma_min_scaled_gram));
  if (r - static_cast<double>(p) < needed) {
    std::string which = dof_cap <= privacy_cap ? "r - p <= eta^2 (n - p)"
                                               : "privacy cap on r";
    throw Error(ErrorCode::kInfeasible,
                "r - p = " + FormatDouble(r - p) + " below the signal requirement " +
                    FormatDouble(needed) + " (binding upper bound: " + which + ")");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace dplr
