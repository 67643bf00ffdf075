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

// Inference from an altered release, the sketch R[X y; w I]. The ridge-type
// estimate beta' targets the OLS solution beta_hat rather than beta.

#ifndef DPLR_RIDGE_PROJECTED_H_
#define DPLR_RIDGE_PROJECTED_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dplr/interval_report.h"
#include "dplr/privacy_ledger.h"
#include "dplr/private_projection.h"
#include "dplr/stats_kernels.h"

#include "json.hpp"

namespace dplr {

struct RidgeFit {
  Eigen::VectorXd beta_prime;
  double zeta_prime_norm2 = 0.0;
  std::int64_t dof = 0;  // r - p
  Eigen::VectorXd mptm_inverse_diag;
  std::int64_t r = 0;
  double w = 0.0;
  std::int64_t n = 0;
  std::int64_t p = 0;
  bool degenerate = false;
};

// beta' = M'^+ Ry' and zeta' = (Ry' - M' beta') / sqrt(r) for the sketched
// regularized design M' (r x p) and label Ry'.
RidgeFit FitProjectedRidgeSketch(const Eigen::MatrixXd& m_prime,
                                 const Eigen::VectorXd& ry_prime, double w,
                                 std::int64_t n);
RidgeFit FitProjectedRidge(const ProjectionRelease& release);

// (beta'_j - target) / sqrt(zeta_prime_norm2 r/(r-p) mptm_inverse_diag_j),
// distributed as T_{r-p} over R when target = beta_hat_j.
double RidgePivot(const RidgeFit& fit, Eigen::Index j, double target);

// Interval for beta_hat_j (not beta_j):
// c' sqrt(zeta_prime_norm2 r/(r-p) mptm_inverse_diag_j), c' from T_{r-p}.
IntervalReport RidgeCiForHatBeta(const RidgeFit& fit, Eigen::Index j,
                                 TailMass alpha);

// Non-private OLS quantities entering the combined interval.
struct OlsSide {
  double zeta_norm2 = 0.0;
  double xtx_inverse_diag_j = 0.0;
  std::int64_t dof = 0;  // n - p
};

// Interval for beta_j adding the OLS and the sketch half-widths, each at
// confidence alpha/2. Flagged diagnostic; requires `ols_side`.
IntervalReport CombinedCiForBeta(const RidgeFit& fit,
                                 const std::optional<OlsSide>& ols_side,
                                 Eigen::Index j, TailMass alpha);

enum class ConditionId { kIntervalCondition, kSignCondition };

struct ConditionReport {
  ConditionId condition_id = ConditionId::kIntervalCondition;
  bool satisfied = false;
  std::vector<std::pair<std::string, double>> margins;
  double eta = 0.0;
};

nlohmann::ordered_json ConditionToJson(const ConditionReport& report);

// Margins:
//   "dof_ratio":  (n - p) - (2/eta^2)(r - p)
//   "sample_size": n^2 - K r^{3/2} B^2 ln(1/delta) / (eps eta^2 sigma_min)
// where sigma_min is the smallest eigenvalue of X^T X / n.
ConditionReport CheckIntervalCondition(std::int64_t n, std::int64_t r,
                                       std::int64_t p, double eta,
                                       double row_bound,
                                       const PrivacyBudget& budget,
                                       double sigma_min_scaled_gram,
                                       double constant = 64.0);

struct SignModel {
  Eigen::VectorXd beta;
  double sigma2 = 0.0;
};

struct DesignSummary {
  double pseudo_frob2 = 0.0;  // ||X^+||_F^2
  double sigma_min_scaled_gram = 0.0;
};

// Margins, each with constant K:
//   "samples":  (n - p) - K ln(1/nu)
//   "signal":   ||beta||^2 - K sigma2 ||X^+||_F^2 ln(p/nu)
//   "rows":     (r - p) - K c'^2 (1+eta)^2 / beta_j^2
//                 * (1 + ||beta||^2 + sigma2 / sigma_min)
ConditionReport CheckSignCondition(const SignModel& model,
                                   const DesignSummary& design, std::int64_t r,
                                   std::int64_t n, std::int64_t p,
                                   TailMass alpha, TailMass nu, double eta,
                                   Eigen::Index j, double constant = 1.0);

struct RidgeModelHint {
  double beta_norm2 = 0.0;
  double beta_j = 0.0;
  double sigma2 = 0.0;
};

// Largest r with r - p <= eta^2 (n - p) and
// r <= (eta^2 eps n^2 sigma_min / (B^2 ln(1/delta)))^{2/3}; fails when
// r - p < K ((1 + ||beta||^2)/beta_j^2 + sigma2/(beta_j^2 sigma_min)).
std::int64_t SelectRRidge(std::int64_t n, std::int64_t p, double eta,
                          double row_bound, const PrivacyBudget& budget,
                          double sigma_min_scaled_gram,
                          const RidgeModelHint& hint, double constant = 1.0);

}  // namespace dplr

#endif  // DPLR_RIDGE_PROJECTED_H_
