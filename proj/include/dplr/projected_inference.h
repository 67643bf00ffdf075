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

// Inference from an unaltered projection release (the sketch R[X y]).
//
// With a = (r - p)/(n - p), the pivot t = (beta_tilde_j - beta_j) / se has
// a density D sandwiched by e^-a T_{r-p}(x) <= D(x) <= e^a T_{r-p}(e^-a x),
// which drives the interval and test below.

#ifndef DPLR_PROJECTED_INFERENCE_H_
#define DPLR_PROJECTED_INFERENCE_H_

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "dplr/interval_report.h"
#include "dplr/ols_core.h"
#include "dplr/privacy_ledger.h"
#include "dplr/private_projection.h"
#include "dplr/rng.h"
#include "dplr/stats_kernels.h"

namespace dplr {

struct ProjectedFit {
  Eigen::VectorXd beta_tilde;
  double zeta_tilde_norm2 = 0.0;
  double sigma_tilde2 = 0.0;  // r / (r - p) * zeta_tilde_norm2
  std::int64_t dof = 0;       // r - p
  double a_ratio = 0.0;       // (r - p) / (n - p)
  Eigen::VectorXd mtm_inverse_diag;
  std::int64_t r = 0;
  std::int64_t n = 0;
  std::int64_t p = 0;
  bool degenerate = false;
};

// beta_tilde = M^+ Ry and zeta_tilde = (Ry - M beta_tilde) / sqrt(r), for
// M = RX (r x p) and Ry from a dataset of n rows.
ProjectedFit FitProjectedSketch(const Eigen::MatrixXd& m,
                                const Eigen::VectorXd& ry, std::int64_t n);
ProjectedFit FitProjected(const ProjectionRelease& release);

// (beta_tilde_j - beta0) / sqrt(sigma_tilde2 * mtm_inverse_diag_j).
double ProjectedTValue(const ProjectedFit& fit, Eigen::Index j, double beta0);

// (e^-a pdf_T(x), e^a pdf_T(e^-a x)) with T = T_{r-p}.
Interval SandwichPdfBounds(double x, std::int64_t r, std::int64_t p,
                           std::int64_t n);

// Bounds on the pivot CDF obtained by integrating the density sandwich
// from either tail, clamped to [0, 1].
Interval SandwichCdfBounds(double x, std::int64_t r, std::int64_t p,
                           std::int64_t n);

enum class QuantileMode {
  kExact,           // T_{r-p} quantiles
  kNormalShortcut,  // standard normal quantiles
};

// half_width = e^a c * sqrt(sigma_tilde2 * mtm_inverse_diag_j) where c
// leaves (alpha/2) e^-a mass in the upper tail of T_{r-p}. The report
// also carries the test of beta_j = 0 from ProjectedRejectNull.
IntervalReport ProjectedCi(const ProjectedFit& fit, Eigen::Index j,
                           TailMass alpha,
                           QuantileMode mode = QuantileMode::kExact);

// p = Pr[N(0,1) > e^-a |t|] with t = ProjectedTValue(fit, j, 0); rejects
// iff p < alpha e^-a.
IntervalReport ProjectedRejectNull(const ProjectedFit& fit, Eigen::Index j,
                                   TailMass alpha);

// r = p + ceil(max{C1 sigma2 (c^2 + tau^2) / (beta_j^2 sigma_min_sigma),
//                  C2 ln(1/nu)}).
// The first pass uses a = 0 and normal quantiles. When n is given, or in
// exact mode, one refinement pass recomputes c (T_{r0-p}, upper mass
// (alpha/2) e^-a) and tau (normal, upper mass alpha e^-a), both scaled by
// e^a, at the first-pass r0.
std::int64_t MinRForPower(double sigma2, double beta_j, double sigma_min_sigma,
                          TailMass alpha, TailMass nu, std::int64_t p,
                          PowerConstants constants = {},
                          std::optional<std::int64_t> n = {},
                          QuantileMode mode = QuantileMode::kExact);

// floor(min{n, eps^2 sigma_min_sigma_a^2 / (omega B^4 ln(1/delta))
//              * (n - ln(1/delta))^2}), raised to at least p + 2.
std::int64_t ChooseR(std::int64_t n, std::int64_t p, double row_bound,
                     const PrivacyBudget& budget, double sigma_min_sigma_a,
                     double omega = 1.0);

// Smallest omega for which ChooseR keeps the square-root part of w^2 below
// n sigma_min_sigma_a / c_gate^2: 128 c_gate^4 ln(8/delta) / ln(1/delta).
double GateConsistentOmega(double delta, double c_gate = 2.0);

struct SigmaMinEstimate {
  double lambda = 0.0;       // sigma_min(A^T A) + Lap(4B^2/eps)
  double lower_bound = 0.0;  // lambda - 4B^2 ln(1/nu) / eps
};

// Private estimate of the smallest eigenvalue of A^T A. Spends `budget`
// and records it when a ledger is supplied.
SigmaMinEstimate PrivateSigmaMinEstimate(const BoundedDataset& a,
                                         const PrivacyBudget& budget,
                                         TailMass nu, Rng& rng,
                                         BudgetLedger* ledger = nullptr);

}  // namespace dplr

#endif  // DPLR_PROJECTED_INFERENCE_H_
