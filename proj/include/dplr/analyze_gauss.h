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

// Release of the Gram matrix of [X y] with symmetric i.i.d. Gaussian noise,
// and the inference built on it.

#ifndef DPLR_ANALYZE_GAUSS_H_
#define DPLR_ANALYZE_GAUSS_H_

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dplr/interval_report.h"
#include "dplr/privacy_ledger.h"
#include "dplr/private_projection.h"
#include "dplr/stats_kernels.h"

namespace dplr {

struct AgRelease {
  Eigen::MatrixXd noisy_xtx;  // p x p, exactly symmetric
  Eigen::VectorXd noisy_xty;
  double noisy_yty = 0.0;
  double delta_noise = 0.0;   // standard deviation of each noise entry
  std::int64_t n_public = 0;
  Eigen::Index p = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

// B^2 sqrt(2 ln(1.25/delta)) / eps: the Gaussian mechanism for a query of
// l2 sensitivity B^2.
double AgNoiseScale(double row_bound, const PrivacyBudget& budget);

struct AgOptions {
  // Test hook replacing the calibrated noise scale; 0 releases exact sums.
  std::optional<double> delta_override;
  BudgetLedger* ledger = nullptr;
};

// Gram of [X y] (label last) plus a symmetric noise matrix whose upper
// triangle, diagonal included, is drawn row by row from N(0, Delta^2).
AgRelease MakeAgRelease(const BoundedDataset& a, const PrivacyBudget& budget,
                        std::uint64_t seed, const AgOptions& options = {});

struct AgFit {
  Eigen::VectorXd beta_ag;      // S^{-1} b
  double zeta2_ag = 0.0;        // yty - b^T S^{-1} b, never clamped
  bool zeta2_negative = false;
  Eigen::MatrixXd xtx_inverse;  // S^{-1}
};

// Fails with kNotPsd, naming the smallest eigenvalue, unless the noisy
// Gram block is positive definite.
AgFit FitAg(const AgRelease& release);

// rho^2 = (zeta2_ag + C (Delta B^2 sqrt(p)/(1-eta) sqrt(ln(1/nu))
//                        + Delta^2 ||S^{-1}||_F ln(p/nu)))
//         / (sqrt(n-p) - 2 sqrt(ln(16/nu)))^2.
// Requires lambda_min(S) > Delta sqrt(p ln(1/nu)) / eta.
double AgVarianceUpperBound(const AgRelease& release, double row_bound,
                            TailMass nu, double eta, double constant_c = 1.0);

// (zeta2_ag + Delta^2 ||S^{-1}||_F) / (n - p).
double AgSigmaMle(const AgRelease& release);

struct AgCiOptions {
  double ci_constant = 4.0;
  double rho_constant = 1.0;
};

// Interval at level 1 - nu around beta_ag_j of half-width
// K (B Delta sqrt(p q_j) + rho sqrt(s_j + Delta q_j sqrt(p ln(1/nu))))
//   * sqrt(ln(1/nu)),
// with s_j = (S^{-1})_jj and q_j the squared norm of row j of S^{-1}.
IntervalReport AgCi(const AgRelease& release, Eigen::Index j, double row_bound,
                    TailMass nu, double eta, const AgCiOptions& options = {});

// {p, n_public, delta_noise, epsilon, delta, noisy_xtx, noisy_xty,
//  noisy_yty, seed}; noisy_xtx is the upper triangle, row-major.
std::string AgReleaseToJson(const AgRelease& release);
AgRelease AgReleaseFromJson(const std::string& text);

}  // namespace dplr

#endif  // DPLR_ANALYZE_GAUSS_H_
