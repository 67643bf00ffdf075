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

// Classical least-squares inference under the homoscedastic Gaussian model.

#ifndef DPLR_OLS_CORE_H_
#define DPLR_OLS_CORE_H_

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "dplr/interval_report.h"
#include "dplr/stats_kernels.h"

namespace dplr {

struct OlsFit {
  Eigen::VectorXd beta_hat;
  double zeta_norm2 = 0.0;  // squared residual norm
  std::int64_t dof = 0;     // n - p
  Eigen::VectorXd xtx_inverse_diag;
  std::int64_t n = 0;
  std::int64_t p = 0;
  // Residual vanishes to rounding; intervals collapse to zero width.
  bool degenerate = false;
};

OlsFit FitOls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// (beta_hat_j - beta0) / sqrt(xtx_inverse_diag_j * zeta_norm2 / dof).
double TValue(const OlsFit& fit, Eigen::Index j, double beta0);

enum class QuantileFamily { kStudentT, kNormal };
enum class Sidedness {
  kOneSided,  // p = Pr[N(0,1) > |t|], reject iff p < alpha
  kTwoSided,  // p = 2 Pr[N(0,1) > |t|]
};

// Interval at level 1 - alpha around beta_hat_j. The report also carries
// the one-sided test of beta_j = 0 from the same fit.
IntervalReport ConfidenceInterval(const OlsFit& fit, Eigen::Index j,
                                  TailMass alpha,
                                  QuantileFamily family = QuantileFamily::kStudentT);

IntervalReport RejectNull(const OlsFit& fit, Eigen::Index j, TailMass alpha,
                          Sidedness sidedness = Sidedness::kOneSided);

struct PowerConstants {
  double c1 = 25.0;
  double c2 = 8.0;
};

// Smallest n at which the null beta_j = 0 is rejected with probability
// 1 - nu: ceil(max{C1 (p + ln(1/nu)),
//                  p + C2 (sigma2 / beta_j^2)(c_alpha^2 + tau_alpha^2)
//                        / sigma_min_sigma}).
// c_alpha uses T_dof when `dof` is given and the normal limit otherwise.
std::int64_t MinSampleSizeBaseline(double sigma2, double beta_j,
                                   double sigma_min_sigma, TailMass alpha,
                                   TailMass nu, std::int64_t p,
                                   PowerConstants constants = {},
                                   std::optional<std::int64_t> dof = {});

// True when a squared residual norm is indistinguishable from zero
// relative to the squared norm of the response it came from.
bool ResidualVanishes(double residual_norm2, double response_norm2);

}  // namespace dplr

#endif  // DPLR_OLS_CORE_H_
