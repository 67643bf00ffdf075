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

#include "dplr/ols_core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dplr/error.h"
#include "dplr/matrix_kernels.h"

namespace dplr {

namespace {

void CheckCoordinate(Eigen::Index j, Eigen::Index p) {
  if (j < 0 || j >= p) {
    throw Error(ErrorCode::kInvalidParameter,
                "coordinate " + std::to_string(j) + " out of range [0, " +
                    std::to_string(p) + ")");
  }
}

double StandardError(const OlsFit& fit, Eigen::Index j) {
  return std::sqrt(fit.xtx_inverse_diag(j) * fit.zeta_norm2 /
                   static_cast<double>(fit.dof));
}

void FillOneSidedTest(IntervalReport& report, double t, double alpha) {
  report.t_stat = t;
  report.p_value = NormalUpperTail(std::abs(t));
  report.threshold = alpha;
  report.rejected = report.p_value < alpha;
}

}  // namespace

bool ResidualVanishes(double residual_norm2, double response_norm2) {
  const double eps = std::numeric_limits<double>::epsilon();
  return residual_norm2 <= 4096.0 * eps * eps * response_norm2;
}

OlsFit FitOls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() <= x.cols()) {
    throw Error(ErrorCode::kUnderdetermined,
                "need n > p, got n=" + std::to_string(x.rows()) +
                    ", p=" + std::to_string(x.cols()));
  }
  const LeastSquaresSolution<double> ls = LeastSquaresSolve(x, y);
  if (ls.rank < x.cols()) {
    throw Error(ErrorCode::kSingular,
                "design has rank " + std::to_string(ls.rank) + " < p=" +
                    std::to_string(x.cols()));
  }
  OlsFit fit;
  fit.beta_hat = ls.beta;
  fit.zeta_norm2 = ls.residual.squaredNorm();
  fit.n = x.rows();
  fit.p = x.cols();
  fit.dof = fit.n - fit.p;
  fit.xtx_inverse_diag = SpdInverse<double>(Gram(x)).Diagonal();
  fit.degenerate = ResidualVanishes(fit.zeta_norm2, y.squaredNorm());
  return fit;
}

double TValue(const OlsFit& fit, Eigen::Index j, double beta0) {
  CheckCoordinate(j, fit.p);
  if (fit.degenerate) {
    throw Error(ErrorCode::kDegenerate, "zero residual: t-value undefined");
  }
  return (fit.beta_hat(j) - beta0) / StandardError(fit, j);
}

IntervalReport ConfidenceInterval(const OlsFit& fit, Eigen::Index j,
                                  TailMass alpha, QuantileFamily family) {
  CheckCoordinate(j, fit.p);
  IntervalReport report;
  report.coordinate = j;
  report.center = fit.beta_hat(j);
  report.alpha = alpha.value();
  report.path = InferencePath::kOls;
  if (fit.degenerate) {
    report.degenerate = true;
    return report;
  }
  const TailMass upper(1.0 - alpha.value() / 2.0);
  const double c = family == QuantileFamily::kStudentT
                       ? StudentTQuantile(upper, Dof(fit.dof))
                       : NormalQuantile(upper);
  report.half_width = c * StandardError(fit, j);
  FillOneSidedTest(report, TValue(fit, j, 0.0), alpha.value());
  return report;
}

IntervalReport RejectNull(const OlsFit& fit, Eigen::Index j, TailMass alpha,
                          Sidedness sidedness) {
  IntervalReport report = ConfidenceInterval(fit, j, alpha);
  if (fit.degenerate) {
    throw Error(ErrorCode::kDegenerate, "zero residual: test undefined");
  }
  if (sidedness == Sidedness::kTwoSided) {
    report.p_value = std::min(1.0, 2.0 * report.p_value);
    report.rejected = report.p_value < alpha.value();
  }
  return report;
}

std::int64_t MinSampleSizeBaseline(double sigma2, double beta_j,
                                   double sigma_min_sigma, TailMass alpha,
                                   TailMass nu, std::int64_t p,
                                   PowerConstants constants,
                                   std::optional<std::int64_t> dof) {
  if (beta_j == 0.0) {
    throw Error(ErrorCode::kUndefinedPower, "beta_j = 0 has no power target");
  }
  if (!(sigma_min_sigma > 0.0) || !(sigma2 >= 0.0) || p < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "need sigma_min > 0, sigma2 >= 0 and p >= 1");
  }
  const TailMass upper(1.0 - alpha.value() / 2.0);
  const double c = dof ? StudentTQuantile(upper, Dof(*dof)) : NormalQuantile(upper);
  const double tau = UpperTailQuantile(alpha);
  const double pd = static_cast<double>(p);
  const double sample_term = constants.c1 * (pd + std::log(1.0 / nu.value()));
  const double signal_term = pd + constants.c2 * sigma2 / (beta_j * beta_j) *
                                      (c * c + tau * tau) / sigma_min_sigma;
  return static_cast<std::int64_t>(std::ceil(std::max(sample_term, signal_term)));
}

}  // namespace dplr
