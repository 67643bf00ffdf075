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

#include "dplr/projected_inference.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dplr/error.h"
#include "dplr/matrix_kernels.h"

namespace dplr {

namespace {

void CheckCoordinate(Eigen::Index j, std::int64_t p) {
  if (j < 0 || j >= p) {
    throw Error(ErrorCode::kInvalidParameter,
                "coordinate " + std::to_string(j) + " out of range");
  }
}

double SandwichRatio(std::int64_t r, std::int64_t p, std::int64_t n) {
  if (n <= p || r <= p) {
    throw Error(ErrorCode::kInvalidParameter, "need n > p and r > p");
  }
  return static_cast<double>(r - p) / static_cast<double>(n - p);
}

}  // namespace

ProjectedFit FitProjectedSketch(const Eigen::MatrixXd& m,
                                const Eigen::VectorXd& ry, std::int64_t n) {
  const std::int64_t r = m.rows();
  const std::int64_t p = m.cols();
  if (r <= p) {
    throw Error(ErrorCode::kInsufficientRows,
                "need r > p, got r=" + std::to_string(r) +
                    ", p=" + std::to_string(p));
  }
  if (n <= p) throw Error(ErrorCode::kUnderdetermined, "need n > p");
  const LeastSquaresSolution<double> ls = LeastSquaresSolve(m, ry);
  if (ls.rank < p) {
    throw Error(ErrorCode::kSingular, "projected design is rank deficient");
  }
  ProjectedFit fit;
  fit.beta_tilde = ls.beta;
  fit.r = r;
  fit.n = n;
  fit.p = p;
  fit.dof = r - p;
  fit.zeta_tilde_norm2 = ls.residual.squaredNorm() / static_cast<double>(r);
  fit.sigma_tilde2 =
      static_cast<double>(r) / static_cast<double>(r - p) * fit.zeta_tilde_norm2;
  fit.a_ratio = SandwichRatio(r, p, n);
  fit.mtm_inverse_diag = SpdInverse<double>(Gram(m)).Diagonal();
  fit.degenerate = ResidualVanishes(ls.residual.squaredNorm(), ry.squaredNorm());
  return fit;
}

ProjectedFit FitProjected(const ProjectionRelease& release) {
  if (release.altered) {
    throw Error(ErrorCode::kWrongPath,
                "release is altered; use the ridge path (fit-ridge)");
  }
  const FeatureLabel split = SplitAtLabel(release.sketch, release.label_column);
  return FitProjectedSketch(split.features, split.label, release.n_public);
}

double ProjectedTValue(const ProjectedFit& fit, Eigen::Index j, double beta0) {
  CheckCoordinate(j, fit.p);
  if (fit.degenerate) {
    throw Error(ErrorCode::kDegenerate, "zero residual: t-value undefined");
  }
  return (fit.beta_tilde(j) - beta0) /
         std::sqrt(fit.sigma_tilde2 * fit.mtm_inverse_diag(j));
}

Interval SandwichPdfBounds(double x, std::int64_t r, std::int64_t p,
                           std::int64_t n) {
  const double a = SandwichRatio(r, p, n);
  const Dof k(r - p);
  return {std::exp(-a) * StudentTPdf(x, k),
          std::exp(a) * StudentTPdf(std::exp(-a) * x, k)};
}

Interval SandwichCdfBounds(double x, std::int64_t r, std::int64_t p,
                           std::int64_t n) {
  const double a = SandwichRatio(r, p, n);
  const Dof k(r - p);
  const double shrunk = std::exp(-a) * x;
  const double lower = std::max(std::exp(-a) * StudentTCdf(x, k),
                                1.0 - std::exp(2 * a) * StudentTUpperTail(shrunk, k));
  const double upper = std::min(1.0 - std::exp(-a) * StudentTUpperTail(x, k),
                                std::exp(2 * a) * StudentTCdf(shrunk, k));
  return {std::clamp(lower, 0.0, 1.0), std::clamp(upper, 0.0, 1.0)};
}

IntervalReport ProjectedCi(const ProjectedFit& fit, Eigen::Index j,
                           TailMass alpha, QuantileMode mode) {
  CheckCoordinate(j, fit.p);
  IntervalReport report;
  report.coordinate = j;
  report.center = fit.beta_tilde(j);
  report.alpha = alpha.value();
  report.path = InferencePath::kProjected;
  if (fit.degenerate) {
    report.degenerate = true;
    return report;
  }
  const double shrink = std::exp(-fit.a_ratio);
  const TailMass upper(1.0 - alpha.value() / 2.0 * shrink);
  const double c = mode == QuantileMode::kExact
                       ? StudentTQuantile(upper, Dof(fit.dof))
                       : NormalQuantile(upper);
  report.half_width = c / shrink *
                      std::sqrt(fit.sigma_tilde2 * fit.mtm_inverse_diag(j));
  const double t = ProjectedTValue(fit, j, 0.0);
  report.t_stat = t;
  report.p_value = NormalUpperTail(shrink * std::abs(t));
  report.threshold = alpha.value() * shrink;
  report.rejected = report.p_value < report.threshold;
  return report;
}

IntervalReport ProjectedRejectNull(const ProjectedFit& fit, Eigen::Index j,
                                   TailMass alpha) {
  if (fit.degenerate) {
    throw Error(ErrorCode::kDegenerate, "zero residual: test undefined");
  }
  return ProjectedCi(fit, j, alpha);
}

std::int64_t MinRForPower(double sigma2, double beta_j, double sigma_min_sigma,
                          TailMass alpha, TailMass nu, std::int64_t p,
                          PowerConstants constants, std::optional<std::int64_t> n,
                          QuantileMode mode) {
  if (beta_j == 0.0) {
    throw Error(ErrorCode::kUndefinedPower, "beta_j = 0 has no power target");
  }
  if (!(sigma_min_sigma > 0.0) || !(sigma2 >= 0.0) || p < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "need sigma_min > 0, sigma2 >= 0 and p >= 1");
  }
  if (n && *n <= p) throw Error(ErrorCode::kInvalidParameter, "need n > p");
  const double scale = sigma2 / (beta_j * beta_j * sigma_min_sigma);
  const double floor_term = constants.c2 * std::log(1.0 / nu.value());
  auto bound = [&](double c, double tau) {
    const double excess = std::max(constants.c1 * scale * (c * c + tau * tau), floor_term);
    return p + static_cast<std::int64_t>(std::ceil(excess));
  };
  const std::int64_t r0 = bound(NormalQuantile(TailMass(1.0 - alpha.value() / 2.0)),
                                UpperTailQuantile(alpha));
  if (!n && mode == QuantileMode::kNormalShortcut) return r0;

  const double a = n ? static_cast<double>(r0 - p) / static_cast<double>(*n - p) : 0.0;
  const double shrink = std::exp(-a);
  const TailMass upper(1.0 - alpha.value() / 2.0 * shrink);
  const double c = mode == QuantileMode::kExact
                       ? StudentTQuantile(upper, Dof(std::max<std::int64_t>(r0 - p, 1)))
                       : NormalQuantile(upper);
  const double tau = UpperTailQuantile(TailMass(alpha.value() * shrink));
  return bound(c / shrink, tau / shrink);
}

std::int64_t ChooseR(std::int64_t n, std::int64_t p, double row_bound,
                     const PrivacyBudget& budget, double sigma_min_sigma_a,
                     double omega) {
  if (!(sigma_min_sigma_a > 0.0) || !(row_bound > 0.0) || !(omega > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "need sigma_min(Sigma_A) > 0, B > 0 and omega > 0");
  }
  const double log_inv_delta = std::log(1.0 / budget.delta());
  const double nd = static_cast<double>(n);
  if (n < p + 2 || nd <= log_inv_delta) {
    throw Error(ErrorCode::kInfeasible,
                "n=" + std::to_string(n) + " too small for p=" +
                    std::to_string(p) + " at this delta");
  }
  const double b2 = row_bound * row_bound;
  const double eps = budget.epsilon();
  const double gap = nd - log_inv_delta;
  const double branch = eps * eps * sigma_min_sigma_a * sigma_min_sigma_a /
                        (omega * b2 * b2 * log_inv_delta) * gap * gap;
  const double chosen = std::floor(std::min(nd, branch));
  return std::max<std::int64_t>(static_cast<std::int64_t>(chosen), p + 2);
}

double GateConsistentOmega(double delta, double c_gate) {
  if (!(delta > 0.0 && delta < 1.0) || !(c_gate > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "need delta in (0,1), c_gate > 0");
  }
  return 128.0 * std::pow(c_gate, 4) * std::log(8.0 / delta) / std::log(1.0 / delta);
}

SigmaMinEstimate PrivateSigmaMinEstimate(const BoundedDataset& a,
                                         const PrivacyBudget& budget,
                                         TailMass nu, Rng& rng,
                                         BudgetLedger* ledger) {
  const double s = MinSingularValue(a.data());
  const double b2 = a.row_bound() * a.row_bound();
  SigmaMinEstimate out;
  out.lambda = s * s + SampleLaplace(4.0 * b2 / budget.epsilon(), rng);
  out.lower_bound = out.lambda - 4.0 * b2 * std::log(1.0 / nu.value()) / budget.epsilon();
  if (ledger) ledger->Record("sigma_min_estimate", budget);
  return out;
}

}  // namespace dplr
