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

#include "dplr/analyze_gauss.h"

#include <cmath>

#include "dplr/error.h"
#include "dplr/json_util.h"
#include "dplr/matrix_kernels.h"

namespace dplr {

namespace {

double SmallestEigenvalue(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double DofDenominator(const AgRelease& release, TailMass nu) {
  const double root =
      std::sqrt(static_cast<double>(release.n_public - release.p)) -
      2.0 * std::sqrt(std::log(16.0 / nu.value()));
  if (!(root > 0.0)) {
    throw Error(ErrorCode::kPreconditionFailed,
                "n - p too small for the variance bound at this nu");
  }
  return root * root;
}

}  // namespace

double AgNoiseScale(double row_bound, const PrivacyBudget& budget) {
  if (!(row_bound > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "row bound must be positive");
  }
  return row_bound * row_bound * std::sqrt(2.0 * std::log(1.25 / budget.delta())) /
         budget.epsilon();
}

AgRelease MakeAgRelease(const BoundedDataset& a, const PrivacyBudget& budget,
                        std::uint64_t seed, const AgOptions& options) {
  const FeatureLabel split = SplitAtLabel(a.data(), a.label_column());
  const Eigen::Index p = split.features.cols();
  Eigen::MatrixXd joined(a.rows(), p + 1);
  joined << split.features, split.label;
  Eigen::MatrixXd gram = Gram(joined);

  AgRelease out;
  out.delta_noise = options.delta_override ? *options.delta_override
                                           : AgNoiseScale(a.row_bound(), budget);
  if (!(out.delta_noise >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "noise scale must be >= 0");
  }
  Rng rng(seed);
  for (Eigen::Index i = 0; i <= p; ++i) {
    for (Eigen::Index k = i; k <= p; ++k) {
      const double noise = out.delta_noise * rng.Normal();
      gram(i, k) += noise;
      if (k != i) gram(k, i) = gram(i, k);
    }
  }
  out.noisy_xtx = gram.topLeftCorner(p, p);
  out.noisy_xty = gram.col(p).head(p);
  out.noisy_yty = gram(p, p);
  out.n_public = a.rows();
  out.p = p;
  out.epsilon = budget.epsilon();
  out.delta = budget.delta();
  out.seed = seed;
  if (options.ledger) options.ledger->Record("analyze_gauss", budget);
  return out;
}

AgFit FitAg(const AgRelease& release) {
  const double lambda_min = SmallestEigenvalue(release.noisy_xtx);
  if (!(lambda_min > 0.0)) {
    throw Error(ErrorCode::kNotPsd,
                "noisy X^T X is not positive definite (smallest eigenvalue " +
                    FormatDouble(lambda_min) + ")");
  }
  const SpdInverse<double> inv(release.noisy_xtx);
  AgFit fit;
  fit.beta_ag = inv.Solve(release.noisy_xty);
  fit.zeta2_ag = release.noisy_yty - release.noisy_xty.dot(fit.beta_ag);
  fit.zeta2_negative = fit.zeta2_ag < 0.0;
  fit.xtx_inverse = inv.Inverse();
  return fit;
}

double AgVarianceUpperBound(const AgRelease& release, double row_bound,
                            TailMass nu, double eta, double constant_c) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "eta must lie in (0, 1)");
  }
  const double pd = static_cast<double>(release.p);
  const double log_inv_nu = std::log(1.0 / nu.value());
  const double delta = release.delta_noise;
  const double margin = SmallestEigenvalue(release.noisy_xtx) -
                        delta * std::sqrt(pd * log_inv_nu) / eta;
  if (!(margin > 0.0)) {
    throw Error(ErrorCode::kPreconditionFailed,
                "smallest eigenvalue of the noisy Gram is within the noise "
                "margin (margin " + FormatDouble(margin) + ")");
  }
  const double denom = DofDenominator(release, nu);
  const AgFit fit = FitAg(release);
  const double slack =
      delta * row_bound * row_bound * std::sqrt(pd) / (1.0 - eta) * std::sqrt(log_inv_nu) +
      delta * delta * fit.xtx_inverse.norm() * std::log(pd / nu.value());
  return (fit.zeta2_ag + constant_c * slack) / denom;
}

double AgSigmaMle(const AgRelease& release) {
  const AgFit fit = FitAg(release);
  return (fit.zeta2_ag + release.delta_noise * release.delta_noise *
                             fit.xtx_inverse.norm()) /
         static_cast<double>(release.n_public - release.p);
}

IntervalReport AgCi(const AgRelease& release, Eigen::Index j, double row_bound,
                    TailMass nu, double eta, const AgCiOptions& options) {
  if (j < 0 || j >= release.p) {
    throw Error(ErrorCode::kInvalidParameter,
                "coordinate " + std::to_string(j) + " out of range");
  }
  const double rho2 =
      AgVarianceUpperBound(release, row_bound, nu, eta, options.rho_constant);
  if (!(rho2 > 0.0)) {
    throw Error(ErrorCode::kPreconditionFailed,
                "variance bound is not positive (" + FormatDouble(rho2) + ")");
  }
  const AgFit fit = FitAg(release);
  const double pd = static_cast<double>(release.p);
  const double log_inv_nu = std::log(1.0 / nu.value());
  const double delta = release.delta_noise;
  const double inv_jj = fit.xtx_inverse(j, j);
  const double inv2_jj = fit.xtx_inverse.row(j).squaredNorm();
  const double width =
      row_bound * delta * std::sqrt(pd * inv2_jj) +
      std::sqrt(rho2) * std::sqrt(inv_jj + delta * inv2_jj * std::sqrt(pd * log_inv_nu));
  IntervalReport report;
  report.coordinate = j;
  report.center = fit.beta_ag(j);
  report.half_width = options.ci_constant * width * std::sqrt(log_inv_nu);
  report.alpha = nu.value();
  report.path = InferencePath::kAnalyzeGauss;
  return report;
}

std::string AgReleaseToJson(const AgRelease& release) {
  JsonWriter w;
  w.BeginObject()
      .Key("p").Integer(release.p)
      .Key("n_public").Integer(release.n_public)
      .Key("delta_noise").Number(release.delta_noise)
      .Key("epsilon").Number(release.epsilon)
      .Key("delta").Number(release.delta)
      .Key("noisy_xtx").BeginArray();
  for (Eigen::Index i = 0; i < release.p; ++i) {
    for (Eigen::Index k = i; k < release.p; ++k) w.Number(release.noisy_xtx(i, k));
  }
  w.EndArray()
      .Key("noisy_xty").RowMajorArray(release.noisy_xty.transpose())
      .Key("noisy_yty").Number(release.noisy_yty)
      .Key("seed").Integer(static_cast<std::int64_t>(release.seed))
      .EndObject();
  return w.str() + "\n";
}

AgRelease AgReleaseFromJson(const std::string& text) {
  const nlohmann::json doc = ParseJson(text, "analyze-gauss release");
  AgRelease out;
  out.p = RequireInteger(doc, "p");
  if (out.p < 1) throw Error(ErrorCode::kInvalidInput, "p must be positive");
  out.n_public = RequireInteger(doc, "n_public");
  out.delta_noise = RequireNumber(doc, "delta_noise");
  out.epsilon = RequireNumber(doc, "epsilon");
  out.delta = RequireNumber(doc, "delta");
  out.noisy_yty = RequireNumber(doc, "noisy_yty");
  out.seed = static_cast<std::uint64_t>(RequireInteger(doc, "seed"));
  const Eigen::Index p = out.p;
  const Eigen::VectorXd upper =
      NumberVector(RequireField(doc, "noisy_xtx"), "noisy_xtx");
  if (upper.size() != p * (p + 1) / 2) {
    throw Error(ErrorCode::kInvalidInput, "noisy_xtx must hold p(p+1)/2 entries");
  }
  out.noisy_xtx.resize(p, p);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index k = i; k < p; ++k) {
      out.noisy_xtx(i, k) = upper(idx);
      out.noisy_xtx(k, i) = upper(idx++);
    }
  }
  out.noisy_xty = NumberVector(RequireField(doc, "noisy_xty"), "noisy_xty");
  if (out.noisy_xty.size() != p) {
    throw Error(ErrorCode::kInvalidInput, "noisy_xty must hold p entries");
  }
  if (out.n_public <= p) {
    throw Error(ErrorCode::kInvalidInput, "n_public must exceed p");
  }
  return out;
}

}  // namespace dplr
