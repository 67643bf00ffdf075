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

// Gaussian-design regression model used to generate ground truth for the
// Monte Carlo checks: rows x ~ N(0, Sigma), y = x^T beta + e with
// e ~ N(0, sigma2).

#ifndef DPLR_SYNTH_MODEL_H_
#define DPLR_SYNTH_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dplr/rng.h"

#include "json.hpp"

namespace dplr {

struct ModelParams {
  Eigen::MatrixXd sigma;  // p x p, symmetric positive definite
  Eigen::VectorXd beta;
  double sigma2 = 1.0;

  Eigen::Index p() const { return beta.size(); }
};

// Sigma = I_p, beta = beta_j e_j.
ModelParams IsotropicModel(Eigen::Index p, Eigen::Index j, double beta_j,
                           double sigma2);

// Symmetric square root of Sigma. Throws kInvalidParameter naming the
// smallest eigenvalue when Sigma is not positive definite, and on any other
// malformed field.
Eigen::MatrixXd ValidateModel(const ModelParams& model);

struct SyntheticData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd e;  // ground-truth noise, for oracle checks only

  // [X y], label last.
  Eigen::MatrixXd Joined() const;
};

struct GenerateOptions {
  // Test hook replacing the model's noise variance.
  std::optional<double> sigma2_override;
};

// Draws row by row: p standard normals for x, then one for e.
SyntheticData GenerateDataset(const ModelParams& model, std::int64_t n,
                              Rng& rng, const GenerateOptions& options = {});

// Covariance of a joint row (x, y):
// [[Sigma, Sigma beta], [beta^T Sigma, sigma2 + beta^T Sigma beta]].
Eigen::MatrixXd BuildSigmaA(const ModelParams& model);

// min{lambda_min(Sigma), sigma2}. Not a lower bound on lambda_min(Sigma_A)
// once beta != 0; see SigmaAMinBound.
double NaiveSigmaAMinBound(const ModelParams& model);

// min{lambda_min(Sigma), sigma2} * s(||beta||), where
// s(b) = 2 / (2 + b^2 + sqrt(b^4 + 4 b^2)) is the squared smallest singular
// value of [[I, beta], [0, 1]]. Always <= lambda_min(Sigma_A), and equal to
// the naive bound at beta = 0.
double SigmaAMinBound(const ModelParams& model);

// Largest l2 norm over the rows of [X y].
double EmpiricalRowBound(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// log(n p) * lambda_max(Sigma_A), a high-probability scale for B^2.
double AnalyticRowBoundSquared(const ModelParams& model, std::int64_t n);

// {p, Sigma (row-major), beta, sigma2}
nlohmann::ordered_json ModelToJson(const ModelParams& model);
ModelParams ModelFromJson(const nlohmann::json& doc);

// Header x0,...,x{p-1},y then one row per sample at 17 significant digits.
std::string DatasetToCsv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace dplr

#endif  // DPLR_SYNTH_MODEL_H_
