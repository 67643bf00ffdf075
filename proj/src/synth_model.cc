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

#include "dplr/synth_model.h"

#include <cmath>
#include <string>

#include "dplr/error.h"
#include "dplr/json_util.h"
#include "dplr/matrix_kernels.h"

namespace dplr {

ModelParams IsotropicModel(Eigen::Index p, Eigen::Index j, double beta_j,
                           double sigma2) {
  if (p < 1 || j < 0 || j >= p) {
    throw Error(ErrorCode::kInvalidParameter, "need p >= 1 and 0 <= j < p");
  }
  ModelParams model;
  model.sigma = Eigen::MatrixXd::Identity(p, p);
  model.beta = Eigen::VectorXd::Zero(p);
  model.beta(j) = beta_j;
  model.sigma2 = sigma2;
  return model;
}

Eigen::MatrixXd ValidateModel(const ModelParams& model) {
  const Eigen::Index p = model.p();
  if (p < 1 || model.sigma.rows() != p || model.sigma.cols() != p) {
    throw Error(ErrorCode::kInvalidParameter,
                "invalid model: Sigma must be p x p with p = len(beta) >= 1");
  }
  RequireFinite(model.sigma, "Sigma");
  RequireFinite(model.beta, "beta");
  if (!(model.sigma2 > 0.0) || !std::isfinite(model.sigma2)) {
    throw Error(ErrorCode::kInvalidParameter, "invalid model: sigma2 must be > 0");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrize(model.sigma));
  const double smallest = eig.eigenvalues()(0);
  if (!(smallest > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "invalid model: Sigma is not positive definite (eigenvalue " +
                    FormatDouble(smallest) + ")");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

Eigen::MatrixXd SyntheticData::Joined() const {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a << x, y;
  return a;
}

SyntheticData GenerateDataset(const ModelParams& model, std::int64_t n, Rng& rng,
                              const GenerateOptions& options) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "n must be >= 1");
  const Eigen::MatrixXd root = ValidateModel(model);
  const double sigma2 = options.sigma2_override.value_or(model.sigma2);
  if (!(sigma2 >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "noise variance must be >= 0");
  }
  const double sd = std::sqrt(sigma2);
  const Eigen::Index p = model.p();
  Eigen::MatrixXd z(n, p);
  SyntheticData data;
  data.e.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) z(i, k) = rng.Normal();
    data.e(i) = sd * rng.Normal();
  }
  data.x = z * root;
  data.y = data.x * model.beta + data.e;
  return data;
}

Eigen::MatrixXd BuildSigmaA(const ModelParams& model) {
  ValidateModel(model);
  const Eigen::Index p = model.p();
  const Eigen::VectorXd sb = model.sigma * model.beta;
  Eigen::MatrixXd s(p + 1, p + 1);
  s.topLeftCorner(p, p) = model.sigma;
  s.topRightCorner(p, 1) = sb;
  s.bottomLeftCorner(1, p) = sb.transpose();
  s(p, p) = model.sigma2 + model.beta.dot(sb);
  return s;
}

double NaiveSigmaAMinBound(const ModelParams& model) {
  ValidateModel(model);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrize(model.sigma),
                                                     Eigen::EigenvaluesOnly);
  return std::min(eig.eigenvalues()(0), model.sigma2);
}

double SigmaAMinBound(const ModelParams& model) {
  const double b2 = model.beta.squaredNorm();
  const double shear = 2.0 / (2.0 + b2 + std::sqrt(b2 * b2 + 4.0 * b2));
  return NaiveSigmaAMinBound(model) * shear;
}

double EmpiricalRowBound(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0 || x.rows() != y.size()) {
    throw Error(ErrorCode::kInvalidInput, "need nonempty X and matching y");
  }
  return (x.rowwise().squaredNorm() + y.cwiseAbs2()).cwiseSqrt().maxCoeff();
}

double AnalyticRowBoundSquared(const ModelParams& model, std::int64_t n) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(BuildSigmaA(model),
                                                     Eigen::EigenvaluesOnly);
  return std::log(static_cast<double>(n) * static_cast<double>(model.p())) *
         eig.eigenvalues().maxCoeff();
}

nlohmann::ordered_json ModelToJson(const ModelParams& model) {
  nlohmann::ordered_json j;
  j["p"] = model.p();
  j["Sigma"] = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.sigma.rows(); ++i) {
    for (Eigen::Index k = 0; k < model.sigma.cols(); ++k) {
      j["Sigma"].push_back(model.sigma(i, k));
    }
  }
  j["beta"] = std::vector<double>(model.beta.data(), model.beta.data() + model.p());
  j["sigma2"] = model.sigma2;
  return j;
}

ModelParams ModelFromJson(const nlohmann::json& doc) {
  const std::int64_t p = RequireInteger(doc, "p");
  if (p < 1) throw Error(ErrorCode::kInvalidInput, "model p must be >= 1");
  ModelParams model;
  model.sigma = RowMajorMatrix(RequireField(doc, "Sigma"), p, p, "Sigma");
  model.beta = NumberVector(RequireField(doc, "beta"), "beta");
  model.sigma2 = RequireNumber(doc, "sigma2");
  if (model.beta.size() != p) {
    throw Error(ErrorCode::kInvalidInput, "beta must have p entries");
  }
  ValidateModel(model);
  return model;
}

std::string DatasetToCsv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  std::string out;
  for (Eigen::Index k = 0; k < x.cols(); ++k) out += "x" + std::to_string(k) + ",";
  out += "y\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) out += FormatDouble(x(i, k)) + ",";
    out += FormatDouble(y(i)) + "\n";
  }
  return out;
}

}  // namespace dplr
