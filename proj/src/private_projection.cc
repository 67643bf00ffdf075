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

#include "dplr/private_projection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dplr/error.h"
#include "dplr/json_util.h"
#include "dplr/matrix_kernels.h"
#include "dplr/stats_kernels.h"

namespace dplr {

namespace {

// Entries of R generated per block in the explicit sketch.
constexpr Eigen::Index kSketchBlockEntries = Eigen::Index{1} << 22;

void CheckRowBound(double row_bound) {
  if (!(row_bound > 0.0) || !std::isfinite(row_bound)) {
    throw Error(ErrorCode::kInvalidParameter, "row bound must be positive");
  }
}

}  // namespace

BoundedDataset::BoundedDataset(Eigen::MatrixXd data, double row_bound,
                               Eigen::Index label_column, BoundPolicy policy)
    : data_(std::move(data)), row_bound_(row_bound), label_column_(label_column) {
  CheckRowBound(row_bound);
  if (data_.rows() == 0 || data_.cols() < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "dataset needs at least one row and two columns");
  }
  if (label_column < 0 || label_column >= data_.cols()) {
    throw Error(ErrorCode::kInvalidParameter,
                "label column " + std::to_string(label_column) +
                    " out of range");
  }
  RequireFinite(data_, "dataset");
  const double limit = row_bound * (1.0 + 1e-12);
  std::string refused;
  std::int64_t refused_count = 0;
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    const double norm = data_.row(i).norm();
    if (norm <= limit) continue;
    if (policy == BoundPolicy::kClip) {
      data_.row(i) *= row_bound / norm;
      ++clipped_rows_;
      continue;
    }
    if (refused_count++ < 10) {
      if (!refused.empty()) refused += ", ";
      refused += "row " + std::to_string(i) + " (norm " + FormatDouble(norm) + ")";
    }
  }
  if (refused_count > 0) {
    throw Error(ErrorCode::kRefusedRow,
                std::to_string(refused_count) + " row(s) exceed bound " +
                    FormatDouble(row_bound) + ": " + refused);
  }
}

Eigen::MatrixXd BoundedDataset::Features() const {
  return SplitAtLabel(data_, label_column_).features;
}

Eigen::VectorXd BoundedDataset::Label() const { return data_.col(label_column_); }

FeatureLabel SplitAtLabel(const Eigen::MatrixXd& m, Eigen::Index label_column) {
  if (label_column < 0 || label_column >= m.cols()) {
    throw Error(ErrorCode::kInvalidParameter, "label column out of range");
  }
  FeatureLabel out;
  out.features.resize(m.rows(), m.cols() - 1);
  out.features.leftCols(label_column) = m.leftCols(label_column);
  out.features.rightCols(m.cols() - 1 - label_column) =
      m.rightCols(m.cols() - 1 - label_column);
  out.label = m.col(label_column);
  return out;
}

double NoiseMagnitudeW(double row_bound, const PrivacyBudget& budget,
                       std::int64_t r, WFormula formula) {
  CheckRowBound(row_bound);
  if (r < 1) throw Error(ErrorCode::kInvalidParameter, "r must be >= 1");
  const double log_term = std::log(8.0 / budget.delta());
  const double additive = formula == WFormula::kAlgorithm ? 2.0 * log_term : log_term;
  const double w2 = 8.0 * row_bound * row_bound / budget.epsilon() *
                    (std::sqrt(2.0 * static_cast<double>(r) * log_term) + additive);
  return std::sqrt(w2);
}

GateOutcome PtrGateFromSigmaMinSq(double sigma_min_sq, double row_bound,
                                  const PrivacyBudget& budget, double w,
                                  Rng& rng) {
  CheckRowBound(row_bound);
  const double b2 = row_bound * row_bound;
  GateOutcome out;
  out.sigma_min_sq = sigma_min_sq;
  out.laplace_noise = SampleLaplace(4.0 * b2 / budget.epsilon(), rng);
  out.threshold = w * w + out.laplace_noise +
                  4.0 * b2 * std::log(1.0 / budget.delta()) / budget.epsilon();
  out.passed = sigma_min_sq > out.threshold;
  return out;
}

GateOutcome PtrGate(const Eigen::MatrixXd& a, double row_bound,
                    const PrivacyBudget& budget, double w, Rng& rng) {
  const double s = MinSingularValue(a);
  return PtrGateFromSigmaMinSq(s * s, row_bound, budget, w, rng);
}

GateOutcome PtrGate(const BoundedDataset& a, const PrivacyBudget& budget,
                    double w, Rng& rng) {
  return PtrGate(a.data(), a.row_bound(), budget, w, rng);
}

Eigen::MatrixXd AppendRegularizer(const Eigen::MatrixXd& a, double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidParameter, "w must be finite and >= 0");
  }
  Eigen::MatrixXd out(a.rows() + a.cols(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(a.cols()) = w * Eigen::MatrixXd::Identity(a.cols(), a.cols());
  return out;
}

Eigen::MatrixXd GramFactorSketch(const Eigen::MatrixXd& gram, Eigen::Index r,
                                 Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrize(gram));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = root.asDiagonal() * eig.eigenvectors().transpose();
  return SampleGaussianMatrix(r, gram.rows(), rng) * factor;
}

Eigen::MatrixXd JlSketch(const Eigen::MatrixXd& a, Eigen::Index r, Rng& rng,
                         SketchMethod method) {
  if (r < 1) throw Error(ErrorCode::kInvalidParameter, "r must be >= 1");
  if (method == SketchMethod::kGramFactor) return GramFactorSketch(Gram(a), r, rng);
  const Eigen::Index block = std::max<Eigen::Index>(1, kSketchBlockEntries / r);
  Eigen::MatrixXd sketch = Eigen::MatrixXd::Zero(r, a.cols());
  for (Eigen::Index start = 0; start < a.rows(); start += block) {
    const Eigen::Index len = std::min(block, a.rows() - start);
    sketch.noalias() += SampleGaussianMatrix(r, len, rng) * a.middleRows(start, len);
  }
  return sketch;
}

ProjectionRelease Project(const BoundedDataset& a, const PrivacyBudget& budget,
                          Eigen::Index r, std::uint64_t seed,
                          const ProjectOptions& options) {
  if (r < 1) throw Error(ErrorCode::kInvalidParameter, "r must be >= 1");
  Rng rng(seed);
  ProjectionRelease out;
  out.r = r;
  out.w = options.w_override ? *options.w_override
                             : NoiseMagnitudeW(a.row_bound(), budget, r,
                                               options.w_formula);
  out.epsilon = budget.epsilon();
  out.delta = budget.delta();
  out.n_public = a.rows();
  out.seed = seed;
  out.label_column = a.label_column();
  if (options.force_altered) {
    out.altered = *options.force_altered;
    out.gate.passed = !out.altered;
    out.gate.laplace_noise = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.gate = PtrGate(a, budget, out.w, rng);
    out.altered = !out.gate.passed;
  }

  if (options.projection_hook) {
    const Eigen::MatrixXd target =
        out.altered ? AppendRegularizer(a.data(), out.w) : a.data();
    const Eigen::MatrixXd proj = options.projection_hook(r, target.rows());
    if (proj.rows() != r || proj.cols() != target.rows()) {
      throw Error(ErrorCode::kInvalidParameter,
                  "projection hook returned a matrix of the wrong shape");
    }
    out.sketch = proj * target;
  } else if (options.sketch == SketchMethod::kGramFactor) {
    Eigen::MatrixXd gram = Gram(a.data());
    if (out.altered) gram.diagonal().array() += out.w * out.w;
    out.sketch = GramFactorSketch(gram, r, rng);
  } else {
    out.sketch = out.altered ? JlSketch(AppendRegularizer(a.data(), out.w), r, rng)
                             : JlSketch(a.data(), r, rng);
  }
  if (options.ledger) options.ledger->Record("jl_projection", budget);
  return out;
}

std::string ReleaseToJson(const ProjectionRelease& release) {
  JsonWriter w;
  w.BeginObject()
      .Key("r").Integer(release.r)
      .Key("d").Integer(release.d())
      .Key("altered").Bool(release.altered)
      .Key("w").Number(release.w)
      .Key("epsilon").Number(release.epsilon)
      .Key("delta").Number(release.delta)
      .Key("n_public").Integer(release.n_public)
      .Key("seed").Integer(static_cast<std::int64_t>(release.seed))
      .Key("label_column").Integer(release.label_column)
      .Key("sketch").RowMajorArray(release.sketch)
      .EndObject();
  return w.str() + "\n";
}

ProjectionRelease ReleaseFromJson(const std::string& text) {
  const nlohmann::json doc = ParseJson(text, "projection release");
  ProjectionRelease out;
  out.r = RequireInteger(doc, "r");
  const Eigen::Index d = RequireInteger(doc, "d");
  if (out.r < 1 || d < 2) {
    throw Error(ErrorCode::kInvalidInput, "release needs r >= 1 and d >= 2");
  }
  const nlohmann::json& altered = RequireField(doc, "altered");
  if (!altered.is_boolean()) {
    throw Error(ErrorCode::kInvalidInput, "field \"altered\" must be boolean");
  }
  out.altered = altered.get<bool>();
  out.w = RequireNumber(doc, "w");
  out.epsilon = RequireNumber(doc, "epsilon");
  out.delta = RequireNumber(doc, "delta");
  static_cast<void>(PrivacyBudget(out.epsilon, out.delta));
  out.n_public = RequireInteger(doc, "n_public");
  if (out.n_public < 1) {
    throw Error(ErrorCode::kInvalidInput, "n_public must be positive");
  }
  out.seed = static_cast<std::uint64_t>(RequireInteger(doc, "seed"));
  out.label_column = doc.contains("label_column")
                         ? RequireInteger(doc, "label_column")
                         : d - 1;
  if (out.label_column < 0 || out.label_column >= d) {
    throw Error(ErrorCode::kInvalidInput, "label_column out of range");
  }
  out.sketch = RowMajorMatrix(RequireField(doc, "sketch"), out.r, d, "sketch");
  out.gate.passed = !out.altered;
  return out;
}

}  // namespace dplr
