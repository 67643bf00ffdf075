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

// The private Johnson-Lindenstrauss release: a Laplace-noised test on the
// smallest singular value decides whether the data is projected as is or
// after appending w * I, then an r-row Gaussian projection is published.

#ifndef DPLR_PRIVATE_PROJECTION_H_
#define DPLR_PRIVATE_PROJECTION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dplr/privacy_ledger.h"
#include "dplr/rng.h"

namespace dplr {

enum class BoundPolicy { kReject, kClip };

// An n x d data matrix whose rows all have l2 norm at most row_bound. One
// column holds the regression label.
class BoundedDataset {
 public:
  // Rows above the bound are refused under kReject and rescaled to norm
  // exactly row_bound under kClip.
  BoundedDataset(Eigen::MatrixXd data, double row_bound,
                 Eigen::Index label_column,
                 BoundPolicy policy = BoundPolicy::kReject);

  const Eigen::MatrixXd& data() const { return data_; }
  double row_bound() const { return row_bound_; }
  Eigen::Index label_column() const { return label_column_; }
  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return data_.cols(); }
  std::int64_t clipped_rows() const { return clipped_rows_; }

  Eigen::MatrixXd Features() const;
  Eigen::VectorXd Label() const;

 private:
  Eigen::MatrixXd data_;
  double row_bound_;
  Eigen::Index label_column_;
  std::int64_t clipped_rows_ = 0;
};

struct FeatureLabel {
  Eigen::MatrixXd features;
  Eigen::VectorXd label;
};

// Splits the columns of `m` into the label column and the rest, keeping
// the order of the remaining columns.
FeatureLabel SplitAtLabel(const Eigen::MatrixXd& m, Eigen::Index label_column);

enum class WFormula {
  kAlgorithm,      // (8B^2/eps)(sqrt(2 r ln(8/delta)) + 2 ln(8/delta))
  kCompatibility,  // (8B^2/eps)(sqrt(2 r ln(8/delta)) + ln(8/delta))
};

double NoiseMagnitudeW(double row_bound, const PrivacyBudget& budget,
                       std::int64_t r,
                       WFormula formula = WFormula::kAlgorithm);

struct GateOutcome {
  bool passed = false;
  double laplace_noise = 0.0;  // Z ~ Lap(4B^2/eps)
  double threshold = 0.0;      // w^2 + Z + 4B^2 ln(1/delta)/eps
  double sigma_min_sq = 0.0;
};

// Passes iff sigma_min_sq > w^2 + Z + 4B^2 ln(1/delta)/eps. Draws exactly
// one variate from `rng`.
GateOutcome PtrGateFromSigmaMinSq(double sigma_min_sq, double row_bound,
                                  const PrivacyBudget& budget, double w,
                                  Rng& rng);
GateOutcome PtrGate(const Eigen::MatrixXd& a, double row_bound,
                    const PrivacyBudget& budget, double w, Rng& rng);
GateOutcome PtrGate(const BoundedDataset& a, const PrivacyBudget& budget,
                    double w, Rng& rng);

// [A; w I_d]. Requires w >= 0.
Eigen::MatrixXd AppendRegularizer(const Eigen::MatrixXd& a, double w);

enum class SketchMethod {
  // R * A with R drawn entry by entry, in blocks of consecutive columns.
  kExplicit,
  // Rows of R * A are i.i.d. N(0, A^T A) for Gaussian R, so the sketch is
  // drawn as G * F with G r x d Gaussian and F^T F = A^T A. Same law as
  // kExplicit at O(r d) draws instead of O(r n).
  kGramFactor,
};

Eigen::MatrixXd JlSketch(const Eigen::MatrixXd& a, Eigen::Index r, Rng& rng,
                         SketchMethod method = SketchMethod::kExplicit);

// r rows distributed as N(0, gram), from a symmetric PSD `gram`.
Eigen::MatrixXd GramFactorSketch(const Eigen::MatrixXd& gram, Eigen::Index r,
                                 Rng& rng);

struct ProjectionRelease {
  Eigen::MatrixXd sketch;  // r x d
  bool altered = false;
  Eigen::Index r = 0;
  double w = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t n_public = 0;
  std::uint64_t seed = 0;
  Eigen::Index label_column = 0;
  // Debug trace of the gate. Never serialized.
  GateOutcome gate;

  Eigen::Index d() const { return sketch.cols(); }
};

struct ProjectOptions {
  WFormula w_formula = WFormula::kAlgorithm;
  SketchMethod sketch = SketchMethod::kExplicit;
  // Test hook replacing the Gaussian matrix. Called as hook(r, m) where m
  // is the row count of the matrix being projected (n, or n + d when
  // altered); must return an r x m matrix.
  std::function<Eigen::MatrixXd(Eigen::Index, Eigen::Index)> projection_hook;
  // Test hook replacing the computed w.
  std::optional<double> w_override;
  // Skips the gate and takes the given branch.
  std::optional<bool> force_altered;
  // Receives one entry per release when set.
  BudgetLedger* ledger = nullptr;
};

ProjectionRelease Project(const BoundedDataset& a, const PrivacyBudget& budget,
                          Eigen::Index r, std::uint64_t seed,
                          const ProjectOptions& options = {});

// {r, d, altered, w, epsilon, delta, n_public, seed, label_column, sketch}
// with the sketch flattened row-major and every double at 17 significant
// digits.
std::string ReleaseToJson(const ProjectionRelease& release);
ProjectionRelease ReleaseFromJson(const std::string& text);

}  // namespace dplr

#endif  // DPLR_PRIVATE_PROJECTION_H_
