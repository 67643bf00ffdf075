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
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dplr/csv_io.h"
#include "dplr/json_util.h"
#include "dplr/matrix_kernels.h"
#include "dplr/ols_core.h"
#include "dplr/rng.h"
#include "dplr/stats_kernels.h"
#include "test_util.h"

namespace dplr {
namespace {

using testing::JacobiEigenvalues;
using testing::RandomMatrix;
using testing::RandomSpd;

ModelParams RandomModel(Eigen::Index p, Rng& rng) {
  ModelParams model;
  model.sigma = RandomSpd(p, rng, 0.05 + rng.Uniform());
  model.beta = 2.0 * rng.Uniform() * RandomMatrix(p, 1, rng);
  model.sigma2 = 0.05 + 3.0 * rng.Uniform();
  return model;
}

Eigen::MatrixXd EmpiricalSecondMoment(const Eigen::MatrixXd& rows) {
  return rows.transpose() * rows / static_cast<double>(rows.rows());
}

TEST(GenerateDatasetTest, NoiselessLabels) {
  Rng rng(1);
  ModelParams model = RandomModel(4, rng);
  GenerateOptions options;
  options.sigma2_override = 0.0;
  const SyntheticData d = GenerateDataset(model, 50, rng, options);
  EXPECT_TRUE(d.e.isZero(0.0));
  EXPECT_TRUE(d.y == d.x * model.beta);
}

TEST(GenerateDatasetTest, CovarianceAndCrossMoments) {
  Rng rng(2);
  ModelParams model;
  model.sigma.resize(3, 3);
  model.sigma << 2.0, 0.5, 0.0, 0.5, 1.0, -0.3, 0.0, -0.3, 1.5;
  model.beta = Eigen::Vector3d(1.0, -2.0, 0.5);
  model.sigma2 = 0.7;
  const SyntheticData d = GenerateDataset(model, 100000, rng);
  const Eigen::MatrixXd cov = EmpiricalSecondMoment(d.x);
  EXPECT_LE((cov - model.sigma).norm(), 0.03 * model.sigma.norm());
  const Eigen::VectorXd xy = d.x.transpose() * d.y / 100000.0;
  const Eigen::VectorXd want = model.sigma * model.beta;
  EXPECT_LE((xy - want).norm(), 0.03 * want.norm());
  const Eigen::MatrixXd cov_a = EmpiricalSecondMoment(d.Joined());
  const Eigen::MatrixXd sigma_a = BuildSigmaA(model);
  EXPECT_LE((cov_a - sigma_a).norm(), 0.03 * sigma_a.norm());
  EXPECT_NEAR(d.e.squaredNorm() / 100000.0, 0.7, 0.7 * 0.03);
}

TEST(GenerateDatasetTest, Deterministic) {
  const ModelParams model = IsotropicModel(3, 1, 2.0, 1.0);
  Rng a(77), b(77), c(78);
  const SyntheticData da = GenerateDataset(model, 200, a);
  const SyntheticData db = GenerateDataset(model, 200, b);
  const SyntheticData dc = GenerateDataset(model, 200, c);
  EXPECT_EQ(DatasetToCsv(da.x, da.y), DatasetToCsv(db.x, db.y));
  EXPECT_TRUE(da.x == db.x && da.y == db.y && da.e == db.e);
  EXPECT_FALSE(da.x == dc.x);
}

TEST(GenerateDatasetTest, InvalidModels) {
  Rng rng(3);
  ModelParams model = IsotropicModel(2, 0, 1.0, 1.0);
  model.sigma(1, 1) = -1.0;
  EXPECT_DPLR_ERROR(GenerateDataset(model, 10, rng), ErrorCode::kInvalidParameter);
  try {
    ValidateModel(model);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("eigenvalue -1"), std::string::npos) << e.what();
  }
  model = IsotropicModel(2, 0, 1.0, 0.0);
  EXPECT_DPLR_ERROR(GenerateDataset(model, 10, rng), ErrorCode::kInvalidParameter);
  EXPECT_DPLR_ERROR(GenerateDataset(IsotropicModel(2, 0, 1.0, 1.0), 0, rng),
                    ErrorCode::kInvalidParameter);
  EXPECT_DPLR_ERROR(IsotropicModel(2, 2, 1.0, 1.0), ErrorCode::kInvalidParameter);
}

TEST(GenerateDatasetTest, ResidualNormIsScaledChiSquared) {
  const ModelParams model = IsotropicModel(4, 2, 1.5, 2.0);
  const Interval chi = Chi2TailInterval(Dof(296), TailMass(0.01));
  int inside = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng = Rng::ForTrial(4, s);
    const SyntheticData d = GenerateDataset(model, 300, rng);
    const double z = FitOls(d.x, d.y).zeta_norm2;
    inside += (2.0 * chi.lo <= z && z <= 2.0 * chi.hi);
  }
  EXPECT_GE(inside, 0.99 * seeds);
}

TEST(BuildSigmaATest, Blocks) {
  const ModelParams zero_beta = IsotropicModel(3, 0, 0.0, 2.5);
  Eigen::MatrixXd want = Eigen::MatrixXd::Identity(4, 4);
  want(3, 3) = 2.5;
  EXPECT_TRUE(BuildSigmaA(zero_beta) == want);

  const ModelParams unit = IsotropicModel(3, 0, 1.0, 1.0);
  const Eigen::MatrixXd s = BuildSigmaA(unit);
  EXPECT_EQ(s(3, 3), 2.0);
  EXPECT_TRUE(s.topRightCorner(3, 1) == Eigen::Vector3d(1.0, 0.0, 0.0));
  EXPECT_TRUE(s.bottomLeftCorner(1, 3) == Eigen::RowVector3d(1.0, 0.0, 0.0));
  EXPECT_TRUE(s.topLeftCorner(3, 3) == Eigen::Matrix3d::Identity());
}

TEST(SigmaAMinBoundTest, Examples) {
  ModelParams model = IsotropicModel(3, 0, 0.0, 4.0);
  EXPECT_DOUBLE_EQ(SigmaAMinBound(model), 1.0);
  model.sigma *= 9.0;
  EXPECT_DOUBLE_EQ(SigmaAMinBound(model), 4.0);
  EXPECT_DOUBLE_EQ(NaiveSigmaAMinBound(model), 4.0);
}

// The two-term minimum alone ignores the shear introduced by beta.
TEST(SigmaAMinBoundTest, NaiveFormFailsWithSignal) {
  const ModelParams model = IsotropicModel(5, 0, 1.0, 1.0);
  const double exact = JacobiEigenvalues(BuildSigmaA(model)).minCoeff();
  EXPECT_NEAR(exact, (3.0 - std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_GT(NaiveSigmaAMinBound(model), exact);
  EXPECT_LE(SigmaAMinBound(model), exact + 1e-12);
}

TEST(SigmaAMinBoundTest, NeverExceedsExactOnRandomModels) {
  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const ModelParams model = RandomModel(1 + rep % 6, rng);
    const Eigen::MatrixXd s = BuildSigmaA(model);
    const double exact = MinSingularValue(s);
    EXPECT_LE(SigmaAMinBound(model), exact * (1.0 + 1e-10)) << "rep " << rep;
    EXPECT_NEAR(exact, JacobiEigenvalues(s).minCoeff(), 1e-9 * s.norm());
  }
}

TEST(RowBoundTest, Examples) {
  Eigen::MatrixXd x(1, 1);
  x << 3.0;
  EXPECT_DOUBLE_EQ(EmpiricalRowBound(x, Eigen::VectorXd::Constant(1, 4.0)), 5.0);
  EXPECT_EQ(EmpiricalRowBound(Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(4)), 0.0);
  EXPECT_DPLR_ERROR(EmpiricalRowBound(Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0)),
                    ErrorCode::kInvalidInput);
}

TEST(RowBoundTest, AnalyticBoundHoldsWithFactorFour) {
  const ModelParams model = IsotropicModel(5, 1, 1.0, 1.0);
  const double analytic = AnalyticRowBoundSquared(model, 10000);
  const double sigma_max = JacobiEigenvalues(BuildSigmaA(model)).maxCoeff();
  EXPECT_NEAR(analytic, std::log(50000.0) * sigma_max, 1e-9);
  int within = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    Rng rng = Rng::ForTrial(6, s);
    const SyntheticData d = GenerateDataset(model, 10000, rng);
    const double b = EmpiricalRowBound(d.x, d.y);
    within += b * b <= 4.0 * analytic;
  }
  EXPECT_GE(within, 0.99 * seeds);
}

TEST(ModelJsonTest, RoundTrip) {
  Rng rng(7);
  const ModelParams model = RandomModel(3, rng);
  const std::string text = ModelToJson(model).dump();
  const ModelParams back = ModelFromJson(nlohmann::json::parse(text));
  EXPECT_TRUE(back.sigma == model.sigma);
  EXPECT_TRUE(back.beta == model.beta);
  EXPECT_EQ(back.sigma2, model.sigma2);
  EXPECT_DPLR_ERROR(ModelFromJson(nlohmann::json::parse(R"({"p": 2, "Sigma": [1, 0, 0, 1],
      "beta": [1], "sigma2": 1})")),
                    ErrorCode::kInvalidInput);
  EXPECT_DPLR_ERROR(ModelFromJson(nlohmann::json::parse(R"({"p": 1, "Sigma": [-1],
      "beta": [1], "sigma2": 1})")),
                    ErrorCode::kInvalidParameter);
  EXPECT_DPLR_ERROR(ModelFromJson(nlohmann::json::parse(R"({"p": 1, "beta": [1]})")),
                    ErrorCode::kInvalidInput);
}

TEST(DatasetCsvTest, HeaderAndRoundTrip) {
  Rng rng(8);
  const SyntheticData d = GenerateDataset(IsotropicModel(2, 0, 1.0, 1.0), 5, rng);
  const std::string csv = DatasetToCsv(d.x, d.y);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x0,x1,y");
  const CsvTable table = ParseCsv(csv);
  ASSERT_EQ(table.values.rows(), 5);
  EXPECT_TRUE(table.values.leftCols(2) == d.x);
  EXPECT_TRUE(table.values.col(2) == d.y);
}

}  // namespace
}  // namespace dplr
