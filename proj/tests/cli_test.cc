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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dplr/json_util.h"
#include "dplr/privacy_ledger.h"
#include "dplr/rng.h"
#include "dplr/synth_model.h"
#include "json.hpp"

namespace dplr {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::path(::testing::TempDir()) /
           ("dplr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    Rng rng(5);
    const SyntheticData d = GenerateDataset(IsotropicModel(3, 0, 1.0, 1.0), 400, rng);
    data_ = Write("data.csv", DatasetToCsv(d.x, d.y));
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string Write(const std::string& name, const std::string& content) const {
    std::ofstream(Path(name)) << content;
    return Path(name);
  }

  // Runs the CLI with stdout to out.txt; returns the exit status.
  int Run(const std::string& args) {
    const std::string cmd = std::string(DPLR_CLI_PATH) + " " + args + " > " + Path("out.txt") +
                            " 2> " + Path("err.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Stdout() const { return ReadTextFile(Path("out.txt")); }
  std::string Stderr() const { return ReadTextFile(Path("err.txt")); }

  std::filesystem::path dir_;
  std::string data_;
};

TEST_F(CliTest, UsageErrorsAndHelp) {
  EXPECT_EQ(Run(""), 2);
  EXPECT_EQ(Run("--help"), 0);
  EXPECT_EQ(Run("bogus"), 2);
  EXPECT_EQ(Run("fit-ols"), 2);
  EXPECT_EQ(Run("fit-ols --input " + data_ + " --format xml"), 2);
}

TEST_F(CliTest, FitOlsJsonAndCsv) {
  ASSERT_EQ(Run("fit-ols --input " + data_ + " --two-sided"), 0) << Stderr();
  const nlohmann::json doc = nlohmann::json::parse(Stdout());
  EXPECT_EQ(doc["n"], 400);
  EXPECT_EQ(doc["reports"].size(), 3u);
  EXPECT_EQ(doc["reports"][0]["path"], "ols");
  EXPECT_TRUE(doc["reports"][0]["rejected"].get<bool>());
  ASSERT_EQ(Run("fit-ols --input " + data_ + " --coordinate 1 --out " + Path("r.csv")), 0);
  const std::string csv = ReadTextFile(Path("r.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST_F(CliTest, DegenerateFitExitsFour) {
  const std::string exact = Write("exact.csv", "a,b,y\n1,0,1\n0,1,2\n1,1,3\n2,1,4\n");
  EXPECT_EQ(Run("fit-ols --input " + exact), 4);
  EXPECT_TRUE(nlohmann::json::parse(Stdout())["degenerate"].get<bool>());
}

TEST_F(CliTest, InvalidInputExitsTwo) {
  const std::string bad = Write("bad.csv", "a,y\n1,2\n1,x\n");
  EXPECT_EQ(Run("fit-ols --input " + bad), 2);
  EXPECT_NE(Stderr().find("line 3"), std::string::npos) << Stderr();
  EXPECT_EQ(Run("project --input " + data_ + " --r 50"), 2);
  EXPECT_NE(Stderr().find("--bound"), std::string::npos);
  EXPECT_EQ(Run("--bound 0.5 project --input " + data_ + " --r 50"), 2);
  EXPECT_NE(Stderr().find("exceed bound"), std::string::npos);
  EXPECT_EQ(Run("--epsilon -1 --bound 100 project --input " + data_ + " --r 50"), 2);
  EXPECT_EQ(Run("fit-projected --release " + Write("junk.json", "{")), 2);
  EXPECT_EQ(Run("simulate"), 2);
}

TEST_F(CliTest, InfeasibleRegimeExitsThree) {
  EXPECT_EQ(Run("--bound 1 choose-r --n 4 --p 3 --sigma-min 1"), 3);
  EXPECT_EQ(Run("--bound 1 choose-r --n 5 --p 3 --sigma-min 1"), 3);
  ASSERT_EQ(Run("--bound 1 --epsilon 1e6 choose-r --n 1000 --p 3 --sigma-min 1"), 0);
  EXPECT_EQ(nlohmann::json::parse(Stdout())["r"], 1000);
}

TEST_F(CliTest, ProjectThenFitAndLedger) {
  const std::string ledger = Path("ledger.json");
  const std::string release = Path("release.json");
  ASSERT_EQ(Run("--bound 100 --epsilon 1e6 --seed 3 --ledger " + ledger + " --out " + release +
                " project --input " + data_ + " --r 60"),
            0)
      << Stderr();
  EXPECT_NE(Stderr().find("unaltered"), std::string::npos);
  ASSERT_EQ(Run("fit-projected --release " + release), 0) << Stderr();
  const nlohmann::json fit = nlohmann::json::parse(Stdout());
  EXPECT_EQ(fit["r"], 60);
  EXPECT_EQ(fit["reports"][0]["path"], "projected");
  EXPECT_EQ(Run("fit-ridge --release " + release), 2);
  EXPECT_NE(Stderr().find("fit-projected"), std::string::npos);

  ASSERT_EQ(Run("--bound 100 --epsilon 0.001 --ledger " + ledger + " --out " + release +
                " project --input " + data_ + " --r 60"),
            0);
  EXPECT_NE(Stderr().find("released altered"), std::string::npos);
  ASSERT_EQ(Run("fit-ridge --release " + release), 0) << Stderr();
  EXPECT_EQ(nlohmann::json::parse(Stdout())["reports"][0]["path"], "ridge");
  EXPECT_EQ(Run("fit-projected --release " + release), 2);

  const BudgetLedger back = BudgetLedger::Load(ledger);
  ASSERT_EQ(back.entries().size(), 2u);
  EXPECT_EQ(back.entries()[0].mechanism, "jl_projection");
  EXPECT_DOUBLE_EQ(back.Totals().epsilon, 1e6 + 0.001);
  EXPECT_DOUBLE_EQ(back.Totals().delta, 2e-6);
}

TEST_F(CliTest, AnalyzeGaussReleaseAndAnalyze) {
  const std::string ledger = Path("ledger.json");
  const std::string release = Path("ag.json");
  ASSERT_EQ(Run("--bound 100 --epsilon 1e4 --ledger " + ledger + " --out " + release +
                " analyze-gauss --input " + data_),
            0)
      << Stderr();
  EXPECT_EQ(Run("analyze-gauss --release " + release), 2);
  ASSERT_EQ(Run("--bound 100 analyze-gauss --release " + release + " --nu 0.1"), 0) << Stderr();
  const nlohmann::json doc = nlohmann::json::parse(Stdout());
  EXPECT_EQ(doc["reports"].size(), 3u);
  EXPECT_EQ(doc["ci_constant"], 4.0);
  EXPECT_EQ(BudgetLedger::Load(ledger).entries().size(), 1u);
  EXPECT_EQ(Run("analyze-gauss --input " + data_ + " --release " + release), 2);
}

TEST_F(CliTest, SimulateAndPower) {
  const std::string base = R"({"scenario": "power", "model": {"isotropic": {"p": 2, "j": 0,
      "beta_j": 0.3, "sigma2": 1}}, "n": 200, "r": 40, "trials": 20, "seed": 4, "threads": 1})";
  ASSERT_EQ(Run("--config " + Write("sim.json", base) + " simulate"), 0) << Stderr();
  const nlohmann::json report = nlohmann::json::parse(Stdout());
  EXPECT_EQ(report["scenario"], "power");
  EXPECT_TRUE(report["metrics"].contains("rejection_rate"));
  const std::string grid =
      "{\"base\": " + base + R"(, "cells": [{"n": 200}, {"n": 400, "epsilon": 2}]})";
  ASSERT_EQ(Run("--config " + Write("grid.json", grid) + " power"), 0) << Stderr();
  const std::string table = Stdout();
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "n,r,epsilon,trials,rejection_rate,rejection_se,altered_rate,ols_min_n,"
            "projected_min_r");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
}

TEST_F(CliTest, PrivateChooseRRecordsSpend) {
  const std::string ledger = Path("ledger.json");
  ASSERT_EQ(Run("--bound 100 --epsilon 1e6 --ledger " + ledger + " choose-r --input " + data_),
            0)
      << Stderr();
  const nlohmann::json doc = nlohmann::json::parse(Stdout());
  EXPECT_EQ(doc["n"], 400);
  EXPECT_EQ(doc["p"], 3);
  EXPECT_GT(doc["private_lower_bound"].get<double>(), 0.0);
  EXPECT_EQ(BudgetLedger::Load(ledger).entries()[0].mechanism, "sigma_min_estimate");
}

}  // namespace
}  // namespace dplr
