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

#include "dplr/privacy_ledger.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>

#include "dplr/error.h"
#include "dplr/json_util.h"

namespace dplr {

PrivacyBudget::PrivacyBudget(double epsilon, double delta)
    : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidParameter, "epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "delta must lie in (0, 1)");
  }
}

namespace {

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

BudgetLedger::BudgetLedger(const BudgetLedger& other)
    : entries_(other.entries()) {}

BudgetLedger& BudgetLedger::operator=(const BudgetLedger& other) {
  if (this != &other) {
    std::vector<LedgerEntry> copy = other.entries();
    std::lock_guard<std::mutex> lock(mu_);
    entries_ = std::move(copy);
  }
  return *this;
}

BudgetLedger BudgetLedger::Load(const std::string& path) {
  BudgetLedger ledger;
  if (!std::filesystem::exists(path)) return ledger;
  const nlohmann::json doc = ParseJson(ReadTextFile(path), path);
  for (const nlohmann::json& e : RequireField(doc, "entries")) {
    LedgerEntry entry;
    entry.mechanism = RequireField(e, "mechanism").get<std::string>();
    entry.epsilon = RequireNumber(e, "epsilon");
    entry.delta = RequireNumber(e, "delta");
    entry.timestamp = e.value("timestamp", "");
    ledger.entries_.push_back(std::move(entry));
  }
  return ledger;
}

void BudgetLedger::Save(const std::string& path) const {
  WriteTextFile(path, ToJson().dump(2) + "\n");
}

void BudgetLedger::Record(const std::string& mechanism,
                          const PrivacyBudget& budget) {
  LedgerEntry entry{mechanism, budget.epsilon(), budget.delta(), UtcNow()};
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> BudgetLedger::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

BudgetTotals BudgetLedger::Totals() const {
  std::lock_guard<std::mutex> lock(mu_);
  BudgetTotals t;
  for (const LedgerEntry& e : entries_) {
    t.epsilon += e.epsilon;
    t.delta += e.delta;
  }
  return t;
}

nlohmann::ordered_json BudgetLedger::ToJson() const {
  const std::vector<LedgerEntry> snapshot = entries();
  nlohmann::ordered_json doc;
  doc["entries"] = nlohmann::ordered_json::array();
  BudgetTotals t;
  for (const LedgerEntry& e : snapshot) {
    doc["entries"].push_back({{"mechanism", e.mechanism},
                              {"epsilon", e.epsilon},
                              {"delta", e.delta},
                              {"timestamp", e.timestamp}});
    t.epsilon += e.epsilon;
    t.delta += e.delta;
  }
  doc["totals"] = {{"epsilon", t.epsilon}, {"delta", t.delta}};
  return doc;
}

}  // namespace dplr
