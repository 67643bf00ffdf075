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

#ifndef DPLR_PRIVACY_LEDGER_H_
#define DPLR_PRIVACY_LEDGER_H_

#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace dplr {

// An (epsilon, delta) differential-privacy guarantee.
class PrivacyBudget {
 public:
  // Requires epsilon > 0 and 0 < delta < 1.
  PrivacyBudget(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  double epsilon_;
  double delta_;
};

struct LedgerEntry {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string timestamp;  // UTC, ISO 8601
};

struct BudgetTotals {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Running record of privacy spends under basic composition: totals are
// the entrywise sums. Safe to share between threads.
class BudgetLedger {
 public:
  BudgetLedger() = default;
  BudgetLedger(const BudgetLedger& other);
  BudgetLedger& operator=(const BudgetLedger& other);

  // A missing file yields an empty ledger.
  static BudgetLedger Load(const std::string& path);
  void Save(const std::string& path) const;

  void Record(const std::string& mechanism, const PrivacyBudget& budget);

  std::vector<LedgerEntry> entries() const;
  BudgetTotals Totals() const;
  nlohmann::ordered_json ToJson() const;

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace dplr

#endif  // DPLR_PRIVACY_LEDGER_H_
