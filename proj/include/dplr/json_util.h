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

#ifndef DPLR_JSON_UTIL_H_
#define DPLR_JSON_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace dplr {

// "%.17g" rendering, which round-trips every finite double. Non-finite
// values render as the JSON literal null.
std::string FormatDouble(double v);

// Streaming writer for documents whose numbers must keep all 17 significant
// digits. Commas are inserted automatically.
class JsonWriter {
 public:
  JsonWriter& BeginObject();
  JsonWriter& EndObject();
  JsonWriter& BeginArray();
  JsonWriter& EndArray();
  JsonWriter& Key(std::string_view key);
  JsonWriter& Number(double v);
  JsonWriter& Integer(std::int64_t v);
  JsonWriter& Bool(bool v);
  JsonWriter& String(std::string_view v);

  // Flat array of the entries in row-major order.
  template <typename Derived>
  JsonWriter& RowMajorArray(const Eigen::DenseBase<Derived>& m) {
    BeginArray();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index k = 0; k < m.cols(); ++k) Number(m(i, k));
    }
    return EndArray();
  }

  const std::string& str() const { return out_; }

 private:
  void Separate();

  std::string out_;
  std::vector<bool> has_items_;
  bool after_key_ = false;
};

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view content);

// Parses a document, mapping parse failures to ErrorCode::kParse.
nlohmann::json ParseJson(std::string_view text, std::string_view what);

// Typed field access with kInvalidInput on absence or type mismatch.
const nlohmann::json& RequireField(const nlohmann::json& doc,
                                   std::string_view key);
double RequireNumber(const nlohmann::json& doc, std::string_view key);
std::int64_t RequireInteger(const nlohmann::json& doc, std::string_view key);

// Reads a flat numeric array of exactly rows * cols entries in row-major
// order. A null entry is rejected.
Eigen::MatrixXd RowMajorMatrix(const nlohmann::json& array, Eigen::Index rows,
                               Eigen::Index cols, std::string_view what);
Eigen::VectorXd NumberVector(const nlohmann::json& array, std::string_view what);

}  // namespace dplr

#endif  // DPLR_JSON_UTIL_H_
