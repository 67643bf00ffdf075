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

#include "dplr/json_util.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dplr/error.h"

namespace dplr {

std::string FormatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::Separate() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!has_items_.empty()) {
    if (has_items_.back()) out_ += ',';
    has_items_.back() = true;
  }
}

JsonWriter& JsonWriter::BeginObject() {
  Separate();
  out_ += '{';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::EndObject() {
  has_items_.pop_back();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::BeginArray() {
  Separate();
  out_ += '[';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::EndArray() {
  has_items_.pop_back();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::Key(std::string_view key) {
  Separate();
  out_ += nlohmann::json(key).dump();
  out_ += ':';
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::Number(double v) {
  Separate();
  out_ += FormatDouble(v);
  return *this;
}

JsonWriter& JsonWriter::Integer(std::int64_t v) {
  Separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::Bool(bool v) {
  Separate();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::String(std::string_view v) {
  Separate();
  out_ += nlohmann::json(v).dump();
  return *this;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path);
  out << content;
}

nlohmann::json ParseJson(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

const nlohmann::json& RequireField(const nlohmann::json& doc,
                                   std::string_view key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorCode::kInvalidInput,
                "missing field \"" + std::string(key) + "\"");
  }
  return doc.at(std::string(key));
}

double RequireNumber(const nlohmann::json& doc, std::string_view key) {
  const nlohmann::json& v = RequireField(doc, key);
  if (!v.is_number()) {
    throw Error(ErrorCode::kInvalidInput,
                "field \"" + std::string(key) + "\" must be a number");
  }
  return v.get<double>();
}

std::int64_t RequireInteger(const nlohmann::json& doc, std::string_view key) {
  const nlohmann::json& v = RequireField(doc, key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::kInvalidInput,
                "field \"" + std::string(key) + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

Eigen::MatrixXd RowMajorMatrix(const nlohmann::json& array, Eigen::Index rows,
                               Eigen::Index cols, std::string_view what) {
  if (!array.is_array() ||
      static_cast<Eigen::Index>(array.size()) != rows * cols) {
    throw Error(ErrorCode::kInvalidInput,
                std::string(what) + ": expected " + std::to_string(rows * cols) +
                    " entries");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      const nlohmann::json& v = array[static_cast<std::size_t>(i * cols + k)];
      if (!v.is_number()) {
        throw Error(ErrorCode::kInvalidInput,
                    std::string(what) + ": non-numeric entry");
      }
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

Eigen::VectorXd NumberVector(const nlohmann::json& array, std::string_view what) {
  if (!array.is_array()) {
    throw Error(ErrorCode::kInvalidInput, std::string(what) + ": expected array");
  }
  return RowMajorMatrix(array, static_cast<Eigen::Index>(array.size()), 1, what);
}

}  // namespace dplr
