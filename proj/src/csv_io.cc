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

#include "dplr/csv_io.h"

#include <charconv>
#include <cmath>

#include "dplr/error.h"
#include "dplr/json_util.h"

namespace dplr {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void ParseFailure(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message);
}

}  // namespace

CsvTable ParseCsv(std::string_view text) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = Trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = SplitFields(line);
    if (table.header.empty()) {
      for (std::string_view f : fields) table.header.emplace_back(f);
      continue;
    }
    if (fields.size() != table.header.size()) {
      ParseFailure(line_no, "expected " + std::to_string(table.header.size()) +
                                " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::string_view f : fields) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty() ||
          !std::isfinite(v)) {
        ParseFailure(line_no, "not a finite number: \"" + std::string(f) + "\"");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw Error(ErrorCode::kParse, "empty CSV");
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return table;
}

Eigen::Index ResolveColumn(const std::vector<std::string>& header,
                           std::string_view label) {
  if (header.empty()) throw Error(ErrorCode::kInvalidInput, "no columns");
  if (label.empty()) return static_cast<Eigen::Index>(header.size()) - 1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == label) return static_cast<Eigen::Index>(k);
  }
  Eigen::Index index = -1;
  const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), index);
  if (ec == std::errc() && ptr == label.data() + label.size() && index >= 0 &&
      index < static_cast<Eigen::Index>(header.size())) {
    return index;
  }
  throw Error(ErrorCode::kInvalidParameter,
              "label \"" + std::string(label) + "\" is neither a column name "
              "nor a column index");
}

LoadedCsv LoadCsv(const std::string& path, const CsvOptions& options) {
  CsvTable table = ParseCsv(ReadTextFile(path));
  if (table.values.rows() == 0) {
    throw Error(ErrorCode::kInvalidInput, path + " has no data rows");
  }
  const Eigen::Index label = ResolveColumn(table.header, options.label);
  const Eigen::VectorXd norms = table.values.rowwise().norm();
  double bound = 0.0;
  bool from_data = false;
  if (options.bound) {
    bound = *options.bound;
    if (options.policy == BoundPolicy::kReject) {
      std::string lines;
      std::int64_t count = 0;
      for (Eigen::Index i = 0; i < norms.size(); ++i) {
        if (norms(i) <= bound * (1.0 + 1e-12)) continue;
        if (count++ < 10) {
          if (!lines.empty()) lines += ", ";
          lines += "line " + std::to_string(table.line_numbers[static_cast<std::size_t>(i)]) + " (norm " +
                   FormatDouble(norms(i)) + ")";
        }
      }
      if (count > 0) {
        throw Error(ErrorCode::kRefusedRow,
                    std::to_string(count) + " row(s) exceed bound " +
                        FormatDouble(bound) + ": " + lines);
      }
    }
  } else {
    bound = norms.maxCoeff() > 0.0 ? norms.maxCoeff() : 1.0;
    from_data = true;
  }
  return LoadedCsv{BoundedDataset(std::move(table.values), bound, label, options.policy),
                   std::move(table.header), from_data};
}

}  // namespace dplr
