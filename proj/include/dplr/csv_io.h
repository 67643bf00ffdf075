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

#ifndef DPLR_CSV_IO_H_
#define DPLR_CSV_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dplr/private_projection.h"

namespace dplr {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

// Headered, comma-separated numeric table. Errors carry 1-based line
// numbers.
CsvTable ParseCsv(std::string_view text);

// Column index for a header name or a 0-based integer; empty selects the
// last column.
Eigen::Index ResolveColumn(const std::vector<std::string>& header,
                           std::string_view label);

struct CsvOptions {
  std::string label;
  // Declared row bound. Without one the bound is taken from the data, which
  // is not a private choice and is reported as such.
  std::optional<double> bound;
  BoundPolicy policy = BoundPolicy::kReject;
};

struct LoadedCsv {
  BoundedDataset dataset;
  std::vector<std::string> header;
  bool bound_from_data = false;
};

LoadedCsv LoadCsv(const std::string& path, const CsvOptions& options);

}  // namespace dplr

#endif  // DPLR_CSV_IO_H_
