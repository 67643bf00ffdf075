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

#ifndef DPLR_INTERVAL_REPORT_H_
#define DPLR_INTERVAL_REPORT_H_

#include <limits>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "json.hpp"

namespace dplr {

enum class InferencePath { kOls, kProjected, kRidge, kAnalyzeGauss };

std::string_view PathName(InferencePath path);
InferencePath ParsePath(std::string_view name);

// One coordinate's interval and null-hypothesis decision. Paths without a
// pivot (ridge, analyze_gauss) leave t_stat, p_value and threshold NaN and
// never reject.
struct IntervalReport {
  Eigen::Index coordinate = 0;
  double center = 0.0;
  double half_width = 0.0;
  double alpha = 0.0;
  double t_stat = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  bool rejected = false;
  InferencePath path = InferencePath::kOls;
  bool degenerate = false;
  // Built from non-private quantities; not a releasable output.
  bool diagnostic = false;

  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
  bool Covers(double x) const { return lo() <= x && x <= hi(); }
};

nlohmann::ordered_json ReportToJson(const IntervalReport& report);

// Header plus one row per report:
// coordinate,center,half_width,t,p,rejected,path
std::string ReportsToCsv(std::span<const IntervalReport> reports);

}  // namespace dplr

#endif  // DPLR_INTERVAL_REPORT_H_
