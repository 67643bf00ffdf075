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

#include "dplr/interval_report.h"

#include <cmath>

#include "dplr/error.h"
#include "dplr/json_util.h"

namespace dplr {

std::string_view PathName(InferencePath path) {
  switch (path) {
    case InferencePath::kOls:
      return "ols";
    case InferencePath::kProjected:
      return "projected";
    case InferencePath::kRidge:
      return "ridge";
    case InferencePath::kAnalyzeGauss:
      return "analyze_gauss";
  }
  return "unknown";
}

InferencePath ParsePath(std::string_view name) {
  for (InferencePath p : {InferencePath::kOls, InferencePath::kProjected,
                          InferencePath::kRidge, InferencePath::kAnalyzeGauss}) {
    if (PathName(p) == name) return p;
  }
  throw Error(ErrorCode::kInvalidParameter,
              "unknown path \"" + std::string(name) + "\"");
}

namespace {

nlohmann::ordered_json NumberOrNull(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string CsvNumber(double v) {
  return std::isfinite(v) ? FormatDouble(v) : "NA";
}

}  // namespace

nlohmann::ordered_json ReportToJson(const IntervalReport& r) {
  nlohmann::ordered_json j;
  j["coordinate"] = r.coordinate;
  j["center"] = NumberOrNull(r.center);
  j["half_width"] = NumberOrNull(r.half_width);
  j["lo"] = NumberOrNull(r.lo());
  j["hi"] = NumberOrNull(r.hi());
  j["alpha"] = r.alpha;
  j["t"] = NumberOrNull(r.t_stat);
  j["p"] = NumberOrNull(r.p_value);
  j["threshold"] = NumberOrNull(r.threshold);
  j["rejected"] = r.rejected;
  j["path"] = PathName(r.path);
  j["degenerate"] = r.degenerate;
  j["diagnostic"] = r.diagnostic;
  return j;
}

std::string ReportsToCsv(std::span<const IntervalReport> reports) {
  std::string out = "coordinate,center,half_width,t,p,rejected,path\n";
  for (const IntervalReport& r : reports) {
    out += std::to_string(r.coordinate) + ',' + CsvNumber(r.center) + ',' +
           CsvNumber(r.half_width) + ',' + CsvNumber(r.t_stat) + ',' +
           CsvNumber(r.p_value) + ',' + (r.rejected ? "true" : "false") + ',' +
           std::string(PathName(r.path)) + '\n';
  }
  return out;
}

}  // namespace dplr
