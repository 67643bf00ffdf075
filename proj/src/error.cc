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

#include "dplr/error.h"

namespace dplr {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kRefusedRow: return "refused row";
    case ErrorCode::kUnderdetermined: return "underdetermined";
    case ErrorCode::kSingular: return "singular matrix";
    case ErrorCode::kNotPsd: return "not positive definite";
    case ErrorCode::kWrongPath: return "wrong inference path";
    case ErrorCode::kInsufficientRows: return "insufficient rows";
    case ErrorCode::kUndefinedPower: return "undefined power";
    case ErrorCode::kSignUndefined: return "sign undefined";
    case ErrorCode::kDiagnosticUnavailable: return "diagnostic unavailable";
    case ErrorCode::kPreconditionFailed: return "precondition failed";
    case ErrorCode::kInfeasible: return "infeasible regime";
    case ErrorCode::kDegenerate: return "degenerate fit";
  }
  return "unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kPreconditionFailed:
    case ErrorCode::kUndefinedPower:
    case ErrorCode::kInsufficientRows:
      return 3;
    case ErrorCode::kDegenerate:
    case ErrorCode::kSingular:
    case ErrorCode::kNotPsd:
      return 4;
    default:
      return 2;
  }
}

}  // namespace dplr
