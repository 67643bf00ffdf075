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

#ifndef DPLR_ERROR_H_
#define DPLR_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dplr {

enum class ErrorCode {
  kInvalidParameter,
  kInvalidInput,
  kParse,
  kRefusedRow,
  kUnderdetermined,
  kSingular,
  kNotPsd,
  kWrongPath,
  kInsufficientRows,
  kUndefinedPower,
  kSignUndefined,
  kDiagnosticUnavailable,
  kPreconditionFailed,
  kInfeasible,
  kDegenerate,
};

std::string_view ErrorCodeName(ErrorCode code);

// Process exit status used by the command-line tool: 2 for bad input,
// 3 for infeasible parameter regimes, 4 for degenerate fits.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dplr

#endif  // DPLR_ERROR_H_
