// Copyright 2026 The qpca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpca {

/// Stable error codes. The string form is part of the CLI contract.
enum class ErrorCode {
  InvalidInput,
  NumericalFailure,
  OutOfRange,
  DimensionMismatch,
  ContractViolation,
  UnknownRegister,
  DegenerateSpectrum,
  InvalidRotation,
  VanishingSuccess,
  UnderSampled,
  WeakAnchor,
  SingularSystem,
  DegenerateRegression,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "INVALID_INPUT";
    case ErrorCode::NumericalFailure: return "NUMERICAL_FAILURE";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::ContractViolation: return "CONTRACT_VIOLATION";
    case ErrorCode::UnknownRegister: return "UNKNOWN_REGISTER";
    case ErrorCode::DegenerateSpectrum: return "DEGENERATE_SPECTRUM";
    case ErrorCode::InvalidRotation: return "INVALID_ROTATION";
    case ErrorCode::VanishingSuccess: return "VANISHING_SUCCESS";
    case ErrorCode::UnderSampled: return "UNDER_SAMPLED";
    case ErrorCode::WeakAnchor: return "WEAK_ANCHOR";
    case ErrorCode::SingularSystem: return "SINGULAR_SYSTEM";
    case ErrorCode::DegenerateRegression: return "DEGENERATE_REGRESSION";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Process exit status used by the CLI for each code (0 is success, 1 is usage).
constexpr int exit_status(ErrorCode code) { return 10 + static_cast<int>(code); }

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qpca
