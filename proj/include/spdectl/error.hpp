/*
 Copyright 2026 The spdectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spdectl {

enum class ErrorCode {
  InvalidDomain,
  TooCoarse,
  GridMismatch,
  TruncationTooLarge,
  LengthMismatch,
  ShapeMismatch,
  InvalidArgument,
  NonfiniteState,
  DegenerateActuators,
  AllRolloutsFailed,
  InsufficientSamples,
  ConfigInvalid,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Structured failure raised by every module. The code drives CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDomain: return "invalid-domain";
    case ErrorCode::TooCoarse: return "too-coarse";
    case ErrorCode::GridMismatch: return "grid-mismatch";
    case ErrorCode::TruncationTooLarge: return "truncation-too-large";
    case ErrorCode::LengthMismatch: return "length-mismatch";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NonfiniteState: return "nonfinite-state";
    case ErrorCode::DegenerateActuators: return "degenerate-actuators";
    case ErrorCode::AllRolloutsFailed: return "all-rollouts-failed";
    case ErrorCode::InsufficientSamples: return "insufficient-samples";
    case ErrorCode::ConfigInvalid: return "config-invalid";
    case ErrorCode::IoFailure: return "io-failure";
  }
  return "unknown";
}

}  // namespace spdectl
