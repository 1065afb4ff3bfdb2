/*
 * Copyright 2026 The Fedscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSCAN_ERROR_HPP
#define FEDSCAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fedscan {

// Stable error codes. The CLI maps each class to a fixed exit status:
// data errors -> 3, numeric/rank errors -> 4, protocol errors -> 5.
enum class ErrorCode {
  // data
  DimensionMismatch,
  NonFiniteData,
  EmptyInput,
  ParseError,
  MissingValue,
  DuplicateColumn,
  EmptyFile,
  // numeric / rank
  RankDeficient,
  SingularTriangular,
  NotPositiveDefinite,
  InsufficientSamples,
  RangeOverflow,
  NumericError,
  InvalidDF,
  // protocol
  ShapeMismatch,
  DuplicateParty,
  MissingParty,
  DuplicateShare,
  MissingSeed,
  CorruptMessage,
  VersionMismatch,
};

const char* error_code_name(ErrorCode code);

// 0 reserved for success, 2 for CLI usage errors.
int error_exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fedscan

#endif  // FEDSCAN_ERROR_HPP
