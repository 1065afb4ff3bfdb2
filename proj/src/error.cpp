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

#include "fedscan/error.hpp"

namespace fedscan {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::DuplicateColumn: return "DuplicateColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularTriangular: return "SingularTriangular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::RangeOverflow: return "RangeOverflow";
    case ErrorCode::NumericError: return "NumericError";
    case ErrorCode::InvalidDF: return "InvalidDF";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DuplicateParty: return "DuplicateParty";
    case ErrorCode::MissingParty: return "MissingParty";
    case ErrorCode::DuplicateShare: return "DuplicateShare";
    case ErrorCode::MissingSeed: return "MissingSeed";
    case ErrorCode::CorruptMessage: return "CorruptMessage";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
  }
  return "UnknownError";
}

int error_exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonFiniteData:
    case ErrorCode::EmptyInput:
    case ErrorCode::ParseError:
    case ErrorCode::MissingValue:
    case ErrorCode::DuplicateColumn:
    case ErrorCode::EmptyFile:
      return 3;
    case ErrorCode::RankDeficient:
    case ErrorCode::SingularTriangular:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::RangeOverflow:
    case ErrorCode::NumericError:
    case ErrorCode::InvalidDF:
      return 4;
    case ErrorCode::ShapeMismatch:
    case ErrorCode::DuplicateParty:
    case ErrorCode::MissingParty:
    case ErrorCode::DuplicateShare:
    case ErrorCode::MissingSeed:
    case ErrorCode::CorruptMessage:
    case ErrorCode::VersionMismatch:
      return 5;
  }
  return 1;
}

}  // namespace fedscan
