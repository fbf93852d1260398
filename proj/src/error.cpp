// src/error.cpp

// Copyright 2026  osid authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "osid/error.hpp"

namespace osid {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::SingleSpeaker: return "SingleSpeaker";
    case ErrorCode::SingleUtterance: return "SingleUtterance";
    case ErrorCode::TableLengthMismatch: return "TableLengthMismatch";
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::DegenerateCohort: return "DegenerateCohort";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::StaleTape: return "StaleTape";
    case ErrorCode::InsufficientSpeakers: return "InsufficientSpeakers";
    case ErrorCode::InsufficientUtterances: return "InsufficientUtterances";
    case ErrorCode::TooFewSets: return "TooFewSets";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "UnknownError";
}

int error_exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
      return 1;
    case ErrorCode::IoError:
      return 2;
    case ErrorCode::FormatError:
      return 3;
    default:
      return 4;  // domain precondition violations
  }
}

}  // namespace osid
