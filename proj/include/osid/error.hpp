// include/osid/error.hpp

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

#ifndef OSID_ERROR_HPP
#define OSID_ERROR_HPP

#include <stdexcept>
#include <string>

namespace osid {

enum class ErrorCode {
  // vector / enrollment math
  ZeroVector,
  DimensionMismatch,
  EmptyList,
  // thresholding
  SingleSpeaker,
  SingleUtterance,
  TableLengthMismatch,
  EmptyCohort,
  DegenerateCohort,
  MissingClass,
  EmptyGrid,
  // nnet
  ShapeMismatch,
  StaleTape,
  // sampling
  InsufficientSpeakers,
  InsufficientUtterances,
  TooFewSets,
  // configuration and files
  InvalidConfig,
  IoError,
  FormatError,
};

const char* error_code_name(ErrorCode code);

// CLI exit code for an error category (0 is reserved for success).
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace osid

#endif  // OSID_ERROR_HPP
