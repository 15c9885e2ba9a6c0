// Copyright 2026 The ottopics Authors.
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

#ifndef OTTOPICS_ERRORS_HPP_
#define OTTOPICS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ottopics {

// Root of the library's exception hierarchy. The CLI maps each branch to an
// exit code: ValidationError -> 2, NumericError -> 3, IoError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, inconsistent shapes, empty inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Non-finite inputs, numeric blow-up, failed oracle evaluations.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Sinkhorn scaling vectors left the representable range.
class StabilityError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Unreadable files and malformed file contents.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ottopics

#endif  // OTTOPICS_ERRORS_HPP_
