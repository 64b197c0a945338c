/*
 * Copyright 2026 The rulehound Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RULEHOUND_ERROR_HPP_
#define RULEHOUND_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rulehound {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Data does not fit the shape (schema, tree levels, layer sizes) it is
// being combined with.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `row` is 1-based and counts the header line, 0 when
// the error is not tied to a row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : Error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Optimisation produced a non-finite loss or parameter.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace rulehound

#endif  // RULEHOUND_ERROR_HPP_
