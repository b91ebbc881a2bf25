// Copyright 2026 The jbmvqe Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jbmvqe {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's precondition.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Operand widths (qubit counts, parameter lengths, cache shapes) disagree.
class SizeMismatch : public Error {
  public:
    using Error::Error;
};

/// Malformed Hamiltonian or config text. Carries the 1-based line number.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

namespace detail {

inline void require(bool cond, const std::string &msg) {
    if (!cond) {
        throw InvalidArgument(msg);
    }
}

inline void require_size(bool cond, const std::string &msg) {
    if (!cond) {
        throw SizeMismatch(msg);
    }
}

} // namespace detail
} // namespace jbmvqe
