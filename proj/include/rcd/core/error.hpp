// Copyright 2026 The rcd Authors.
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

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcd {

// Numeric values line up with the C API status codes and the CLI exit codes.
enum class ErrorCode {
  argument = 1,
  parse = 2,
  config = 3,
  numeric = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorCode::argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

/// Malformed input text. `line` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorCode::parse, line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

/// An iterative solver ran out of iterations. Carries the last iterate so
/// callers can report or restart from it.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate, double residual_norm)
      : NumericError(what + " (residual norm " + std::to_string(residual_norm) + ")"),
        last_iterate_(std::move(last_iterate)),
        residual_norm_(residual_norm) {}
  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_norm_;
};

}  // namespace rcd
