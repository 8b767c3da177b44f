// Copyright 2026 The demotraj Authors
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

#ifndef DEMOTRAJ_ERROR_HPP_
#define DEMOTRAJ_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace demotraj {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (rates, thresholds, calibration, missing files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violating an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

class MonotonicityError : public InputError {
 public:
  MonotonicityError(std::string stream, double last_t, double new_t);

  const std::string& stream() const { return stream_; }
  double last_timestamp() const { return last_t_; }
  double rejected_timestamp() const { return new_t_; }

 private:
  std::string stream_;
  double last_t_;
  double new_t_;
};

// Malformed text input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedTopologyError : public Error {
 public:
  using Error::Error;
};

// Pose quality gate could not be evaluated (e.g. empty stream).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A low-confidence run touches either end of a pose stream.
class UnrepairableError : public Error {
 public:
  UnrepairableError(std::size_t first, std::size_t last);

  std::size_t first_index() const { return first_; }
  std::size_t last_index() const { return last_; }

 private:
  std::size_t first_;
  std::size_t last_;
};

class DetectionError : public Error {
 public:
  using Error::Error;
};

class ImputationError : public Error {
 public:
  using Error::Error;
};

// Value outside its admissible domain (joint limits, widths in strict mode).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class UnreachableTargetError : public Error {
 public:
  UnreachableTargetError(double position_residual, double rotation_residual,
                         std::optional<std::size_t> frame = std::nullopt);

  double position_residual() const { return position_residual_; }
  double rotation_residual() const { return rotation_residual_; }
  // Set when raised from a trajectory solve.
  std::optional<std::size_t> frame() const { return frame_; }

 private:
  double position_residual_;
  double rotation_residual_;
  std::optional<std::size_t> frame_;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

// Episode file does not follow the on-disk layout. `path` is the object
// path inside the file.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace demotraj

#endif  // DEMOTRAJ_ERROR_HPP_
