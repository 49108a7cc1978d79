/*
 * Copyright 2026 The Blindspot Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blindspot {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class OutOfRange : public Error {
 public:
  OutOfRange(std::size_t index, double value);
  std::size_t index() const { return index_; }
  double value() const { return value_; }

 private:
  std::size_t index_;
  double value_;
};

class DegeneratePlacement : public Error {
 public:
  using Error::Error;
};

class NotCoprime : public Error {
 public:
  using Error::Error;
};

/// Input exceeds the limits of an exact or enumerative algorithm.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class SingularKernel : public Error {
 public:
  using Error::Error;
};

/// Failures talking to the system under test.
class DetectorError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public DetectorError {
 public:
  ProtocolError(const std::string& what, std::string raw_payload)
      : DetectorError(what), raw_(std::move(raw_payload)) {}
  const std::string& raw_payload() const { return raw_; }

 private:
  std::string raw_;
};

class Timeout : public DetectorError {
 public:
  using DetectorError::DetectorError;
};

class ProcessExit : public DetectorError {
 public:
  ProcessExit(const std::string& what, int exit_code)
      : DetectorError(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

class CorruptStore : public Error {
 public:
  /// line is 1-based; 0 when the failure is not tied to a line.
  CorruptStore(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class SceneMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace blindspot
