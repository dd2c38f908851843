/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddvar {

enum class ErrorCode {
  InvalidDecomposition,
  IndexOutOfRange,
  NoInterface,
  DimensionMismatch,
  FactorizationFailure,
  InvalidArgument,
  MissingNeighbor,
  UncoveredPoint,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Local factorization failure; carries the subdomain that failed (or -1 for global).
class FactorizationError : public Error {
 public:
  FactorizationError(long subdomain, const std::string& what)
      : Error(ErrorCode::FactorizationFailure, what), subdomain_(subdomain) {}

  long subdomain() const noexcept { return subdomain_; }

 private:
  long subdomain_;
};

/// Config errors keep the offending key and, when known, the 1-based line.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string key, int line, const std::string& what)
      : Error(code, what), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace ddvar
