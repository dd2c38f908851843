/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/errors.hpp"

namespace ddvar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDecomposition:
      return "InvalidDecomposition";
    case ErrorCode::IndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorCode::NoInterface:
      return "NoInterface";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::FactorizationFailure:
      return "FactorizationFailure";
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
    case ErrorCode::MissingNeighbor:
      return "MissingNeighbor";
    case ErrorCode::UncoveredPoint:
      return "UncoveredPoint";
    case ErrorCode::ParseError:
      return "ParseError";
    case ErrorCode::ValidationError:
      return "ValidationError";
    case ErrorCode::IoError:
      return "IoError";
  }
  return "Error";
}

}  // namespace ddvar
