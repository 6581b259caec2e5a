// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace opaque {

/// Operand dimensions disagree (matrix/vector/set shapes).
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An exact-hull path was requested in a dimension it does not support (> 3).
class UnsupportedDimension : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A representation would exceed a configured size cap.
class SizeLimitError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Numerical routine failed to converge. Distinct from "infeasible".
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (negative k, empty set, ...).
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The secret and nonsecret output sets do not meet, so no pruning can help.
class UnsalvageableSecret : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text; position is a 0-based character offset.
class ParseError : public InvalidArgument {
  public:
    ParseError(const std::string& what, std::size_t position)
        : InvalidArgument(what + " at column " + std::to_string(position + 1)), position_(position) {}
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

inline void require_dims(bool ok, const std::string& what) {
    if (!ok) {
        throw DimensionError(what);
    }
}

} // namespace opaque
