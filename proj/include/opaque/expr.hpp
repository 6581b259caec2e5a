// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"

#include <memory>
#include <string>

namespace opaque {

/// Arithmetic over state and control components.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | x<i> | u<j> | pow(expr, expr) | '(' expr ')'
///
/// Indices are 0-based; x_0 and x[0] are accepted spellings of x0.
class Expr {
  public:
    /// Throws ParseError. Indices must be < n (states) and < m (controls).
    static Expr parse(const std::string& text, int n, int m);

    double eval(const Vec& x, const Vec& u) const;
    const std::string& text() const { return text_; }

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace opaque
