// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <vector>

namespace opaque {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Points = std::vector<Vec>;

inline bool all_finite(const Vec& v) { return v.allFinite(); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

/// A^k by repeated squaring; A must be square.
Mat matrix_power(const Mat& a, int k);

/// Orthonormal basis (columns) of range(M), using a relative singular-value cutoff.
Mat range_basis(const Mat& m, double rel_tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of range(M) in R^{rows(M)}.
Mat complement_basis(const Mat& m, double rel_tol = 1e-10);

} // namespace opaque
