// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"

#include <vector>

namespace opaque::hull {

/// Affine frame of a point set: points ≈ center + basis * t, with the
/// complement directions carrying extent below the flatness threshold.
struct AffineFrame {
    Vec center;
    Mat basis;      ///< d x r, orthonormal columns
    Mat complement; ///< d x (d - r), orthonormal columns
    int affine_dim() const { return static_cast<int>(basis.cols()); }
};

AffineFrame affine_frame(const Points& points, double flat_tol);

/// Halfspaces plus the indices of points that span the hull.
struct Hull {
    Mat normals; ///< unit rows
    Vec offsets;
    std::vector<int> extreme;
    int affine_dim = 0;
};

/// Exact hull for ambient dim <= 3 (flat sets handled in their affine span).
/// slack widens the paired halfspaces that pin flat directions.
Hull compute(const Points& points, double eps, double slack);

/// 2-D monotone chain; returns CCW extreme indices, collinear points dropped.
std::vector<int> monotone_chain(const std::vector<Eigen::Vector2d>& pts, double eps);

} // namespace opaque::hull
