// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"
#include "opaque/polytope.hpp"
#include "opaque/tolerances.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace opaque {

class Zonotope;

namespace gjk {

/// A support point together with the generating vertex index (-1 if none).
struct SupportPoint {
    Vec point;
    int index = -1;
};

/// argmax_{s in S} dir · s
using SupportFn = std::function<SupportPoint(const Vec& dir)>;

SupportFn support_of(const VPolytope& p);
SupportFn support_of(const Zonotope& z);

struct Result {
    double distance = 0.0;
    Vec closest_a; ///< point of A realizing the distance
    Vec closest_b; ///< point of B realizing the distance
    /// Convex weights of closest_a / closest_b over support indices.
    std::vector<std::pair<int, double>> weights_a;
    std::vector<std::pair<int, double>> weights_b;
    int iterations = 0;
    bool converged = true;
};

/// Euclidean distance between two convex sets given by support maps, in R^dim.
/// Stops once the duality gap is below eps; distances at or below eps report 0.
Result distance(const SupportFn& a, const SupportFn& b, int dim, double eps, int max_iterations = 500);

/// Closest point of conv(points) to the origin, with its convex weights.
/// Exposed for testing the subalgorithm in isolation.
std::pair<Vec, std::vector<double>> min_norm_in_hull(const Points& points);

} // namespace gjk

/// Distance between conv(P) and conv(Q); 0 when they intersect.
double gjk_distance(const VPolytope& p, const VPolytope& q, const Tolerances& tol = {});
gjk::Result gjk_query(const VPolytope& p, const VPolytope& q, const Tolerances& tol = {});
/// Distance from a point to conv(Q).
gjk::Result point_distance(const Vec& x, const VPolytope& q, const Tolerances& tol = {});

} // namespace opaque
