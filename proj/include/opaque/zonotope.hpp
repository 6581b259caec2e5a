// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"
#include "opaque/polytope.hpp"
#include "opaque/tolerances.hpp"

namespace opaque {

/// {center + G xi : |xi_j| <= 1}. Zero generators is a singleton.
class Zonotope {
  public:
    Zonotope(Vec center, Mat generators);

    static Zonotope singleton(const Vec& point);
    static Zonotope box(const Vec& lo, const Vec& hi);

    int dim() const { return static_cast<int>(center_.size()); }
    int num_generators() const { return static_cast<int>(generators_.cols()); }
    const Vec& center() const { return center_; }
    const Mat& generators() const { return generators_; }

    Vec support_point(const Vec& dir) const;
    /// Half-widths of the interval hull.
    Vec radius() const;
    /// Euclidean distance from x (0 inside), computed by GJK on the support map.
    double distance_to(const Vec& x, const Tolerances& tol = {}) const;
    bool contains(const Vec& x, const Tolerances& tol = {}) const { return distance_to(x, tol) <= tol.geom_eps; }

  private:
    Vec center_;
    Mat generators_;
};

Zonotope zonotope_image(const Mat& m, const Zonotope& z);
Zonotope zonotope_sum(const Zonotope& a, const Zonotope& b);

/// Keeps the (order-1)*dim largest generators and boxes the rest. Result ⊇ Z.
Zonotope zonotope_reduce_over(const Zonotope& z, int order);
/// Keeps the order*dim largest generators and drops the rest. Result ⊆ Z.
Zonotope zonotope_reduce_under(const Zonotope& z, int order);

/// Exact vertices. Any generator count for dim <= 3; at most 12 generators above.
VPolytope zonotope_to_vpolytope(const Zonotope& z);

/// Interval hull of conv(P) as a zonotope.
Zonotope bounding_box_zonotope(const VPolytope& p);

} // namespace opaque
