// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"
#include "opaque/tolerances.hpp"

#include <optional>
#include <vector>

namespace opaque {

/// Convex hull of a finite, nonempty point list. Interior points are allowed.
class VPolytope {
  public:
    explicit VPolytope(Points vertices);

    static VPolytope singleton(const Vec& point);
    /// Axis-aligned box with 2^dim corners; lo(i) == hi(i) collapses that axis.
    static VPolytope box(const Vec& lo, const Vec& hi);

    int dim() const { return dim_; }
    std::size_t size() const { return vertices_.size(); }
    const Points& vertices() const { return vertices_; }
    const Vec& vertex(std::size_t i) const { return vertices_[i]; }
    /// dim x size matrix, one vertex per column.
    Mat as_matrix() const;

    Vec centroid() const;
    Vec lower_bound() const;
    Vec upper_bound() const;

  private:
    int dim_;
    Points vertices_;
};

/// {x : normals.row(i) · x <= offsets(i)}; may be unbounded; zero rows = whole space.
class HPolytope {
  public:
    HPolytope(int dim, Mat normals, Vec offsets);

    static HPolytope whole_space(int dim);

    int dim() const { return dim_; }
    int rows() const { return static_cast<int>(normals_.rows()); }
    const Mat& normals() const { return normals_; }
    const Vec& offsets() const { return offsets_; }

    /// Rows rescaled to unit normals so violations are Euclidean.
    HPolytope normalized() const;
    HPolytope intersect(const HPolytope& other) const;
    /// Largest normalized constraint violation at x (<= 0 inside).
    double max_violation(const Vec& x) const;
    bool contains(const Vec& x, double tol) const { return max_violation(x) <= tol; }

  private:
    int dim_;
    Mat normals_;
    Vec offsets_;
};

/// {p + q}. Hull-pruned when dim <= 3.
VPolytope minkowski_sum(const VPolytope& p, const VPolytope& q);
/// {M v}; vertices are not pruned so indices stay aligned with the input.
VPolytope linear_image(const Mat& m, const VPolytope& p);
VPolytope translate(const VPolytope& p, const Vec& offset);
/// Vertex-list concatenation: the hull of the union.
VPolytope hull_union(const VPolytope& p, const VPolytope& q);

/// Indices of the points that span conv(points); all indices when dim > 3.
std::vector<int> extreme_indices(const Points& points, double eps = 1e-9);
/// Drops non-extreme points (dim <= 3) and exact duplicates (any dim).
VPolytope pruned(const VPolytope& p, double eps = 1e-9);

/// Minimal H-representation of conv(P) for dim <= 3. Flat hulls get paired
/// opposing halfspaces widened by geom_eps. Throws UnsupportedDimension above 3.
HPolytope convex_hull_h(const VPolytope& p, const Tolerances& tol = {});
/// Same, but flat directions are pinned exactly (zero slack). For sets whose
/// H-rep is intersected further and must not grow.
HPolytope convex_hull_h_tight(const VPolytope& p, const Tolerances& tol = {});

struct Containment {
    bool contained = true;
    int worst_index = -1;      ///< inner vertex with the largest distance
    double worst_distance = 0; ///< Euclidean distance of that vertex to conv(outer)
};

/// Every vertex of inner within geom_eps of conv(outer), via point-to-hull GJK.
Containment containment(const VPolytope& inner, const VPolytope& outer, const Tolerances& tol = {});
bool hull_contains(const VPolytope& inner, const VPolytope& outer, const Tolerances& tol = {});
bool hulls_intersect(const VPolytope& p, const VPolytope& q, const Tolerances& tol = {});

/// Point with H x <= h + lp_eps, from minimizing the maximum row violation.
/// Throws NumericalError if the simplex does not converge.
std::optional<Vec> lp_feasible_point(const HPolytope& h, const Tolerances& tol = {});
/// Point of conv(V) with H x <= h + lp_eps, via barycentric weights.
std::optional<Vec> lp_feasible_in_hull(const HPolytope& h, const VPolytope& v, const Tolerances& tol = {});
/// Optimizes direction·x over H (maximize). Empty when unbounded or infeasible.
std::optional<Vec> lp_maximize(const HPolytope& h, const Vec& direction, const Tolerances& tol = {});

/// Vertices of a bounded H-polytope (dim <= 3). Empty optional when the set is
/// unbounded; throws InvalidArgument when it is empty.
std::optional<VPolytope> enumerate_vertices(const HPolytope& h, const Tolerances& tol = {});

/// conv(P) ∩ conv(Q) for dim <= 3; empty optional when they do not meet.
std::optional<VPolytope> hull_intersection(const VPolytope& p, const VPolytope& q, const Tolerances& tol = {});

} // namespace opaque
