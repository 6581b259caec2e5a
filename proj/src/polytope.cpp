// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/polytope.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"
#include "opaque/hull.hpp"
#include "opaque/lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace opaque {

VPolytope::VPolytope(Points vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) {
        throw InvalidArgument("VPolytope needs at least one vertex");
    }
    dim_ = static_cast<int>(vertices_.front().size());
    if (dim_ <= 0) {
        throw InvalidArgument("VPolytope dimension must be positive");
    }
    for (const auto& v : vertices_) {
        require_dims(v.size() == dim_, "VPolytope: vertices of different lengths");
        if (!v.allFinite()) {
            throw InvalidArgument("VPolytope: non-finite coordinate");
        }
    }
}

VPolytope VPolytope::singleton(const Vec& point) { return VPolytope(Points{point}); }

VPolytope VPolytope::box(const Vec& lo, const Vec& hi) {
    require_dims(lo.size() == hi.size(), "box: bound lengths differ");
    std::vector<int> axes;
    for (int i = 0; i < lo.size(); ++i) {
        if (hi(i) < lo(i)) {
            throw InvalidArgument("box: hi < lo on axis " + std::to_string(i));
        }
        if (hi(i) > lo(i)) {
            axes.push_back(i);
        }
    }
    Points pts;
    for (unsigned mask = 0; mask < (1u << axes.size()); ++mask) {
        Vec p = lo;
        for (std::size_t j = 0; j < axes.size(); ++j) {
            if (mask & (1u << j)) {
                p(axes[j]) = hi(axes[j]);
            }
        }
        pts.push_back(p);
    }
    return VPolytope(std::move(pts));
}

Mat VPolytope::as_matrix() const {
    Mat m(dim_, static_cast<int>(vertices_.size()));
    for (std::size_t j = 0; j < vertices_.size(); ++j) {
        m.col(static_cast<int>(j)) = vertices_[j];
    }
    return m;
}

Vec VPolytope::centroid() const { return as_matrix().rowwise().mean(); }
Vec VPolytope::lower_bound() const { return as_matrix().rowwise().minCoeff(); }
Vec VPolytope::upper_bound() const { return as_matrix().rowwise().maxCoeff(); }

HPolytope::HPolytope(int dim, Mat normals, Vec offsets) : dim_(dim), normals_(std::move(normals)), offsets_(std::move(offsets)) {
    if (dim_ <= 0) {
        throw InvalidArgument("HPolytope dimension must be positive");
    }
    if (normals_.rows() == 0) {
        normals_.resize(0, dim_);
    }
    require_dims(normals_.cols() == dim_, "HPolytope: normal length != dim");
    require_dims(normals_.rows() == offsets_.size(), "HPolytope: normals and offsets differ in count");
    for (int i = 0; i < normals_.rows(); ++i) {
        if (normals_.row(i).norm() == 0.0) {
            throw InvalidArgument("HPolytope: zero normal in row " + std::to_string(i));
        }
    }
    if (!normals_.allFinite() || !offsets_.allFinite()) {
        throw InvalidArgument("HPolytope: non-finite data");
    }
}

HPolytope HPolytope::whole_space(int dim) { return HPolytope(dim, Mat(0, dim), Vec(0)); }

HPolytope HPolytope::normalized() const {
    Mat n = normals_;
    Vec o = offsets_;
    for (int i = 0; i < n.rows(); ++i) {
        double len = n.row(i).norm();
        if (len == 0.0) {
            continue; // 0 <= o(i): all or nothing
        }
        n.row(i) /= len;
        o(i) /= len;
    }
    return HPolytope(dim_, n, o);
}

HPolytope HPolytope::intersect(const HPolytope& other) const {
    require_dims(dim_ == other.dim_, "HPolytope intersect: dimension mismatch");
    Mat n(rows() + other.rows(), dim_);
    Vec o(rows() + other.rows());
    n << normals_, other.normals_;
    o << offsets_, other.offsets_;
    return HPolytope(dim_, n, o);
}

double HPolytope::max_violation(const Vec& x) const {
    require_dims(x.size() == dim_, "HPolytope: point dimension mismatch");
    double worst = -INFINITY;
    for (int i = 0; i < rows(); ++i) {
        const double len = normals_.row(i).norm();
        worst = std::max(worst, len == 0.0 ? -offsets_(i) : (normals_.row(i).dot(x) - offsets_(i)) / len);
    }
    return rows() == 0 ? 0.0 : worst;
}

std::vector<int> extreme_indices(const Points& points, double eps) {
    const int d = static_cast<int>(points.front().size());
    if (d <= 3) {
        return hull::compute(points, eps, 0.0).extreme;
    }
    // Exact duplicates only: sort indices lexicographically, keep the first of each run.
    std::vector<int> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = static_cast<int>(i);
    }
    auto lex = [&](int a, int b) {
        const Vec& x = points[a];
        const Vec& y = points[b];
        return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
    };
    std::stable_sort(order.begin(), order.end(), lex);
    std::vector<int> keep;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || points[order[i]] != points[order[i - 1]]) {
            keep.push_back(order[i]);
        }
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

VPolytope pruned(const VPolytope& p, double eps) {
    Points out;
    for (int i : extreme_indices(p.vertices(), eps)) {
        out.push_back(p.vertex(i));
    }
    return VPolytope(std::move(out));
}

VPolytope minkowski_sum(const VPolytope& p, const VPolytope& q) {
    require_dims(p.dim() == q.dim(), "minkowski_sum: dimension mismatch");
    Points sums;
    sums.reserve(p.size() * q.size());
    for (const auto& a : p.vertices()) {
        for (const auto& b : q.vertices()) {
            sums.push_back(a + b);
        }
    }
    VPolytope out(std::move(sums));
    return p.dim() <= 3 ? pruned(out) : out;
}

VPolytope linear_image(const Mat& m, const VPolytope& p) {
    require_dims(m.cols() == p.dim(), "linear_image: matrix columns != polytope dim");
    Points out;
    out.reserve(p.size());
    for (const auto& v : p.vertices()) {
        out.push_back(m * v);
    }
    return VPolytope(std::move(out));
}

VPolytope translate(const VPolytope& p, const Vec& offset) {
    require_dims(offset.size() == p.dim(), "translate: dimension mismatch");
    Points out;
    for (const auto& v : p.vertices()) {
        out.push_back(v + offset);
    }
    return VPolytope(std::move(out));
}

VPolytope hull_union(const VPolytope& p, const VPolytope& q) {
    require_dims(p.dim() == q.dim(), "hull_union: dimension mismatch");
    Points out = p.vertices();
    out.insert(out.end(), q.vertices().begin(), q.vertices().end());
    return VPolytope(std::move(out));
}

HPolytope convex_hull_h(const VPolytope& p, const Tolerances& tol) {
    hull::Hull h = hull::compute(p.vertices(), tol.geom_eps, tol.geom_eps);
    return HPolytope(p.dim(), h.normals, h.offsets);
}

HPolytope convex_hull_h_tight(const VPolytope& p, const Tolerances& tol) {
    hull::Hull h = hull::compute(p.vertices(), tol.geom_eps, 0.0);
    return HPolytope(p.dim(), h.normals, h.offsets);
}

Containment containment(const VPolytope& inner, const VPolytope& outer, const Tolerances& tol) {
    require_dims(inner.dim() == outer.dim(), "hull_contains: dimension mismatch");
    Containment c;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        double d = point_distance(inner.vertex(i), outer, tol).distance;
        if (c.worst_index < 0 || d > c.worst_distance) {
            c.worst_distance = d;
            c.worst_index = static_cast<int>(i);
        }
    }
    c.contained = c.worst_distance <= tol.geom_eps;
    return c;
}

bool hull_contains(const VPolytope& inner, const VPolytope& outer, const Tolerances& tol) {
    require_dims(inner.dim() == outer.dim(), "hull_contains: dimension mismatch");
    for (const auto& v : inner.vertices()) {
        if (point_distance(v, outer, tol).distance > tol.geom_eps) {
            return false;
        }
    }
    return true;
}

bool hulls_intersect(const VPolytope& p, const VPolytope& q, const Tolerances& tol) {
    return gjk_distance(p, q, tol) <= tol.geom_eps;
}

namespace {

lp::Options lp_options(const Tolerances& tol) {
    lp::Options o;
    o.feas_tol = std::max(tol.lp_eps, 1e-12);
    return o;
}

lp::Result checked(lp::Result r) {
    if (r.status == lp::Status::iteration_limit) {
        throw NumericalError("simplex did not converge");
    }
    return r;
}

} // namespace

std::optional<Vec> lp_feasible_point(const HPolytope& h, const Tolerances& tol) {
    const HPolytope hn = h.normalized();
    const int d = h.dim();
    // Variables (x free, t >= 0): minimize t  s.t.  H x - t <= h.
    lp::LinearProgram prog(d + 1);
    prog.free.assign(d + 1, true);
    prog.free[d] = false;
    prog.cost(d) = 1.0;
    for (int i = 0; i < hn.rows(); ++i) {
        Vec row(d + 1);
        row << hn.normals().row(i).transpose(), -1.0;
        prog.add_le(row, hn.offsets()(i));
    }
    lp::Result r = checked(lp::solve(prog, lp_options(tol)));
    if (r.status != lp::Status::optimal || r.x(d) > tol.lp_eps) {
        return std::nullopt;
    }
    return Vec(r.x.head(d));
}

std::optional<Vec> lp_feasible_in_hull(const HPolytope& h, const VPolytope& v, const Tolerances& tol) {
    require_dims(h.dim() == v.dim(), "lp_feasible_in_hull: dimension mismatch");
    if (h.rows() == 0) {
        return v.vertex(0);
    }
    const HPolytope hn = h.normalized();
    const int nv = static_cast<int>(v.size());
    const Mat vm = v.as_matrix();
    // Variables (lambda >= 0, t >= 0): minimize t  s.t.  sum lambda = 1,  H V lambda - t <= h.
    lp::LinearProgram prog(nv + 1);
    prog.cost(nv) = 1.0;
    Vec ones = Vec::Zero(nv + 1);
    ones.head(nv).setOnes();
    prog.add_eq(ones, 1.0);
    const Mat hv = hn.normals() * vm;
    for (int i = 0; i < hn.rows(); ++i) {
        Vec row(nv + 1);
        row << hv.row(i).transpose(), -1.0;
        prog.add_le(row, hn.offsets()(i));
    }
    lp::Result r = checked(lp::solve(prog, lp_options(tol)));
    if (r.status != lp::Status::optimal || r.x(nv) > tol.lp_eps) {
        return std::nullopt;
    }
    return Vec(vm * r.x.head(nv));
}

std::optional<Vec> lp_maximize(const HPolytope& h, const Vec& direction, const Tolerances& tol) {
    require_dims(direction.size() == h.dim(), "lp_maximize: dimension mismatch");
    const HPolytope hn = h.normalized();
    lp::LinearProgram prog(h.dim());
    prog.free.assign(h.dim(), true);
    prog.cost = -direction;
    for (int i = 0; i < hn.rows(); ++i) {
        prog.add_le(hn.normals().row(i).transpose(), hn.offsets()(i));
    }
    lp::Result r = checked(lp::solve(prog, lp_options(tol)));
    if (r.status != lp::Status::optimal) {
        return std::nullopt;
    }
    return r.x;
}

std::optional<VPolytope> enumerate_vertices(const HPolytope& h, const Tolerances& tol) {
    const int d = h.dim();
    if (d > 3) {
        throw UnsupportedDimension("vertex enumeration requires dimension <= 3");
    }
    if (!lp_feasible_point(h, tol)) {
        throw InvalidArgument("vertex enumeration of an empty H-polytope");
    }
    // Sets that are feasible only within lp_eps (thin hulls cut by other rows)
    // are widened by that slack so the exact-feasibility LPs below succeed.
    const HPolytope tight = h.normalized();
    const HPolytope widened(d, tight.normals(), tight.offsets().array() + std::max(tol.lp_eps, tol.geom_eps));
    for (int i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
            if (!lp_maximize(widened, s * Vec::Unit(d, i), tol)) {
                return std::nullopt;
            }
        }
    }
    const HPolytope& hn = tight;
    const int m = hn.rows();
    const double slack = std::max(tol.geom_eps, tol.lp_eps) * 4.0;
    Points pts;
    std::vector<int> pick(d);
    // Every combination of d rows whose boundary planes meet in one point.
    std::vector<bool> sel(m, false);
    std::fill(sel.begin(), sel.begin() + std::min(d, m), true);
    if (m >= d) {
        do {
            int k = 0;
            for (int i = 0; i < m; ++i) {
                if (sel[i]) {
                    pick[k++] = i;
                }
            }
            Mat a(d, d);
            Vec b(d);
            for (int r = 0; r < d; ++r) {
                a.row(r) = hn.normals().row(pick[r]);
                b(r) = hn.offsets()(pick[r]);
            }
            Eigen::FullPivLU<Mat> lu(a);
            lu.setThreshold(1e-10);
            if (lu.rank() < d) {
                continue;
            }
            Vec x = lu.solve(b);
            if (hn.max_violation(x) <= slack) {
                pts.push_back(x);
            }
        } while (std::prev_permutation(sel.begin(), sel.end()));
    }
    if (pts.empty()) {
        // Bounded and nonempty but numerically vertex-free: fall back to a feasible point.
        pts.push_back(*lp_feasible_point(tight, tol));
    }
    return pruned(VPolytope(std::move(pts)), tol.geom_eps);
}

std::optional<VPolytope> hull_intersection(const VPolytope& p, const VPolytope& q, const Tolerances& tol) {
    require_dims(p.dim() == q.dim(), "hull_intersection: dimension mismatch");
    if (!hulls_intersect(p, q, tol)) {
        return std::nullopt;
    }
    HPolytope h = convex_hull_h(p, tol).intersect(convex_hull_h(q, tol));
    if (!lp_feasible_point(h, tol)) {
        return std::nullopt;
    }
    return enumerate_vertices(h, tol);
}

} // namespace opaque
