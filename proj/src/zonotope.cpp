// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/zonotope.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace opaque {

Zonotope::Zonotope(Vec center, Mat generators) : center_(std::move(center)), generators_(std::move(generators)) {
    if (center_.size() == 0) {
        throw InvalidArgument("zonotope dimension must be positive");
    }
    if (generators_.cols() == 0) {
        generators_.resize(center_.size(), 0);
    }
    require_dims(generators_.rows() == center_.size(), "zonotope: generator length != dim");
    if (!center_.allFinite() || !generators_.allFinite()) {
        throw InvalidArgument("zonotope: non-finite data");
    }
}

Zonotope Zonotope::singleton(const Vec& point) { return Zonotope(point, Mat(point.size(), 0)); }

Zonotope Zonotope::box(const Vec& lo, const Vec& hi) {
    require_dims(lo.size() == hi.size(), "zonotope box: bound lengths differ");
    std::vector<int> axes;
    for (int i = 0; i < lo.size(); ++i) {
        if (hi(i) < lo(i)) {
            throw InvalidArgument("zonotope box: hi < lo");
        }
        if (hi(i) > lo(i)) {
            axes.push_back(i);
        }
    }
    Mat g = Mat::Zero(lo.size(), static_cast<int>(axes.size()));
    for (std::size_t j = 0; j < axes.size(); ++j) {
        g(axes[j], static_cast<int>(j)) = 0.5 * (hi(axes[j]) - lo(axes[j]));
    }
    return Zonotope(0.5 * (lo + hi), g);
}

Vec Zonotope::support_point(const Vec& dir) const {
    Vec p = center_;
    for (int j = 0; j < num_generators(); ++j) {
        p += (dir.dot(generators_.col(j)) >= 0 ? 1.0 : -1.0) * generators_.col(j);
    }
    return p;
}

Vec Zonotope::radius() const { return generators_.cwiseAbs().rowwise().sum(); }

double Zonotope::distance_to(const Vec& x, const Tolerances& tol) const {
    require_dims(x.size() == dim(), "zonotope distance: dimension mismatch");
    gjk::SupportFn point = [&x](const Vec&) { return gjk::SupportPoint{x, 0}; };
    return gjk::distance(point, gjk::support_of(*this), dim(), tol.gjk_eps).distance;
}

Zonotope zonotope_image(const Mat& m, const Zonotope& z) {
    require_dims(m.cols() == z.dim(), "zonotope_image: matrix columns != dim");
    return Zonotope(m * z.center(), m * z.generators());
}

Zonotope zonotope_sum(const Zonotope& a, const Zonotope& b) {
    require_dims(a.dim() == b.dim(), "zonotope_sum: dimension mismatch");
    Mat g(a.dim(), a.num_generators() + b.num_generators());
    g << a.generators(), b.generators();
    return Zonotope(a.center() + b.center(), g);
}

namespace {

std::vector<int> by_decreasing_norm(const Mat& g) {
    std::vector<int> idx(g.cols());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return g.col(a).norm() > g.col(b).norm(); });
    return idx;
}

void check_order(int order) {
    if (order < 1) {
        throw InvalidArgument("zonotope reduction order must be >= 1");
    }
}

} // namespace

Zonotope zonotope_reduce_over(const Zonotope& z, int order) {
    check_order(order);
    const int budget = order * z.dim();
    if (z.num_generators() <= budget) {
        return z;
    }
    std::vector<int> idx = by_decreasing_norm(z.generators());
    const int keep = budget - z.dim();
    Vec box = Vec::Zero(z.dim());
    for (std::size_t j = keep; j < idx.size(); ++j) {
        box += z.generators().col(idx[j]).cwiseAbs();
    }
    std::vector<Vec> gens;
    for (int j = 0; j < keep; ++j) {
        gens.push_back(z.generators().col(idx[j]));
    }
    for (int i = 0; i < z.dim(); ++i) {
        if (box(i) > 0) {
            gens.push_back(box(i) * Vec::Unit(z.dim(), i));
        }
    }
    Mat g(z.dim(), static_cast<int>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j) {
        g.col(static_cast<int>(j)) = gens[j];
    }
    return Zonotope(z.center(), g);
}

Zonotope zonotope_reduce_under(const Zonotope& z, int order) {
    check_order(order);
    const int budget = order * z.dim();
    if (z.num_generators() <= budget) {
        return z;
    }
    std::vector<int> idx = by_decreasing_norm(z.generators());
    Mat g(z.dim(), budget);
    for (int j = 0; j < budget; ++j) {
        g.col(j) = z.generators().col(idx[j]);
    }
    return Zonotope(z.center(), g);
}

namespace {

// Vertices of a planar zonotope, counter-clockwise.
std::vector<Eigen::Vector2d> zonogon(const Eigen::Vector2d& c, std::vector<Eigen::Vector2d> gens) {
    for (auto& g : gens) {
        if (g.y() < 0 || (g.y() == 0 && g.x() < 0)) {
            g = -g;
        }
    }
    gens.erase(std::remove_if(gens.begin(), gens.end(), [](const Eigen::Vector2d& g) { return g.norm() == 0; }),
               gens.end());
    std::sort(gens.begin(), gens.end(),
              [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x()); });
    Eigen::Vector2d p = c;
    for (const auto& g : gens) {
        p -= g;
    }
    std::vector<Eigen::Vector2d> out{p};
    for (const auto& g : gens) {
        p += 2 * g;
        out.push_back(p);
    }
    for (const auto& g : gens) {
        p -= 2 * g;
        out.push_back(p);
    }
    out.pop_back(); // back at the start
    return out;
}

} // namespace

VPolytope zonotope_to_vpolytope(const Zonotope& z) {
    const int d = z.dim();
    std::vector<Vec> gens;
    for (int j = 0; j < z.num_generators(); ++j) {
        if (z.generators().col(j).norm() > 0) {
            gens.push_back(z.generators().col(j));
        }
    }
    const int g = static_cast<int>(gens.size());
    Points pts;
    if (g == 0) {
        return VPolytope::singleton(z.center());
    }
    if (d == 1) {
        double r = 0;
        for (const auto& v : gens) {
            r += std::abs(v(0));
        }
        return VPolytope({z.center().array() - r, z.center().array() + r});
    }
    if (d == 2) {
        std::vector<Eigen::Vector2d> g2;
        for (const auto& v : gens) {
            g2.emplace_back(v(0), v(1));
        }
        for (const auto& p : zonogon(Eigen::Vector2d(z.center()(0), z.center()(1)), g2)) {
            pts.push_back(Vec(p));
        }
        return pruned(VPolytope(pts));
    }
    if (d == 3) {
        const double scale = std::max(1.0, z.radius().norm());
        for (int i = 0; i < g; ++i) {
            for (int j = i + 1; j < g; ++j) {
                Eigen::Vector3d n = Eigen::Vector3d(gens[i]).cross(Eigen::Vector3d(gens[j]));
                if (n.norm() <= 1e-12 * gens[i].norm() * gens[j].norm()) {
                    continue;
                }
                n.normalize();
                Eigen::Vector3d e1 = Eigen::Vector3d(gens[i]).normalized();
                Eigen::Vector3d e2 = n.cross(e1);
                for (double s : {1.0, -1.0}) {
                    Vec base = z.center();
                    std::vector<Eigen::Vector2d> planar;
                    for (const auto& v : gens) {
                        double dot = s * n.dot(Eigen::Vector3d(v));
                        if (std::abs(dot) <= 1e-12 * scale) {
                            planar.emplace_back(e1.dot(Eigen::Vector3d(v)), e2.dot(Eigen::Vector3d(v)));
                        } else {
                            base += (dot > 0 ? 1.0 : -1.0) * v;
                        }
                    }
                    for (const auto& q : zonogon(Eigen::Vector2d::Zero(), planar)) {
                        pts.push_back(base + Vec(q.x() * e1 + q.y() * e2));
                    }
                }
            }
        }
        if (pts.empty()) {
            // All generators parallel: a segment.
            Vec u = gens.front().normalized();
            Vec r = Vec::Zero(3);
            for (const auto& v : gens) {
                r += (u.dot(v) >= 0 ? 1.0 : -1.0) * v;
            }
            return VPolytope({z.center() - r, z.center() + r});
        }
        return pruned(VPolytope(pts));
    }
    if (g > 12) {
        throw SizeLimitError("zonotope_to_vpolytope: " + std::to_string(g) + " generators in dimension " +
                             std::to_string(d) + " exceeds the 12-generator enumeration limit");
    }
    for (unsigned mask = 0; mask < (1u << g); ++mask) {
        Vec p = z.center();
        for (int j = 0; j < g; ++j) {
            p += ((mask >> j) & 1u ? 1.0 : -1.0) * gens[j];
        }
        pts.push_back(p);
    }
    return pruned(VPolytope(pts));
}

Zonotope bounding_box_zonotope(const VPolytope& p) { return Zonotope::box(p.lower_bound(), p.upper_bound()); }

} // namespace opaque
