// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/gjk.hpp"

#include "opaque/error.hpp"
#include "opaque/zonotope.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace opaque {
namespace gjk {

SupportFn support_of(const VPolytope& p) {
    return [&p](const Vec& dir) {
        int best = 0;
        double value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < p.size(); ++i) {
            double s = dir.dot(p.vertex(i));
            if (s > value) {
                value = s;
                best = static_cast<int>(i);
            }
        }
        return SupportPoint{p.vertex(best), best};
    };
}

SupportFn support_of(const Zonotope& z) {
    return [&z](const Vec& dir) { return SupportPoint{z.support_point(dir), -1}; };
}

std::pair<Vec, std::vector<double>> min_norm_in_hull(const Points& pts) {
    const int k = static_cast<int>(pts.size());
    const int dim = static_cast<int>(pts.front().size());
    double best_norm = std::numeric_limits<double>::infinity();
    Vec best_point = pts.front();
    std::vector<double> best_weights(k, 0.0);
    best_weights[0] = 1.0;

    // The minimizer lies in the relative interior of some face, where it is the
    // affine minimizer of that face's vertices; enumerate all subsets.
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        std::vector<int> sub;
        for (int i = 0; i < k; ++i) {
            if (mask & (1u << i)) {
                sub.push_back(i);
            }
        }
        const int s = static_cast<int>(sub.size());
        std::vector<double> lambda(k, 0.0);
        Vec point;
        if (s == 1) {
            point = pts[sub[0]];
            lambda[sub[0]] = 1.0;
        } else {
            if (s - 1 > dim) {
                continue;
            }
            Mat diff(dim, s - 1);
            for (int j = 1; j < s; ++j) {
                diff.col(j - 1) = pts[sub[j]] - pts[sub[0]];
            }
            Eigen::ColPivHouseholderQR<Mat> qr(diff);
            qr.setThreshold(1e-12);
            if (qr.rank() < s - 1) {
                continue;
            }
            Vec mu = qr.solve(-pts[sub[0]]);
            double l0 = 1.0 - mu.sum();
            if (l0 < -1e-12 || (mu.array() < -1e-12).any()) {
                continue;
            }
            lambda[sub[0]] = std::max(0.0, l0);
            for (int j = 1; j < s; ++j) {
                lambda[sub[j]] = std::max(0.0, mu(j - 1));
            }
            double total = 0.0;
            for (double l : lambda) {
                total += l;
            }
            point = Vec::Zero(dim);
            for (int i = 0; i < k; ++i) {
                lambda[i] /= total;
                point += lambda[i] * pts[i];
            }
        }
        double nrm = point.norm();
        if (nrm < best_norm - 1e-15) {
            best_norm = nrm;
            best_point = point;
            best_weights = lambda;
        }
    }
    return {best_point, best_weights};
}

Result distance(const SupportFn& a, const SupportFn& b, int dim, double eps, int max_iterations) {
    struct Vertex {
        Vec w;
        SupportPoint sa, sb;
    };
    std::vector<Vertex> simplex;
    SupportPoint sa = a(Vec::Unit(dim, 0));
    SupportPoint sb = b(-Vec::Unit(dim, 0));
    Vec v = sa.point - sb.point;
    std::vector<double> weights;
    simplex.push_back({v, sa, sb});
    weights.push_back(1.0);

    Result res;
    while (true) {
        double vn = v.norm();
        if (vn <= eps) {
            break;
        }
        if (res.iterations >= max_iterations) {
            res.converged = false;
            break;
        }
        ++res.iterations;
        SupportPoint na = a(-v);
        SupportPoint nb = b(v);
        Vec w = na.point - nb.point;
        // ||v|| - v.w/||v|| bounds the error of ||v|| as the distance.
        if (vn * vn - v.dot(w) <= eps * vn) {
            break;
        }
        bool repeated = false;
        for (const auto& s : simplex) {
            if ((s.w - w).norm() <= 1e-14 * (1.0 + w.norm())) {
                repeated = true;
            }
        }
        if (repeated) {
            break;
        }
        simplex.push_back({w, na, nb});
        Points pts;
        for (const auto& s : simplex) {
            pts.push_back(s.w);
        }
        auto [closest, lambda] = min_norm_in_hull(pts);
        std::vector<Vertex> reduced;
        weights.clear();
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (lambda[i] > 0.0) {
                reduced.push_back(simplex[i]);
                weights.push_back(lambda[i]);
            }
        }
        simplex = std::move(reduced);
        double cn = closest.norm();
        v = closest;
        if (cn >= vn - 1e-14 * std::max(1.0, vn)) {
            break; // no progress: numerical floor reached
        }
    }

    res.distance = v.norm() <= eps ? 0.0 : v.norm();
    res.closest_a = Vec::Zero(dim);
    res.closest_b = Vec::Zero(dim);
    std::map<int, double> wa, wb;
    for (std::size_t i = 0; i < simplex.size(); ++i) {
        res.closest_a += weights[i] * simplex[i].sa.point;
        res.closest_b += weights[i] * simplex[i].sb.point;
        wa[simplex[i].sa.index] += weights[i];
        wb[simplex[i].sb.index] += weights[i];
    }
    res.weights_a.assign(wa.begin(), wa.end());
    res.weights_b.assign(wb.begin(), wb.end());
    return res;
}

} // namespace gjk

gjk::Result gjk_query(const VPolytope& p, const VPolytope& q, const Tolerances& tol) {
    require_dims(p.dim() == q.dim(), "gjk_distance: dimension mismatch");
    return gjk::distance(gjk::support_of(p), gjk::support_of(q), p.dim(), tol.gjk_eps);
}

double gjk_distance(const VPolytope& p, const VPolytope& q, const Tolerances& tol) { return gjk_query(p, q, tol).distance; }

gjk::Result point_distance(const Vec& x, const VPolytope& q, const Tolerances& tol) {
    require_dims(x.size() == q.dim(), "point_distance: dimension mismatch");
    gjk::SupportFn point = [&x](const Vec&) { return gjk::SupportPoint{x, 0}; };
    return gjk::distance(point, gjk::support_of(q), q.dim(), tol.gjk_eps);
}

} // namespace opaque
