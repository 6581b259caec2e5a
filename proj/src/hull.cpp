// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/hull.hpp"

#include "opaque/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace opaque::hull {

AffineFrame affine_frame(const Points& points, double flat_tol) {
    const int d = static_cast<int>(points.front().size());
    const int n = static_cast<int>(points.size());
    AffineFrame frame;
    frame.center = Vec::Zero(d);
    for (const auto& p : points) {
        frame.center += p;
    }
    frame.center /= static_cast<double>(n);

    Mat centered(d, n);
    for (int j = 0; j < n; ++j) {
        centered.col(j) = points[j] - frame.center;
    }
    Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullU);
    const Mat& u = svd.matrixU();
    std::vector<int> in_span, flat;
    for (int i = 0; i < d; ++i) {
        double extent = n > 0 ? (u.col(i).transpose() * centered).cwiseAbs().maxCoeff() : 0.0;
        (extent > flat_tol ? in_span : flat).push_back(i);
    }
    frame.basis.resize(d, static_cast<int>(in_span.size()));
    frame.complement.resize(d, static_cast<int>(flat.size()));
    for (std::size_t i = 0; i < in_span.size(); ++i) {
        frame.basis.col(static_cast<int>(i)) = u.col(in_span[i]);
    }
    for (std::size_t i = 0; i < flat.size(); ++i) {
        frame.complement.col(static_cast<int>(i)) = u.col(flat[i]);
    }
    return frame;
}

std::vector<int> monotone_chain(const std::vector<Eigen::Vector2d>& pts, double eps) {
    std::vector<int> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (pts[a].x() != pts[b].x()) {
            return pts[a].x() < pts[b].x();
        }
        return pts[a].y() < pts[b].y();
    });
    auto cross = [&](int o, int a, int b) {
        Eigen::Vector2d oa = pts[a] - pts[o];
        Eigen::Vector2d ob = pts[b] - pts[o];
        return oa.x() * ob.y() - oa.y() * ob.x();
    };
    // Pop a when it sits within eps of the chord o->b (or to its right).
    auto left_turn = [&](int o, int a, int b) { return cross(o, a, b) > eps * (pts[b] - pts[o]).norm(); };
    if (idx.size() < 3) {
        return idx;
    }
    std::vector<int> hull(2 * idx.size());
    std::size_t k = 0;
    for (int i : idx) {
        while (k >= 2 && !left_turn(hull[k - 2], hull[k - 1], i)) {
            --k;
        }
        hull[k++] = i;
    }
    for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
        int i = idx[t];
        while (k >= lower && !left_turn(hull[k - 2], hull[k - 1], i)) {
            --k;
        }
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

using V3 = Eigen::Vector3d;

struct Face {
    std::array<int, 3> v;
    V3 normal;
    double offset;
    bool alive = true;
};

// Incremental 3-D hull over points known to span R^3.
class Hull3 {
  public:
    Hull3(const std::vector<V3>& pts, double eps) : pts_(pts), eps_(eps) {}

    void build() {
        std::array<int, 4> seed = initial_simplex();
        interior_ = (pts_[seed[0]] + pts_[seed[1]] + pts_[seed[2]] + pts_[seed[3]]) / 4.0;
        add_face(seed[0], seed[1], seed[2]);
        add_face(seed[0], seed[1], seed[3]);
        add_face(seed[0], seed[2], seed[3]);
        add_face(seed[1], seed[2], seed[3]);
        std::set<int> used(seed.begin(), seed.end());
        for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
            if (!used.count(i)) {
                insert(i);
            }
        }
    }

    const std::vector<Face>& faces() const { return faces_; }

  private:
    std::array<int, 4> initial_simplex() const {
        const int n = static_cast<int>(pts_.size());
        int a = 0;
        for (int i = 1; i < n; ++i) {
            if (pts_[i].x() < pts_[a].x()) {
                a = i;
            }
        }
        int b = a;
        double best = -1;
        for (int i = 0; i < n; ++i) {
            double d = (pts_[i] - pts_[a]).squaredNorm();
            if (d > best) {
                best = d;
                b = i;
            }
        }
        V3 ab = (pts_[b] - pts_[a]).normalized();
        int c = a;
        best = -1;
        for (int i = 0; i < n; ++i) {
            V3 ap = pts_[i] - pts_[a];
            double d = (ap - ap.dot(ab) * ab).squaredNorm();
            if (d > best) {
                best = d;
                c = i;
            }
        }
        V3 nrm = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]).normalized();
        int e = a;
        best = -1;
        for (int i = 0; i < n; ++i) {
            double d = std::abs(nrm.dot(pts_[i] - pts_[a]));
            if (d > best) {
                best = d;
                e = i;
            }
        }
        return {a, b, c, e};
    }

    void add_face(int a, int b, int c) {
        V3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
        double len = n.norm();
        if (len > 0) {
            n /= len;
        }
        if (n.dot(interior_ - pts_[a]) > 0) {
            std::swap(b, c);
            n = -n;
        }
        faces_.push_back(Face{{a, b, c}, n, n.dot(pts_[a]), true});
    }

    void insert(int p) {
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
            if (faces_[f].alive && faces_[f].normal.dot(pts_[p]) - faces_[f].offset > eps_) {
                visible.push_back(f);
            }
        }
        if (visible.empty()) {
            return;
        }
        std::set<std::pair<int, int>> edges;
        for (int f : visible) {
            const auto& v = faces_[f].v;
            for (int e = 0; e < 3; ++e) {
                edges.insert({v[e], v[(e + 1) % 3]});
            }
            faces_[f].alive = false;
        }
        for (const auto& [u, w] : edges) {
            if (!edges.count({w, u})) {
                add_face(u, w, p);
            }
        }
    }

    const std::vector<V3>& pts_;
    double eps_;
    V3 interior_;
    std::vector<Face> faces_;
};

void push_row(std::vector<Vec>& normals, std::vector<double>& offsets, const Vec& n, double off) {
    normals.push_back(n);
    offsets.push_back(off);
}

} // namespace

Hull compute(const Points& points, double eps, double slack) {
    if (points.empty()) {
        throw InvalidArgument("hull of an empty point set");
    }
    const int d = static_cast<int>(points.front().size());
    if (d > 3) {
        throw UnsupportedDimension("exact hull requires dimension <= 3, got " + std::to_string(d));
    }
    double radius = 0.0;
    Vec mean = Vec::Zero(d);
    for (const auto& p : points) {
        mean += p;
    }
    mean /= static_cast<double>(points.size());
    for (const auto& p : points) {
        radius = std::max(radius, (p - mean).norm());
    }
    const double flat_tol = std::max(4.0 * eps, 1e-10 * radius);
    AffineFrame frame = affine_frame(points, flat_tol);
    const int r = frame.affine_dim();
    const int n = static_cast<int>(points.size());

    Hull out;
    out.affine_dim = r;
    std::vector<Vec> normals;
    std::vector<double> offsets;

    for (int i = 0; i < frame.complement.cols(); ++i) {
        Vec w = frame.complement.col(i);
        double hi = -INFINITY, lo = INFINITY;
        for (const auto& p : points) {
            double s = w.dot(p);
            hi = std::max(hi, s);
            lo = std::min(lo, s);
        }
        push_row(normals, offsets, w, hi + slack);
        push_row(normals, offsets, -w, -lo + slack);
    }

    Mat t(r, n);
    for (int j = 0; j < n; ++j) {
        t.col(j) = frame.basis.transpose() * (points[j] - frame.center);
    }

    if (r == 0) {
        int best = 0;
        for (int j = 1; j < n; ++j) {
            if ((points[j] - frame.center).norm() < (points[best] - frame.center).norm()) {
                best = j;
            }
        }
        out.extreme = {best};
    } else if (r == 1) {
        int imin = 0, imax = 0;
        for (int j = 1; j < n; ++j) {
            if (t(0, j) < t(0, imin)) {
                imin = j;
            }
            if (t(0, j) > t(0, imax)) {
                imax = j;
            }
        }
        Vec u = frame.basis.col(0);
        push_row(normals, offsets, u, u.dot(points[imax]));
        push_row(normals, offsets, -u, -u.dot(points[imin]));
        out.extreme = {imin, imax};
    } else if (r == 2) {
        std::vector<Eigen::Vector2d> pts(n);
        for (int j = 0; j < n; ++j) {
            pts[j] = t.col(j);
        }
        std::vector<int> chain = monotone_chain(pts, eps);
        for (std::size_t e = 0; e < chain.size(); ++e) {
            int a = chain[e], b = chain[(e + 1) % chain.size()];
            Eigen::Vector2d dir = pts[b] - pts[a];
            Eigen::Vector2d n2(dir.y(), -dir.x());
            if (n2.norm() == 0) {
                continue;
            }
            n2.normalize();
            Vec lifted = frame.basis * n2;
            push_row(normals, offsets, lifted, lifted.dot(points[a]));
        }
        out.extreme = chain;
    } else {
        std::vector<V3> pts(n);
        for (int j = 0; j < n; ++j) {
            pts[j] = t.col(j);
        }
        Hull3 h(pts, eps);
        h.build();
        std::set<int> used;
        for (const auto& f : h.faces()) {
            if (!f.alive || f.normal.norm() < 0.5) {
                continue;
            }
            used.insert(f.v.begin(), f.v.end());
            Vec lifted = frame.basis * f.normal;
            push_row(normals, offsets, lifted, lifted.dot(points[f.v[0]]));
        }
        out.extreme.assign(used.begin(), used.end());
    }

    // Coplanar triangles share a plane; keep one row per plane.
    std::vector<int> keep;
    const double scale = std::max(1.0, radius + mean.norm());
    for (std::size_t i = 0; i < normals.size(); ++i) {
        bool dup = false;
        for (int k : keep) {
            if ((normals[k] - normals[i]).norm() < 1e-9 && std::abs(offsets[k] - offsets[i]) < 1e-9 * scale) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            keep.push_back(static_cast<int>(i));
        }
    }
    out.normals.resize(static_cast<int>(keep.size()), d);
    out.offsets.resize(static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.normals.row(static_cast<int>(i)) = normals[keep[i]].transpose();
        out.offsets(static_cast<int>(i)) = offsets[keep[i]];
    }
    std::sort(out.extreme.begin(), out.extreme.end());
    return out;
}

} // namespace opaque::hull
