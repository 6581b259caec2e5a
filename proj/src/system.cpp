// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/system.hpp"

#include "opaque/error.hpp"

#include <algorithm>
#include <cmath>

namespace opaque {

LtiSystem::LtiSystem(Mat a, Mat b, Mat c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (a_.rows() == 0 || b_.cols() == 0 || c_.rows() == 0) {
        throw InvalidArgument("system dimensions n, m, p must be positive");
    }
    require_dims(a_.rows() == a_.cols(), "A must be square");
    require_dims(b_.rows() == a_.rows(), "B must have n rows");
    require_dims(c_.cols() == a_.rows(), "C must have n columns");
    if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite()) {
        throw InvalidArgument("system matrices must be finite");
    }
}

Mat LtiSystem::output_control_matrix(int k) const {
    Mat out(p(), k * m());
    Mat ca = c_;
    // Column block j multiplies u(j), which enters y(k) through C A^{k-1-j} B.
    for (int j = k - 1; j >= 0; --j) {
        out.middleCols(j * m(), m()) = ca * b_;
        ca = ca * a_;
    }
    return out;
}

InputSet::InputSet(VPolytope p) : kind_(Kind::polytope), dim_(p.dim()), poly_(std::move(p)) {}
InputSet::InputSet(Zonotope z) : kind_(Kind::zonotope), dim_(z.dim()), zono_(std::move(z)) {}

InputSet InputSet::unbounded(int m) {
    if (m <= 0) {
        throw InvalidArgument("input dimension must be positive");
    }
    InputSet s(VPolytope::singleton(Vec::Zero(m)));
    s.kind_ = Kind::unbounded;
    s.poly_.reset();
    return s;
}

const VPolytope& InputSet::polytope() const {
    if (!poly_) {
        throw InvalidArgument("input set is not a V-polytope");
    }
    return *poly_;
}

const Zonotope& InputSet::zonotope() const {
    if (!zono_) {
        throw InvalidArgument("input set is not a zonotope");
    }
    return *zono_;
}

VPolytope InputSet::vertices() const {
    switch (kind_) {
    case Kind::polytope:
        return *poly_;
    case Kind::zonotope:
        return zonotope_to_vpolytope(*zono_);
    case Kind::unbounded:
        break;
    }
    throw InvalidArgument("unbounded input set has no vertices");
}

Zonotope InputSet::outer_zonotope() const {
    switch (kind_) {
    case Kind::polytope:
        return bounding_box_zonotope(*poly_);
    case Kind::zonotope:
        return *zono_;
    case Kind::unbounded:
        break;
    }
    throw InvalidArgument("unbounded input set has no enclosing zonotope");
}

std::string to_string(Space s) { return s == Space::state ? "state" : "output"; }

std::string to_string(Fidelity f) {
    switch (f) {
    case Fidelity::exact:
        return "exact";
    case Fidelity::over:
        return "over";
    case Fidelity::under:
        return "under";
    }
    return "?";
}

int ReachSet::dim() const {
    return is_polytope() ? polytope().dim() : zonotope().dim();
}

VPolytope ReachSet::vertices() const {
    return is_polytope() ? polytope() : zonotope_to_vpolytope(zonotope());
}

namespace {

void check_reach_args(const LtiSystem& sys, int x0_dim, const InputSet& u, int k) {
    if (k < 0) {
        throw InvalidArgument("reach: k must be nonnegative");
    }
    require_dims(x0_dim == sys.n(), "reach: initial set dimension != n");
    require_dims(u.dim() == sys.m(), "reach: input set dimension != m");
    if (!u.bounded()) {
        throw InvalidArgument("reach: exact reach sets need a bounded input set");
    }
}

Zonotope reach_zonotope(const LtiSystem& sys, const Zonotope& x0, const Zonotope& u, int k, int order) {
    Zonotope cur = x0;
    const Zonotope bu = zonotope_image(sys.B(), u);
    for (int t = 0; t < k; ++t) {
        cur = zonotope_sum(zonotope_image(sys.A(), cur), bu);
        if (order > 0) {
            cur = zonotope_reduce_over(cur, order);
        }
    }
    return cur;
}

} // namespace

ReachSet reach_exact(const LtiSystem& sys, const VPolytope& x0, const InputSet& u, int k, const ReachOptions& opts) {
    check_reach_args(sys, x0.dim(), u, k);
    ReachSet out{x0, 0, Space::state, Fidelity::exact, {}};
    Points cur = x0.vertices();
    std::vector<Provenance> prov(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
        prov[i].x0 = static_cast<int>(i);
    }
    const VPolytope uv = u.vertices();
    Points bu;
    for (const auto& v : uv.vertices()) {
        bu.push_back(sys.B() * v);
    }
    for (int t = 0; t < k; ++t) {
        Points next;
        std::vector<Provenance> next_prov;
        next.reserve(cur.size() * bu.size());
        next_prov.reserve(cur.size() * bu.size());
        for (std::size_t s = 0; s < cur.size(); ++s) {
            const Vec ax = sys.A() * cur[s];
            for (std::size_t j = 0; j < bu.size(); ++j) {
                next.push_back(ax + bu[j]);
                next_prov.push_back(prov[s]);
                next_prov.back().inputs.push_back(static_cast<int>(j));
            }
        }
        std::vector<int> keep = extreme_indices(next, x0.dim() <= 3 ? 1e-12 : 0.0);
        cur.clear();
        prov.clear();
        for (int i : keep) {
            cur.push_back(std::move(next[i]));
            prov.push_back(std::move(next_prov[i]));
        }
        if (opts.vertex_cap > 0 && cur.size() > opts.vertex_cap) {
            ReachSet over{reach_zonotope(sys, bounding_box_zonotope(x0), u.outer_zonotope(), k, opts.fallback_order), k,
                          Space::state, Fidelity::over, {}};
            return over;
        }
    }
    out.set = VPolytope(std::move(cur));
    out.provenance = std::move(prov);
    out.time = k;
    return out;
}

ReachSet reach_exact(const LtiSystem& sys, const Zonotope& x0, const InputSet& u, int k, const ReachOptions& opts) {
    check_reach_args(sys, x0.dim(), u, k);
    if (u.kind() == InputSet::Kind::zonotope) {
        return ReachSet{reach_zonotope(sys, x0, u.zonotope(), k, 0), k, Space::state, Fidelity::exact, {}};
    }
    return reach_exact(sys, zonotope_to_vpolytope(x0), u, k, opts);
}

ReachSet output_set(const LtiSystem& sys, const ReachSet& r) {
    if (r.space != Space::state) {
        throw InvalidArgument("output_set: reach set is already in output space");
    }
    require_dims(r.dim() == sys.n(), "output_set: reach set dimension != n");
    ReachSet out = r;
    out.space = Space::output;
    if (r.is_polytope()) {
        out.set = linear_image(sys.C(), r.polytope());
    } else {
        out.set = zonotope_image(sys.C(), r.zonotope());
    }
    return out;
}

Trajectory simulate(const LtiSystem& sys, const Vec& x0, const Points& controls) {
    require_dims(x0.size() == sys.n(), "simulate: x0 dimension != n");
    Trajectory t;
    t.states.push_back(x0);
    t.outputs.push_back(sys.C() * x0);
    for (const auto& u : controls) {
        require_dims(u.size() == sys.m(), "simulate: control dimension != m");
        t.states.push_back(sys.A() * t.states.back() + sys.B() * u);
        t.outputs.push_back(sys.C() * t.states.back());
    }
    return t;
}

Mat output_quotient(const LtiSystem& sys, int k) {
    if (k <= 0) {
        return Mat::Identity(sys.p(), sys.p());
    }
    return complement_basis(sys.output_control_matrix(k));
}

namespace {

HPolytope empty_set(int dim) {
    Mat n(2, dim);
    n.setZero();
    n(0, 0) = 1;
    n(1, 0) = -1;
    Vec h(2);
    h << -1, -1;
    return HPolytope(dim, n, h);
}

/// Pulls output-space rows back through G = C A^k. Rows that vanish become
/// trivially true (dropped) or trivially false (empty set).
HPolytope pull_back(const Mat& g, const Mat& normals, const Vec& offsets, double tol) {
    const int n = static_cast<int>(g.cols());
    const Mat rows = normals * g;
    std::vector<int> keep;
    for (int i = 0; i < rows.rows(); ++i) {
        double scale = std::max(1.0, normals.row(i).norm() * g.norm());
        if (rows.row(i).norm() <= 1e-12 * scale) {
            if (offsets(i) < -tol) {
                return empty_set(n);
            }
            continue;
        }
        keep.push_back(i);
    }
    Mat kn(static_cast<int>(keep.size()), n);
    Vec ko(static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        kn.row(static_cast<int>(j)) = rows.row(keep[j]);
        ko(static_cast<int>(j)) = offsets(keep[j]);
    }
    return HPolytope(n, kn, ko);
}

/// Input-only reach set C R_u at horizon k, as output-space points.
Points input_output_points(const LtiSystem& sys, const InputSet& u, int k) {
    ReachSet r = reach_exact(sys, VPolytope::singleton(Vec::Zero(sys.n())), u, k);
    return linear_image(sys.C(), r.vertices()).vertices();
}

double support(const Points& pts, const Vec& dir) {
    double best = -INFINITY;
    for (const auto& p : pts) {
        best = std::max(best, dir.dot(p));
    }
    return best;
}

Vec cross3(const Vec& a, const Vec& b) {
    Vec c(3);
    c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
    return c;
}

/// H-rep of Y ⊕ conv(S) for unbounded Y. The facet normals of a Minkowski sum
/// are facet normals of a summand or, in 3-D, cross products of edge
/// directions; we take a superset of those and evaluate exact support values.
HPolytope unbounded_sum(const HPolytope& y, const Points& s, const Tolerances& tol) {
    const int p = y.dim();
    const HPolytope yn = y.normalized();
    Points candidates;
    for (int i = 0; i < yn.rows(); ++i) {
        candidates.push_back(yn.normals().row(i).transpose());
    }
    const VPolytope sv = pruned(VPolytope(s), tol.geom_eps);
    if (sv.size() > 1) {
        HPolytope sh = convex_hull_h(sv, tol);
        for (int i = 0; i < sh.rows(); ++i) {
            candidates.push_back(sh.normals().row(i).transpose());
        }
    }
    if (p == 3 && sv.size() > 1) {
        Points dy;
        for (int i = 0; i < yn.rows(); ++i) {
            for (int j = i + 1; j < yn.rows(); ++j) {
                Vec d = cross3(yn.normals().row(i).transpose(), yn.normals().row(j).transpose());
                if (d.norm() > 1e-12) {
                    dy.push_back(d);
                }
            }
        }
        for (int i = 0; i < p; ++i) {
            dy.push_back(Vec::Unit(p, i)); // covers Y with fewer than two rows
        }
        Points ds;
        for (std::size_t i = 0; i < sv.size(); ++i) {
            for (std::size_t j = i + 1; j < sv.size(); ++j) {
                ds.push_back(sv.vertex(j) - sv.vertex(i));
            }
        }
        for (const auto& a : dy) {
            for (const auto& b : ds) {
                Vec c = cross3(a, b);
                if (c.norm() > 1e-12 * std::max(1.0, a.norm() * b.norm())) {
                    candidates.push_back(c);
                    candidates.push_back(-c);
                }
            }
        }
    }
    std::vector<Vec> normals;
    std::vector<double> offsets;
    for (auto c : candidates) {
        c.normalize();
        bool dup = false;
        for (const auto& e : normals) {
            if ((e - c).norm() <= 1e-12) {
                dup = true;
                break;
            }
        }
        if (dup) {
            continue;
        }
        auto arg = lp_maximize(yn, c, tol);
        if (!arg) {
            continue; // Y unbounded along c: no constraint
        }
        normals.push_back(c);
        offsets.push_back(c.dot(*arg) + support(sv.vertices(), c));
    }
    Mat n(static_cast<int>(normals.size()), p);
    Vec o(static_cast<int>(normals.size()));
    for (std::size_t i = 0; i < normals.size(); ++i) {
        n.row(static_cast<int>(i)) = normals[i].transpose();
        o(static_cast<int>(i)) = offsets[i];
    }
    return HPolytope(p, n, o);
}

} // namespace

HPolytope pre0_output(const LtiSystem& sys, const HPolytope& y, const InputSet& u, int k, const Tolerances& tol) {
    if (k < 1) {
        throw InvalidArgument("pre0_output: k must be >= 1");
    }
    require_dims(y.dim() == sys.p(), "pre0_output: Y dimension != p");
    require_dims(u.dim() == sys.m(), "pre0_output: input dimension != m");
    const Mat g = sys.C() * matrix_power(sys.A(), k);
    if (y.rows() == 0) {
        return HPolytope::whole_space(sys.n());
    }
    if (!lp_feasible_point(y, tol)) {
        return empty_set(sys.n());
    }

    if (!u.bounded()) {
        // Y ⊕ range(M) = {y : Q^T y ∈ Q^T Y} with Q spanning range(M)^⊥.
        const Mat q = output_quotient(sys, k);
        if (q.cols() == 0) {
            return HPolytope::whole_space(sys.n());
        }
        if (sys.p() > 3) {
            throw UnsupportedDimension("pre0_output: output dimension above 3");
        }
        auto yv = enumerate_vertices(y, tol);
        if (!yv) {
            throw InvalidArgument("pre0_output: unbounded Y with unbounded inputs is not supported");
        }
        Points proj;
        for (const auto& v : yv->vertices()) {
            proj.push_back(q.transpose() * v);
        }
        HPolytope hq = convex_hull_h(VPolytope(proj), tol);
        return pull_back(g, hq.normals() * q.transpose(), hq.offsets(), tol.geom_eps);
    }

    Points s = input_output_points(sys, u, k);
    for (auto& v : s) {
        v = -v;
    }
    const VPolytope sv = pruned(VPolytope(s), tol.geom_eps);
    if (sv.size() == 1) {
        // Translation only; no hull needed in any dimension.
        return pull_back(g, y.normals(), y.offsets() + y.normals() * sv.vertex(0), tol.geom_eps);
    }
    if (sys.p() > 3) {
        throw UnsupportedDimension("pre0_output: output dimension above 3");
    }
    auto yv = enumerate_vertices(y, tol);
    HPolytope sum = yv ? convex_hull_h(minkowski_sum(*yv, sv), tol) : unbounded_sum(y, sv.vertices(), tol);
    return pull_back(g, sum.normals(), sum.offsets(), tol.geom_eps);
}

HPolytope pre0_output_robust(const LtiSystem& sys, const HPolytope& y, const InputSet& u, int k, const Tolerances& tol) {
    if (k < 1) {
        throw InvalidArgument("pre0_output_robust: k must be >= 1");
    }
    require_dims(y.dim() == sys.p(), "pre0_output_robust: Y dimension != p");
    require_dims(u.dim() == sys.m(), "pre0_output_robust: input dimension != m");
    const Mat g = sys.C() * matrix_power(sys.A(), k);
    const HPolytope yn = y.normalized();
    Vec offsets = yn.offsets();
    if (!u.bounded()) {
        const Mat range = range_basis(sys.output_control_matrix(k));
        for (int i = 0; i < yn.rows(); ++i) {
            if ((yn.normals().row(i) * range).norm() > 1e-10) {
                return empty_set(sys.n());
            }
        }
    } else {
        const Points s = input_output_points(sys, u, k);
        for (int i = 0; i < yn.rows(); ++i) {
            offsets(i) -= support(s, yn.normals().row(i).transpose());
        }
    }
    return pull_back(g, yn.normals(), offsets, tol.geom_eps);
}

void Scenario::validate() const {
    require_dims(secret.dim() == sys.n(), "secret set dimension != n");
    require_dims(nonsecret.dim() == sys.n(), "nonsecret set dimension != n");
    require_dims(inputs.dim() == sys.m(), "input set dimension != m");
    if (schedule.empty()) {
        throw InvalidArgument("schedule must be nonempty");
    }
    for (int k : schedule) {
        if (k < 1) {
            throw InvalidArgument("schedule entries must be >= 1");
        }
    }
    tol.validate();
}

std::vector<std::string> Scenario::warnings() const {
    std::vector<std::string> w;
    if (hulls_intersect(secret, nonsecret, tol)) {
        w.emplace_back("secret and nonsecret initial sets overlap");
    }
    return w;
}

Scenario Scenario::with_secret(VPolytope s) const {
    Scenario c = *this;
    c.secret = std::move(s);
    return c;
}

Scenario Scenario::with_nonsecret(VPolytope s) const {
    Scenario c = *this;
    c.nonsecret = std::move(s);
    return c;
}

} // namespace opaque
