// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/approx.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"
#include "opaque/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace opaque {

std::string to_string(Role r) { return r == Role::secret ? "secret" : "nonsecret"; }

namespace {

bool is_box(const VPolytope& p, double eps) {
    const Vec lo = p.lower_bound();
    const Vec hi = p.upper_bound();
    const int d = p.dim();
    int wide = 0;
    for (int i = 0; i < d; ++i) {
        wide += hi(i) - lo(i) > eps ? 1 : 0;
    }
    if (wide > 20) {
        return false;
    }
    std::set<std::vector<bool>> corners;
    // All corners of the bounding box present; other points are inside it.
    for (const auto& v : p.vertices()) {
        std::vector<bool> key(d);
        bool corner = true;
        for (int i = 0; i < d && corner; ++i) {
            if (std::abs(v(i) - hi(i)) <= eps && hi(i) - lo(i) > eps) {
                key[i] = true;
            } else if (std::abs(v(i) - lo(i)) > eps) {
                corner = false;
            }
        }
        if (corner) {
            corners.insert(std::move(key));
        }
    }
    return corners.size() == (std::size_t{1} << wide);
}

// max t + 1e-3·mean(r)  s.t.  H c + |H| r <= h,  r_j >= t.
Zonotope lp_inscribed_box(const VPolytope& p, const Tolerances& tol) {
    const int d = p.dim();
    const HPolytope h = convex_hull_h_tight(p, tol).normalized();
    lp::LinearProgram prog(2 * d + 1);
    prog.free.assign(2 * d + 1, false);
    for (int j = 0; j < d; ++j) {
        prog.free[j] = true;
        prog.cost(d + j) = -1e-3 / d;
    }
    prog.cost(2 * d) = -1.0;
    for (int i = 0; i < h.rows(); ++i) {
        Vec row = Vec::Zero(2 * d + 1);
        row.head(d) = h.normals().row(i).transpose();
        row.segment(d, d) = h.normals().row(i).transpose().cwiseAbs();
        prog.add_le(row, h.offsets()(i));
    }
    for (int j = 0; j < d; ++j) {
        Vec row = Vec::Zero(2 * d + 1);
        row(2 * d) = 1.0;
        row(d + j) = -1.0;
        prog.add_le(row, 0.0);
    }
    const lp::Result res = lp::solve(prog);
    if (res.status != lp::Status::optimal) {
        return Zonotope::singleton(p.centroid());
    }
    const Vec c = res.x.head(d);
    const Vec r = res.x.segment(d, d).cwiseMax(0.0);
    return Zonotope::box(c - r, c + r);
}

Zonotope inner_inputs(const InputSet& u, const Tolerances& tol) {
    if (u.kind() == InputSet::Kind::zonotope) {
        return u.zonotope();
    }
    return inscribed_box(u.polytope(), tol);
}

// Under-approximation that remembers where every generator came from, so a
// point of it can be turned back into an initial state and controls.
struct TaggedUnder {
    Zonotope x0;
    Zonotope u;
    Vec center;
    Mat gens;
    std::vector<std::pair<int, int>> tags; ///< (step, column); step -1 is x0

    Trace trace_of(const Vec& xi) const {
        Trace t{x0.center(), Points(static_cast<std::size_t>(steps), u.center())};
        for (std::size_t j = 0; j < tags.size(); ++j) {
            const auto [step, col] = tags[j];
            if (step < 0) {
                t.x0 += xi(static_cast<int>(j)) * x0.generators().col(col);
            } else {
                t.controls[static_cast<std::size_t>(step)] += xi(static_cast<int>(j)) * u.generators().col(col);
            }
        }
        return t;
    }

    int steps = 0;
};

TaggedUnder propagate_under(const LtiSystem& sys, const Zonotope& x0, const Zonotope& u, int k, int order) {
    TaggedUnder t{x0, u, x0.center(), x0.generators(), {}};
    for (int j = 0; j < x0.num_generators(); ++j) {
        t.tags.emplace_back(-1, j);
    }
    const int budget = order * sys.n();
    for (int step = 0; step < k; ++step) {
        t.center = sys.A() * t.center + sys.B() * u.center();
        Mat g(sys.n(), t.gens.cols() + u.num_generators());
        g << sys.A() * t.gens, sys.B() * u.generators();
        for (int j = 0; j < u.num_generators(); ++j) {
            t.tags.emplace_back(step, j);
        }
        if (g.cols() > budget) {
            std::vector<int> idx(g.cols());
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return g.col(a).norm() > g.col(b).norm(); });
            Mat kept(sys.n(), budget);
            std::vector<std::pair<int, int>> tags;
            for (int j = 0; j < budget; ++j) {
                kept.col(j) = g.col(idx[j]);
                tags.push_back(t.tags[idx[j]]);
            }
            g = std::move(kept);
            t.tags = std::move(tags);
        }
        t.gens = std::move(g);
    }
    t.steps = k;
    return t;
}

Zonotope propagate_over(const LtiSystem& sys, const Zonotope& x0, const Zonotope& u, int k, int order) {
    Zonotope z = zonotope_reduce_over(x0, order);
    const Zonotope bu = zonotope_image(sys.B(), u);
    for (int step = 0; step < k; ++step) {
        z = zonotope_reduce_over(zonotope_sum(zonotope_image(sys.A(), z), bu), order);
    }
    return z;
}

void check_args(const LtiSystem& sys, int x0_dim, const InputSet& u, int k, int order) {
    require_dims(x0_dim == sys.n(), "approx_reach: X0 dimension != n");
    require_dims(u.dim() == sys.m(), "approx_reach: input dimension != m");
    if (k < 0) {
        throw InvalidArgument("approx_reach: k must be >= 0");
    }
    if (order < 1) {
        throw InvalidArgument("approx_reach: order must be >= 1");
    }
    if (!u.bounded()) {
        throw InvalidArgument("approx_reach: unbounded input set");
    }
}

ApproxPair make_pair(const Zonotope& under, const Zonotope& over, Role source, int k) {
    return ApproxPair{ReachSet{under, k, Space::state, Fidelity::under, {}},
                      ReachSet{over, k, Space::state, Fidelity::over, {}}, source, k};
}

bool enumerable(const Zonotope& z) { return z.dim() <= 3 || z.num_generators() <= 12; }

// Coefficients xi in [-1,1]^g with c + G xi as close as possible (L1) to y.
Vec coefficients_for(const Vec& c, const Mat& g, const Vec& y) {
    const int p = static_cast<int>(g.rows());
    const int n = static_cast<int>(g.cols());
    lp::LinearProgram prog(n + p);
    prog.free.assign(n + p, false);
    for (int j = 0; j < n; ++j) {
        prog.free[j] = true;
        Vec row = Vec::Zero(n + p);
        row(j) = 1.0;
        prog.add_le(row, 1.0);
        row(j) = -1.0;
        prog.add_le(row, 1.0);
    }
    for (int i = 0; i < p; ++i) {
        prog.cost(n + i) = 1.0;
        Vec row = Vec::Zero(n + p);
        row.head(n) = g.row(i).transpose();
        row(n + i) = -1.0;
        prog.add_le(row, y(i) - c(i));
        row.head(n) = -g.row(i).transpose();
        prog.add_le(row, c(i) - y(i));
    }
    const lp::Result res = lp::solve(prog);
    if (res.status != lp::Status::optimal) {
        return Vec::Zero(n);
    }
    return res.x.head(n).cwiseMax(-1.0).cwiseMin(1.0);
}

gjk::Result point_to_zonotope(const Vec& y, const Zonotope& z, const Tolerances& tol) {
    return gjk::distance(gjk::support_of(VPolytope::singleton(y)), gjk::support_of(z), z.dim(), tol.gjk_eps);
}

// Every point of conv(V(inner)) within geom_eps of outer.
bool zonotope_contains(const Zonotope& outer, const Zonotope& inner, const Tolerances& tol) {
    const VPolytope v = zonotope_to_vpolytope(inner);
    for (const auto& y : v.vertices()) {
        if (!outer.contains(y, tol)) {
            return false;
        }
    }
    return true;
}

struct SoundSets {
    TaggedUnder under_s;
    Zonotope over_s;
    Zonotope under_ns;
    Zonotope over_ns;
};

SoundSets sound_sets(const Scenario& sc, int k, int order) {
    const Zonotope u_under = inner_inputs(sc.inputs, sc.tol);
    const Zonotope u_over = sc.inputs.outer_zonotope();
    const Mat& c = sc.sys.C();
    TaggedUnder us = propagate_under(sc.sys, inscribed_box(sc.secret, sc.tol), u_under, k, order);
    const TaggedUnder uns = propagate_under(sc.sys, inscribed_box(sc.nonsecret, sc.tol), u_under, k, order);
    return SoundSets{std::move(us),
                     zonotope_image(c, propagate_over(sc.sys, bounding_box_zonotope(sc.secret), u_over, k, order)),
                     Zonotope(c * uns.center, c * uns.gens),
                     zonotope_image(c, propagate_over(sc.sys, bounding_box_zonotope(sc.nonsecret), u_over, k, order))};
}

} // namespace

Zonotope inscribed_box(const VPolytope& p, const Tolerances& tol) {
    if (is_box(p, tol.geom_eps)) {
        return Zonotope::box(p.lower_bound(), p.upper_bound());
    }
    if (p.dim() <= 3) {
        return lp_inscribed_box(p, tol);
    }
    return Zonotope::singleton(p.centroid());
}

ApproxPair approx_reach(const LtiSystem& sys, const VPolytope& x0, const InputSet& u, int k, int order, Role source,
                        const Tolerances& tol) {
    check_args(sys, x0.dim(), u, k, order);
    const Zonotope u_under = inner_inputs(u, tol);
    const TaggedUnder under = propagate_under(sys, inscribed_box(x0, tol), u_under, k, order);
    return make_pair(Zonotope(under.center, under.gens),
                     propagate_over(sys, bounding_box_zonotope(x0), u.outer_zonotope(), k, order), source, k);
}

ApproxPair approx_reach(const LtiSystem& sys, const Zonotope& x0, const InputSet& u, int k, int order, Role source,
                        const Tolerances& tol) {
    check_args(sys, x0.dim(), u, k, order);
    const TaggedUnder under = propagate_under(sys, x0, inner_inputs(u, tol), k, order);
    return make_pair(Zonotope(under.center, under.gens), propagate_over(sys, x0, u.outer_zonotope(), k, order), source,
                     k);
}

Verdict verify_sound(const Scenario& sc, int k, int order) {
    sc.validate();
    if (k < 1) {
        throw InvalidArgument("verify_sound: k must be >= 1");
    }
    Verdict v;
    v.mode = Mode::sound;
    v.k = k;
    if (!sc.inputs.bounded()) {
        v.note = "unbounded inputs have no zonotope enclosure";
        return v;
    }
    const SoundSets s = sound_sets(sc, k, order);
    const Mat& c = sc.sys.C();
    const Zonotope under_s(c * s.under_s.center, c * s.under_s.gens);

    if (enumerable(s.over_s) && zonotope_contains(s.under_ns, s.over_s, sc.tol)) {
        v.status = Status::holds;
        v.note = "C·over_s ⊆ C·under_ns at order " + std::to_string(order);
        return v;
    }
    // Vertices when they can be listed, otherwise support points.
    Points candidates;
    if (enumerable(under_s)) {
        candidates = zonotope_to_vpolytope(under_s).vertices();
    } else {
        const int p = under_s.dim();
        for (int i = 0; i < p; ++i) {
            candidates.push_back(under_s.support_point(Vec::Unit(p, i)));
            candidates.push_back(under_s.support_point(-Vec::Unit(p, i)));
        }
    }
    for (const auto& y : candidates) {
        if (s.over_ns.contains(y, sc.tol)) {
            continue;
        }
        const Vec xi = coefficients_for(under_s.center(), under_s.generators(), y);
        Trace t = s.under_s.trace_of(xi);
        const Vec replay = simulate(sc.sys, t.x0, t.controls).outputs.back();
        const gjk::Result gap = point_to_zonotope(replay, s.over_ns, sc.tol);
        if (gap.distance <= sc.tol.geom_eps) {
            continue;
        }
        v.status = Status::fails;
        v.witness = Witness{replay, gap.distance, gap.closest_b, std::move(t), std::nullopt, std::nullopt};
        v.note = "C·under_s ⊄ C·over_ns at order " + std::to_string(order);
        return v;
    }
    v.note = "approximation gap at order " + std::to_string(order);
    return v;
}

CandidateFlags candidate_flags(const Scenario& sc, int k, int order) {
    sc.validate();
    if (k < 1) {
        throw InvalidArgument("candidate_flags: k must be >= 1");
    }
    CandidateFlags f;
    if (!sc.inputs.bounded()) {
        return f;
    }
    const SoundSets s = sound_sets(sc, k, order);
    const Zonotope under_s(sc.sys.C() * s.under_s.center, sc.sys.C() * s.under_s.gens);
    f.best = enumerable(s.over_s) && zonotope_contains(s.under_ns, s.over_s, sc.tol);
    const bool meets = gjk::distance(gjk::support_of(s.over_s), gjk::support_of(s.under_ns), s.over_s.dim(),
                                     sc.tol.gjk_eps)
                           .distance <= sc.tol.geom_eps;
    f.good = enumerable(under_s) && zonotope_contains(s.under_ns, under_s, sc.tol) && meets;
    return f;
}

double CostModel::predict(int n, int p, int k, int l_over, int l_under) const {
    if (n < 1 || p < 1 || k < 1 || l_over < 0 || l_under < 0 || l_over + l_under < 1) {
        throw InvalidArgument("cost_model: arguments must be positive");
    }
    const double cube = static_cast<double>(n) * n * n;
    return c1 * k * (l_over + l_under) * cube + c2 * p * n + c3;
}

double cost_model(int n, int p, int k, int l_over, int l_under, const CostModel& model) {
    return model.predict(n, p, k, l_over, l_under);
}

CostModel fit_cost_model(const std::vector<CostSample>& samples) {
    if (samples.empty()) {
        throw InvalidArgument("fit_cost_model: no samples");
    }
    const int rows = static_cast<int>(samples.size());
    Mat x(rows, 3);
    Vec y(rows);
    for (int i = 0; i < rows; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        x(i, 0) = static_cast<double>(s.k) * (s.l_over + s.l_under) * s.n * s.n * s.n;
        x(i, 1) = static_cast<double>(s.p) * s.n;
        x(i, 2) = 1.0;
        y(i) = s.seconds;
    }
    // Three unknowns: try every active set and keep the best feasible one.
    Vec best = Vec::Zero(3);
    double best_res = y.squaredNorm();
    for (int mask = 1; mask < 8; ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < 3; ++j) {
            if (mask & (1 << j)) {
                cols.push_back(j);
            }
        }
        Mat sub(rows, static_cast<int>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            sub.col(static_cast<int>(j)) = x.col(cols[j]);
        }
        const Vec coef = sub.colPivHouseholderQr().solve(y);
        if ((coef.array() < 0).any()) {
            continue;
        }
        const double res = (sub * coef - y).squaredNorm();
        if (res < best_res) {
            best_res = res;
            best.setZero();
            for (std::size_t j = 0; j < cols.size(); ++j) {
                best(cols[j]) = coef(static_cast<int>(j));
            }
        }
    }
    return CostModel{best(0), best(1), best(2)};
}

} // namespace opaque
