// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/opacity.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"

#include <algorithm>
#include <cmath>

namespace opaque {

namespace {

void check_k(int k) {
    if (k < 1) {
        throw InvalidArgument("k must be >= 1");
    }
}

Trace trace_of(const Provenance& pv, const VPolytope& x0, const VPolytope& uv) {
    Trace t{x0.vertex(pv.x0), {}};
    for (int j : pv.inputs) {
        t.controls.push_back(uv.vertex(j));
    }
    return t;
}

/// A convex combination of runs is a run because X0 and U are convex.
Trace blend(const std::vector<std::pair<int, double>>& weights, const std::vector<Provenance>& prov,
            const VPolytope& x0, const VPolytope& uv) {
    Trace out;
    for (const auto& [idx, w] : weights) {
        Trace t = trace_of(prov.at(idx), x0, uv);
        if (out.x0.size() == 0) {
            out.x0 = w * t.x0;
            for (auto& u : t.controls) {
                out.controls.push_back(w * u);
            }
        } else {
            out.x0 += w * t.x0;
            for (std::size_t j = 0; j < t.controls.size(); ++j) {
                out.controls[j] += w * t.controls[j];
            }
        }
    }
    return out;
}

Vec blend_points(const std::vector<std::pair<int, double>>& weights, const VPolytope& p) {
    Vec out = Vec::Zero(p.dim());
    for (const auto& [idx, w] : weights) {
        out += w * p.vertex(idx);
    }
    return out;
}

/// Controls of length k (stacked) reaching output offset `target` through M.
Points solve_controls(const LtiSystem& sys, int k, const Vec& target) {
    const Mat m = sys.output_control_matrix(k);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Vec u = svd.solve(target);
    Points out;
    for (int j = 0; j < k; ++j) {
        out.push_back(u.segment(j * sys.m(), sys.m()));
    }
    return out;
}

Points zero_controls(const LtiSystem& sys, int k) { return Points(k, Vec::Zero(sys.m())); }

/// Strong and weak checks when the controls are unconstrained: outputs are
/// only distinguishable modulo range([C A^{k-1} B ... C B]).
Verdict unbounded_check(const Scenario& sc, int k, Mode mode, const CheckOptions& opts) {
    const LtiSystem& sys = sc.sys;
    const Mat g = sys.C() * matrix_power(sys.A(), k);
    const Mat q = output_quotient(sys, k);
    Verdict v{Status::holds, mode, k, std::nullopt, {}, "unconstrained controls"};
    auto match = [&](const Vec& xs, const Vec& xns) {
        Certificate c;
        c.output = g * xs;
        c.secret = Trace{xs, zero_controls(sys, k)};
        c.nonsecret = Trace{xns, solve_controls(sys, k, g * xs - g * xns)};
        return c;
    };
    if (q.cols() == 0) {
        if (mode == Mode::strong && opts.certificates) {
            for (std::size_t i = 0; i < sc.secret.size(); ++i) {
                v.certificates.push_back(match(sc.secret.vertex(i), sc.nonsecret.vertex(0)));
                v.certificates.back().secret_vertex = static_cast<int>(i);
            }
        }
        return v;
    }
    const Mat qg = q.transpose() * g;
    const VPolytope ps = linear_image(qg, sc.secret);
    const VPolytope pns = linear_image(qg, sc.nonsecret);
    if (mode == Mode::strong) {
        Containment c = containment(ps, pns, sc.tol);
        if (!c.contained) {
            v.status = Status::fails;
            Witness w;
            w.output = g * sc.secret.vertex(c.worst_index);
            w.distance = c.worst_distance;
            w.secret = Trace{sc.secret.vertex(c.worst_index), zero_controls(sys, k)};
            v.witness = w;
            return v;
        }
        if (opts.certificates) {
            for (std::size_t i = 0; i < ps.size(); ++i) {
                auto r = point_distance(ps.vertex(i), pns, sc.tol);
                v.certificates.push_back(match(sc.secret.vertex(i), blend_points(r.weights_b, sc.nonsecret)));
                v.certificates.back().secret_vertex = static_cast<int>(i);
            }
        }
        return v;
    }
    auto r = gjk_query(ps, pns, sc.tol);
    Vec xs = blend_points(r.weights_a, sc.secret);
    Vec xns = blend_points(r.weights_b, sc.nonsecret);
    Witness w;
    w.output = g * xs;
    w.distance = r.distance;
    w.secret = Trace{xs, zero_controls(sys, k)};
    if (r.distance <= sc.tol.geom_eps) {
        Certificate c = match(xs, xns);
        w.nearest = c.output;
        w.nonsecret = c.nonsecret;
    } else {
        v.status = Status::fails;
    }
    v.witness = w;
    return v;
}

Verdict capped_verdict(const Scenario& sc, int k, Mode mode, const OutputSets& os) {
    // One side fell back to an over-approximation. Only a FAILS through an
    // exact secret set and an over-approximated nonsecret set is sound.
    Verdict v{Status::unknown, mode, k, std::nullopt, {}, "reach vertex cap exceeded; verdict from over-approximation"};
    const VPolytope ys = os.secret.vertices();
    const VPolytope yns = os.nonsecret.vertices();
    if (mode == Mode::strong && os.secret.fidelity == Fidelity::exact) {
        Containment c = containment(ys, yns, sc.tol);
        if (!c.contained) {
            v.status = Status::fails;
            v.witness = Witness{ys.vertex(c.worst_index), c.worst_distance, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
        }
    }
    if (mode == Mode::weak && gjk_distance(ys, yns, sc.tol) > sc.tol.geom_eps) {
        v.status = Status::fails;
        v.witness = Witness{ys.centroid(), gjk_distance(ys, yns, sc.tol), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    }
    return v;
}

} // namespace

OutputSets output_sets(const Scenario& sc, int k, const ReachOptions& opts) {
    return OutputSets{output_set(sc.sys, reach_exact(sc.sys, sc.secret, sc.inputs, k, opts)),
                      output_set(sc.sys, reach_exact(sc.sys, sc.nonsecret, sc.inputs, k, opts))};
}

Verdict check_strong_k_iso(const Scenario& sc, int k, const CheckOptions& opts) {
    check_k(k);
    sc.validate();
    if (!sc.inputs.bounded()) {
        return unbounded_check(sc, k, Mode::strong, opts);
    }
    const OutputSets os = output_sets(sc, k, opts.reach);
    if (os.secret.fidelity != Fidelity::exact || os.nonsecret.fidelity != Fidelity::exact) {
        return capped_verdict(sc, k, Mode::strong, os);
    }
    const VPolytope& ys = os.secret.polytope();
    const VPolytope& yns = os.nonsecret.polytope();
    const VPolytope uv = sc.inputs.vertices();

    Verdict v{Status::holds, Mode::strong, k, std::nullopt, {}, ""};
    Containment c = containment(ys, yns, sc.tol);
    if (!c.contained) {
        v.status = Status::fails;
        auto r = point_distance(ys.vertex(c.worst_index), yns, sc.tol);
        Witness w;
        w.output = ys.vertex(c.worst_index);
        w.distance = c.worst_distance;
        w.nearest = r.closest_b;
        w.secret = trace_of(os.secret.provenance[c.worst_index], sc.secret, uv);
        w.nonsecret = blend(r.weights_b, os.nonsecret.provenance, sc.nonsecret, uv);
        v.witness = w;
        return v;
    }
    if (opts.certificates) {
        for (std::size_t i = 0; i < ys.size(); ++i) {
            auto r = point_distance(ys.vertex(i), yns, sc.tol);
            Certificate cert;
            cert.secret_vertex = static_cast<int>(i);
            cert.output = ys.vertex(i);
            cert.secret = trace_of(os.secret.provenance[i], sc.secret, uv);
            cert.nonsecret = blend(r.weights_b, os.nonsecret.provenance, sc.nonsecret, uv);
            v.certificates.push_back(std::move(cert));
        }
    }
    return v;
}

Verdict check_weak_k_iso(const Scenario& sc, int k, const CheckOptions& opts) {
    check_k(k);
    sc.validate();
    if (!sc.inputs.bounded()) {
        return unbounded_check(sc, k, Mode::weak, opts);
    }
    const OutputSets os = output_sets(sc, k, opts.reach);
    if (os.secret.fidelity != Fidelity::exact || os.nonsecret.fidelity != Fidelity::exact) {
        return capped_verdict(sc, k, Mode::weak, os);
    }
    const VPolytope& ys = os.secret.polytope();
    const VPolytope& yns = os.nonsecret.polytope();
    const VPolytope uv = sc.inputs.vertices();
    auto r = gjk_query(ys, yns, sc.tol);
    Verdict v{r.distance <= sc.tol.geom_eps ? Status::holds : Status::fails, Mode::weak, k, std::nullopt, {}, ""};
    Witness w;
    w.output = r.closest_a;
    w.nearest = r.closest_b;
    w.distance = r.distance;
    w.secret = blend(r.weights_a, os.secret.provenance, sc.secret, uv);
    w.nonsecret = blend(r.weights_b, os.nonsecret.provenance, sc.nonsecret, uv);
    v.witness = w;
    return v;
}

ScheduleReport check_K_iso(const Scenario& sc, Mode mode, const CheckOptions& opts) {
    if (mode != Mode::strong && mode != Mode::weak) {
        throw InvalidArgument("check_K_iso: mode must be strong or weak");
    }
    sc.validate();
    ScheduleReport rep;
    std::vector<Status> parts;
    for (int k : sc.schedule) {
        if (rep.per_k.count(k)) {
            continue;
        }
        Verdict v = mode == Mode::strong ? check_strong_k_iso(sc, k, opts) : check_weak_k_iso(sc, k, opts);
        parts.push_back(v.status);
        if (v.fails() && !rep.first_failure) {
            rep.first_failure = k;
        } else if (v.fails() && k < *rep.first_failure) {
            rep.first_failure = k;
        }
        rep.per_k.emplace(k, std::move(v));
    }
    rep.aggregate = combine(parts);
    return rep;
}

std::vector<int> k_step_schedule(int m, int k) {
    if (k < 1 || m - k + 1 < 1) {
        throw InvalidArgument("k-step schedule needs 1 <= k <= m");
    }
    std::vector<int> out;
    for (int t = m; t > m - k; --t) {
        out.push_back(t);
    }
    return out;
}

namespace {

void require_hrep_case(const Scenario& sc, const char* what) {
    if (sc.sys.p() > 3) {
        throw UnsupportedDimension(std::string(what) + ": output dimension above 3");
    }
    if (!sc.inputs.bounded()) {
        throw InvalidArgument(std::string(what) + ": needs a bounded input set");
    }
}

Points input_outputs(const Scenario& sc, int k) {
    ReachSet r = reach_exact(sc.sys, VPolytope::singleton(Vec::Zero(sc.sys.n())), sc.inputs, k);
    return linear_image(sc.sys.C(), r.vertices()).vertices();
}

} // namespace

Pre0Conditions check_pre0_conditions(const Scenario& sc, int k) {
    check_k(k);
    sc.validate();
    require_hrep_case(sc, "check_pre0_conditions");
    const OutputSets os = output_sets(sc, k);
    const VPolytope ys = os.secret.vertices();
    const VPolytope yns = os.nonsecret.vertices();
    Pre0Conditions out;

    const HPolytope back_s = pre0_output(sc.sys, convex_hull_h(ys, sc.tol), sc.inputs, k, sc.tol);
    out.cond1_point = lp_feasible_in_hull(back_s, sc.nonsecret, sc.tol);
    out.cond1 = out.cond1_point.has_value();

    // Condition 2 against the robust backward set, measured in output space:
    // row i of hull(CX_ns) is violated by n_i·(C A^k x) + max_s n_i·s - h_i.
    const HPolytope hns = convex_hull_h(yns, sc.tol).normalized();
    const Mat g = sc.sys.C() * matrix_power(sc.sys.A(), k);
    const Points s = input_outputs(sc, k);
    Vec shift(hns.rows());
    for (int i = 0; i < hns.rows(); ++i) {
        double best = -INFINITY;
        for (const auto& p : s) {
            best = std::max(best, hns.normals().row(i).dot(p));
        }
        shift(i) = best - hns.offsets()(i);
    }
    out.cond2_violation = -INFINITY;
    for (std::size_t j = 0; j < sc.secret.size(); ++j) {
        const Vec y = g * sc.secret.vertex(j);
        double viol = hns.rows() == 0 ? 0.0 : (hns.normals() * y + shift).maxCoeff();
        if (viol > out.cond2_violation) {
            out.cond2_violation = viol;
            out.cond2_vertex = static_cast<int>(j);
        }
    }
    out.cond2 = out.cond2_violation <= sc.tol.geom_eps;
    return out;
}

PruneResult prune_secret(const Scenario& sc, int k, PreImage kind) {
    check_k(k);
    sc.validate();
    require_hrep_case(sc, "prune_secret");
    if (sc.sys.n() > 3) {
        throw UnsupportedDimension("prune_secret: state dimension above 3");
    }
    const OutputSets os = output_sets(sc, k);
    auto meet = hull_intersection(os.secret.vertices(), os.nonsecret.vertices(), sc.tol);
    if (!meet) {
        throw UnsalvageableSecret("secret and nonsecret output sets do not intersect at k = " + std::to_string(k));
    }
    const HPolytope target =
        convex_hull_h_tight(os.secret.vertices(), sc.tol).intersect(convex_hull_h_tight(os.nonsecret.vertices(), sc.tol));
    const HPolytope back = kind == PreImage::universal ? pre0_output_robust(sc.sys, target, sc.inputs, k, sc.tol)
                                                       : pre0_output(sc.sys, target, sc.inputs, k, sc.tol);
    PruneResult out{convex_hull_h_tight(sc.secret, sc.tol).intersect(back), std::nullopt, false};
    if (!lp_feasible_point(out.set, sc.tol)) {
        out.empty = true;
        return out;
    }
    out.vertices = enumerate_vertices(out.set, sc.tol);
    return out;
}

} // namespace opaque
