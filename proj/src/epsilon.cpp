// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/epsilon.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"
#include "opaque/opacity.hpp"

#include <cmath>

namespace opaque {

namespace {

OpacityRadius farthest_vertex(const VPolytope& ys, const VPolytope& yns, const Tolerances& tol) {
    OpacityRadius r;
    r.radius = -1.0;
    for (const auto& v : ys.vertices()) {
        const gjk::Result g = point_distance(v, yns, tol);
        if (g.distance > r.radius) {
            r.radius = g.distance;
            r.argmax = v;
            r.nearest = g.closest_b;
        }
    }
    return r;
}

} // namespace

OpacityRadius opacity_radius(const Scenario& sc, int k, const ReachOptions& opts) {
    sc.validate();
    if (k < 1) {
        throw InvalidArgument("opacity_radius: k must be >= 1");
    }
    if (!sc.inputs.bounded()) {
        const Mat g = sc.sys.C() * matrix_power(sc.sys.A(), k);
        const Mat q = output_quotient(sc.sys, k);
        if (q.cols() == 0) {
            const Vec y = g * sc.secret.vertex(0);
            return OpacityRadius{0.0, y, y, true};
        }
        // Distances in the quotient; map the points back along the orthonormal basis.
        const VPolytope ps = linear_image(q.transpose() * g, sc.secret);
        const VPolytope pns = linear_image(q.transpose() * g, sc.nonsecret);
        OpacityRadius r = farthest_vertex(ps, pns, sc.tol);
        r.argmax = q * r.argmax;
        r.nearest = q * r.nearest;
        return r;
    }
    const OutputSets os = output_sets(sc, k, opts);
    OpacityRadius r = farthest_vertex(os.secret.vertices(), os.nonsecret.vertices(), sc.tol);
    r.exact = os.secret.fidelity == Fidelity::exact && os.nonsecret.fidelity == Fidelity::exact;
    return r;
}

Verdict EpsVerdict::as_verdict() const {
    Verdict v{status, Mode::eps, k, std::nullopt, {}, ""};
    v.note = "radius " + std::to_string(radius) + " vs eps " + std::to_string(threshold);
    if (status == Status::fails) {
        v.witness = Witness{argmax_vertex, radius, nearest, std::nullopt, std::nullopt, std::nullopt};
    }
    return v;
}

EpsVerdict check_eps_k_iso(const Scenario& sc, int k, double eps, const ReachOptions& opts) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw InvalidArgument("check_eps_k_iso: eps must be finite and >= 0");
    }
    const OpacityRadius r = opacity_radius(sc, k, opts);
    EpsVerdict v;
    v.k = k;
    v.radius = r.radius;
    v.threshold = eps;
    v.status = r.radius <= eps + sc.tol.geom_eps ? Status::holds : Status::fails;
    if (!r.exact) {
        v.status = Status::unknown;
    }
    v.argmax_vertex = r.argmax;
    v.nearest = r.nearest;
    v.exact = r.exact;
    return v;
}

EpsScheduleReport check_eps_K_iso(const Scenario& sc, double eps, const ReachOptions& opts) {
    sc.validate();
    EpsScheduleReport rep;
    for (int k : sc.schedule) {
        EpsVerdict v = check_eps_k_iso(sc, k, eps, opts);
        if (v.status == Status::fails || (v.status == Status::unknown && rep.aggregate == Status::holds)) {
            rep.aggregate = v.status;
        }
        rep.per_k.emplace(k, std::move(v));
    }
    return rep;
}

} // namespace opaque
