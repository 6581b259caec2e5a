// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/outputctrl.hpp"

#include "opaque/error.hpp"
#include "opaque/lp.hpp"
#include "opaque/opacity.hpp"

#include <Eigen/SVD>

namespace opaque {

namespace {

void check_horizon(const LtiSystem& sys, const Vec& x0, int k) {
    require_dims(x0.size() == sys.n(), "output controllability: x0 dimension != n");
    if (k < 1) {
        throw InvalidArgument("output controllability: k must be >= 1");
    }
}

// Stacked controls (u(0) first) -> one point per step.
Points unstack(const Vec& stacked, int m, int k) {
    Points out;
    for (int j = 0; j < k; ++j) {
        out.push_back(stacked.segment(j * m, m));
    }
    return out;
}

std::optional<OcWitness> accept(const LtiSystem& sys, const Vec& x0, Points controls, const Tolerances& tol) {
    const double residual = simulate(sys, x0, controls).outputs.back().norm();
    if (residual > tol.geom_eps) {
        return std::nullopt;
    }
    return OcWitness{x0, std::move(controls), residual};
}

} // namespace

std::optional<OcWitness> is_output_controllable(const LtiSystem& sys, const Vec& x0, int k, const Tolerances& tol) {
    check_horizon(sys, x0, k);
    const Mat m = sys.output_control_matrix(k);
    const Vec target = -(sys.C() * matrix_power(sys.A(), k) * x0);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Vec u = svd.solve(target);
    return accept(sys, x0, unstack(u, sys.m(), k), tol);
}

std::optional<OcWitness> is_output_controllable(const LtiSystem& sys, const Vec& x0, int k, const InputSet& within,
                                                const Tolerances& tol) {
    check_horizon(sys, x0, k);
    require_dims(within.dim() == sys.m(), "output controllability: control set dimension != m");
    if (!within.bounded()) {
        return is_output_controllable(sys, x0, k, tol);
    }
    // u(j) = V λ_j with λ_j in the simplex; minimize the L1 miss of y(k) = 0.
    const VPolytope v = within.vertices();
    const Mat vm = v.as_matrix();
    const int nv = static_cast<int>(v.size());
    const int p = sys.p();
    const int nvar = k * nv + 2 * p;
    const Mat m = sys.output_control_matrix(k);
    const Vec target = -(sys.C() * matrix_power(sys.A(), k) * x0);
    lp::LinearProgram prog(nvar);
    for (int j = 0; j < k; ++j) {
        Vec row = Vec::Zero(nvar);
        row.segment(j * nv, nv).setOnes();
        prog.add_eq(row, 1.0);
    }
    for (int i = 0; i < p; ++i) {
        Vec row = Vec::Zero(nvar);
        for (int j = 0; j < k; ++j) {
            row.segment(j * nv, nv) = (m.row(i).segment(j * sys.m(), sys.m()) * vm).transpose();
        }
        row(k * nv + i) = 1.0;
        row(k * nv + p + i) = -1.0;
        prog.add_eq(row, target(i));
        prog.cost(k * nv + i) = 1.0;
        prog.cost(k * nv + p + i) = 1.0;
    }
    const lp::Result res = lp::solve(prog);
    if (res.status != lp::Status::optimal) {
        return std::nullopt;
    }
    Points controls;
    for (int j = 0; j < k; ++j) {
        controls.push_back(vm * res.x.segment(j * nv, nv));
    }
    return accept(sys, x0, std::move(controls), tol);
}

InputSet difference_set(const InputSet& u) {
    switch (u.kind()) {
    case InputSet::Kind::unbounded:
        return u;
    case InputSet::Kind::zonotope:
        return InputSet(Zonotope(Vec::Zero(u.dim()), 2.0 * u.zonotope().generators()));
    case InputSet::Kind::polytope:
        break;
    }
    const Points& pts = u.polytope().vertices();
    Points diffs;
    for (const auto& a : pts) {
        for (const auto& b : pts) {
            diffs.push_back(a - b);
        }
    }
    return InputSet(pruned(VPolytope(std::move(diffs))));
}

OcWitness oc_witness_from_opacity(const LtiSystem& sys, const Trace& secret, const Trace& nonsecret,
                                  double match_tol) {
    if (secret.controls.size() != nonsecret.controls.size() || secret.controls.empty()) {
        throw InvalidArgument("oc_witness_from_opacity: runs must share a horizon k >= 1");
    }
    const Vec ys = simulate(sys, secret.x0, secret.controls).outputs.back();
    const Vec yns = simulate(sys, nonsecret.x0, nonsecret.controls).outputs.back();
    if ((ys - yns).norm() > match_tol) {
        throw InvalidArgument("oc_witness_from_opacity: outputs at time k differ by " + std::to_string((ys - yns).norm()));
    }
    OcWitness w{secret.x0 - nonsecret.x0, {}, 0.0};
    for (std::size_t i = 0; i < secret.controls.size(); ++i) {
        w.controls.push_back(secret.controls[i] - nonsecret.controls[i]);
    }
    w.residual = simulate(sys, w.x0, w.controls).outputs.back().norm();
    return w;
}

OcWitness oc_witness_from_opacity(const LtiSystem& sys, const Certificate& cert, double match_tol) {
    return oc_witness_from_opacity(sys, cert.secret, cert.nonsecret, match_tol);
}

SynthPair synth_opaque_pair(const LtiSystem& sys, const VPolytope& x_oc, const std::vector<OcWitness>& witnesses,
                            const VPolytope& x2, int k, const InputSet& inputs, const Tolerances& tol) {
    require_dims(x_oc.dim() == sys.n() && x2.dim() == sys.n(), "synth_opaque_pair: set dimension != n");
    if (witnesses.size() != x_oc.size()) {
        throw InvalidArgument("synth_opaque_pair: need one witness per vertex of X_oc");
    }
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        const OcWitness& w = witnesses[i];
        if (w.controls.size() != static_cast<std::size_t>(k) || w.x0.size() != sys.n() ||
            (w.x0 - x_oc.vertex(i)).norm() > tol.geom_eps) {
            throw InvalidArgument("synth_opaque_pair: witness " + std::to_string(i) + " does not match X_oc at k");
        }
        if (simulate(sys, w.x0, w.controls).outputs.back().norm() > tol.geom_eps) {
            throw InvalidArgument("synth_opaque_pair: witness " + std::to_string(i) + " does not reach y(k) = 0");
        }
    }
    Points sums;
    for (const auto& a : x_oc.vertices()) {
        for (const auto& b : x2.vertices()) {
            sums.push_back(a + b);
        }
    }
    SynthPair out{VPolytope(std::move(sums)), x2, {}};
    const Scenario sc{sys, out.secret, out.nonsecret, inputs, {k}, tol};
    out.verdict = check_strong_k_iso(sc, k);
    return out;
}

SynthPair synth_opaque_pair(const LtiSystem& sys, const VPolytope& x_oc, const std::vector<OcWitness>& witnesses,
                            const VPolytope& x2, int k, const Tolerances& tol) {
    return synth_opaque_pair(sys, x_oc, witnesses, x2, k, InputSet::unbounded(sys.m()), tol);
}

} // namespace opaque
