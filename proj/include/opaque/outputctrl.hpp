// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/system.hpp"
#include "opaque/verdict.hpp"

#include <optional>
#include <vector>

namespace opaque {

/// Controls that drive y(k) to zero from x0. residual = ‖y(k)‖ by simulation.
struct OcWitness {
    Vec x0;
    Points controls;
    double residual = 0.0;
};

/// Least-squares solve of [CA^{k-1}B ... CB] u = -CA^k x0 (singular values
/// below 1e-10 of the largest are dropped). Controls are unconstrained.
/// Returns a witness iff the residual is <= geom_eps.
std::optional<OcWitness> is_output_controllable(const LtiSystem& sys, const Vec& x0, int k, const Tolerances& tol = {});

/// Same, but every u(j) must lie in `within` (LP feasibility). Bounded sets only.
std::optional<OcWitness> is_output_controllable(const LtiSystem& sys, const Vec& x0, int k, const InputSet& within,
                                                const Tolerances& tol = {});

/// {u - v : u, v in U}, the set the differences of admissible controls live in.
InputSet difference_set(const InputSet& u);

/// x0 = x_s(0) - x_ns(0), u(i) = u_s(i) - u_ns(i). Throws InvalidArgument if
/// the two runs do not produce the same y(k) within match_tol, or if their
/// horizons differ.
OcWitness oc_witness_from_opacity(const LtiSystem& sys, const Trace& secret, const Trace& nonsecret,
                                  double match_tol = 1e-8);
OcWitness oc_witness_from_opacity(const LtiSystem& sys, const Certificate& cert, double match_tol = 1e-8);

struct SynthPair {
    VPolytope secret;    ///< X1 = X_oc ⊕ X2
    VPolytope nonsecret; ///< X2
    Verdict verdict;     ///< check_strong_k_iso of (X1, X2) under the given inputs
};

/// witnesses[i] must be a valid horizon-k witness for x_oc.vertex(i); throws
/// InvalidArgument otherwise. The verdict is HOLDS for unbounded inputs; with
/// a bounded InputSet it is reported as computed and may FAIL.
SynthPair synth_opaque_pair(const LtiSystem& sys, const VPolytope& x_oc, const std::vector<OcWitness>& witnesses,
                            const VPolytope& x2, int k, const InputSet& inputs, const Tolerances& tol = {});
SynthPair synth_opaque_pair(const LtiSystem& sys, const VPolytope& x_oc, const std::vector<OcWitness>& witnesses,
                            const VPolytope& x2, int k, const Tolerances& tol = {});

} // namespace opaque
