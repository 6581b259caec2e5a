// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/system.hpp"

#include <string>
#include <vector>

namespace opaque {

/// A system with several candidate secret and nonsecret initial sets.
/// Unions are hulls of vertex concatenations; intersections go through
/// H-representations (n <= 3).
struct AlgebraFamily {
    LtiSystem sys;
    InputSet inputs;
    int k = 1;
    std::vector<VPolytope> secrets;
    std::vector<VPolytope> nonsecrets;
    Tolerances tol{};
};

struct LawResult {
    std::string law;
    bool two_directional = false;
    int cases = 0;
    int skipped = 0;             ///< undefined instances (empty intersections)
    int forward_violations = 0;  ///< stated direction failed
    int converse_violations = 0; ///< reverse direction failed (two-directional laws)
    int strict = 0;              ///< one-directional laws: instances where the reverse fails
    bool passed() const { return forward_violations == 0 && (!two_directional || converse_violations == 0); }
};

struct AlgebraReport {
    std::vector<LawResult> laws;
    bool all_passed() const;
    const LawResult& law(const std::string& name) const;
};

/// Evaluates each union/intersection law on every family. Laws: lemma1,
/// lemma2, theorem3, theorem4, lemma5, lemma6, theorem8, theorem9, theorem10.
AlgebraReport set_algebra_suite(const std::vector<AlgebraFamily>& families);

/// C = I, disjoint X1 and X2 whose reach sets overlap: (X1 ∩ X2)(k) ⊊ X1(k) ∩ X2(k).
AlgebraFamily strict_inclusion_fixture();
/// Secret opaque w.r.t. each nonsecret set but the nonsecret sets are disjoint.
AlgebraFamily empty_nonsecret_intersection_fixture();
/// Secrets each weakly opaque with an empty common intersection.
AlgebraFamily empty_secret_intersection_fixture();
/// Opaque w.r.t. the union of two nonsecret sets but w.r.t. neither alone.
AlgebraFamily union_nonsecret_converse_fixture();
/// The union of two secrets is weakly opaque but one secret alone is not.
AlgebraFamily weak_union_converse_fixture();

} // namespace opaque
