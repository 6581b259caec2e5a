// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/system.hpp"
#include "opaque/verdict.hpp"
#include "opaque/zonotope.hpp"

#include <vector>

namespace opaque {

enum class Role { secret, nonsecret };

std::string to_string(Role r);

/// Zonotope reach sets at time k with under ⊆ exact ⊆ over.
struct ApproxPair {
    ReachSet under;
    ReachSet over;
    Role source = Role::secret;
    int k = 0;
};

/// Largest axis-aligned box inside conv(P), as a zonotope. Exact for boxes in
/// any dimension; solved by LP for dim <= 3; the centroid above that.
Zonotope inscribed_box(const VPolytope& p, const Tolerances& tol = {});

/// Propagates zonotope enclosures with reduce_over and reduce_under applied at
/// every step. V-polytopes are boxed (bounding box over, inscribed box under).
ApproxPair approx_reach(const LtiSystem& sys, const VPolytope& x0, const InputSet& u, int k, int order,
                        Role source = Role::secret, const Tolerances& tol = {});
ApproxPair approx_reach(const LtiSystem& sys, const Zonotope& x0, const InputSet& u, int k, int order,
                        Role source = Role::secret, const Tolerances& tol = {});

/// HOLDS if C·over_s ⊆ C·under_ns, FAILS if some point of C·under_s is
/// outside C·over_ns (witness with a replayable secret trace), else UNKNOWN.
/// Unbounded inputs give UNKNOWN.
Verdict verify_sound(const Scenario& sc, int k, int order);

/// Advisory classification of the secret set; no correctness claim.
struct CandidateFlags {
    bool good = false; ///< C·under_s ⊆ C·under_ns and C·over_s meets C·under_ns
    bool best = false; ///< C·over_s ⊆ C·under_ns
};

CandidateFlags candidate_flags(const Scenario& sc, int k, int order);

/// c1·k·L·n³ + c2·p·n + c3 with L = L_over + L_under. Units are whatever the
/// constants were fitted in (seconds for fit_cost_model). Advisory only.
struct CostModel {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 0.0;

    double predict(int n, int p, int k, int l_over, int l_under) const;
};

double cost_model(int n, int p, int k, int l_over, int l_under, const CostModel& model = {});

struct CostSample {
    int n = 1;
    int p = 1;
    int k = 1;
    int l_over = 1;
    int l_under = 1;
    double seconds = 0.0;
};

/// Nonnegative least squares on the three terms.
CostModel fit_cost_model(const std::vector<CostSample>& samples);

} // namespace opaque
