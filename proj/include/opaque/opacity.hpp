// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/system.hpp"
#include "opaque/verdict.hpp"

#include <map>
#include <optional>

namespace opaque {

struct CheckOptions {
    ReachOptions reach{};
    /// Attach per-vertex matching certificates to strong HOLDS verdicts.
    bool certificates = true;
};

/// CX_s(k) ⊆ CX_ns(k). Never UNKNOWN unless a reach set hit the vertex cap.
Verdict check_strong_k_iso(const Scenario& sc, int k, const CheckOptions& opts = {});
/// CX_s(k) ∩ CX_ns(k) ≠ ∅.
Verdict check_weak_k_iso(const Scenario& sc, int k, const CheckOptions& opts = {});

struct ScheduleReport {
    std::map<int, Verdict> per_k;
    Status aggregate = Status::holds;
    /// Earliest k whose verdict decided a FAILS aggregate.
    std::optional<int> first_failure;
};

/// Runs the mode over every k of the schedule (strong or weak only).
ScheduleReport check_K_iso(const Scenario& sc, Mode mode, const CheckOptions& opts = {});
/// {m, m-1, ..., m-k+1}: k-step opacity as a schedule.
std::vector<int> k_step_schedule(int m, int k);

/// Output sets at time k, exact fidelity. Bounded inputs only.
struct OutputSets {
    ReachSet secret;
    ReachSet nonsecret;
};
OutputSets output_sets(const Scenario& sc, int k, const ReachOptions& opts = {});

struct Pre0Conditions {
    bool cond1 = false;
    std::optional<Vec> cond1_point; ///< nonsecret state explaining some secret output
    bool cond2 = false;
    int cond2_vertex = -1;           ///< secret vertex with the largest violation
    double cond2_violation = 0.0;    ///< output-space violation of that vertex
    bool both() const { return cond1 && cond2; }
};

/// Backward-set conditions at time k (p <= 3, bounded inputs). Condition 2
/// uses the robust backward set: every control sequence must land in CX_ns(k).
Pre0Conditions check_pre0_conditions(const Scenario& sc, int k);

enum class PreImage { universal, existential };

struct PruneResult {
    HPolytope set;                    ///< X_s' in state space
    std::optional<VPolytope> vertices; ///< enumerated when nonempty and n <= 3
    bool empty = false;
};

/// X_s ∩ Pre0[CX_s(k) ∩ CX_ns(k)]. The universal pre-image keeps only states
/// whose every run lands in the intersection; the existential one keeps states
/// with some such run. Throws UnsalvageableSecret when the output sets do not meet.
PruneResult prune_secret(const Scenario& sc, int k, PreImage kind = PreImage::universal);

} // namespace opaque
