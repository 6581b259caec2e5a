// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/opacity.hpp"
#include "opaque/system.hpp"
#include "opaque/verdict.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace opaque {

/// Adversary i observes y_i = C_i x. Adversaries are addressed by index
/// 0..l-1; labels are for reports only.
struct AdversaryEnsemble {
    std::vector<Mat> maps;
    std::vector<int> labels; ///< empty means 1..l

    int size() const { return static_cast<int>(maps.size()); }
    int label(int i) const { return labels.empty() ? i + 1 : labels[static_cast<std::size_t>(i)]; }
    /// [C_1; ...; C_l]
    Mat stacked() const;
    void validate(int n) const;
};

/// Edge (i, j): j can receive information from i. Self-loops are ignored.
struct CommGraph {
    int size = 0;
    std::vector<std::pair<int, int>> edges;

    void validate() const;
    /// Senders into j, ascending, without j itself.
    std::vector<int> in_neighbors(int j) const;
};

struct CoordinatorRule {
    enum class Kind { union_of_maps };
    Kind kind = Kind::union_of_maps;
    /// Seed for the sampling fallback of check_co_opacity.
    std::uint64_t seed = 0x5eed;
};

struct DecentralizedReport {
    std::vector<Verdict> per_adversary;
    Verdict aggregate; ///< HOLDS iff every adversary HOLDS
};

DecentralizedReport check_decentralized(const Scenario& sc, const AdversaryEnsemble& ens, int k,
                                        const CheckOptions& opts = {});

struct DecentralizedScheduleReport {
    std::map<int, DecentralizedReport> per_k;
    Status aggregate = Status::unknown;
};

/// Every k of sc.schedule.
DecentralizedScheduleReport check_decentralized_K(const Scenario& sc, const AdversaryEnsemble& ens,
                                                  const CheckOptions& opts = {});

/// Single strong check with the stacked map. HOLDS here implies
/// check_decentralized HOLDS; the converse is false in general.
Verdict check_aggregated(const Scenario& sc, const AdversaryEnsemble& ens, int k, const CheckOptions& opts = {});

/// Each adversary explains S_i = X_s(k) ∩ {x : C_i x ∈ conv(C_i X_ns(k))}.
/// HOLDS iff the S_i cover X_s(k). Decided exactly by a depth-first search
/// over one violated facet per adversary (LP per node, at most 10^4 LPs);
/// past that, 10^4 sampled points decide FAILS or UNKNOWN. Needs p_i <= 3 and
/// bounded inputs.
Verdict check_co_opacity(const Scenario& sc, const AdversaryEnsemble& ens, const CoordinatorRule& rule, int k);

/// Every vertex outside d has an in-edge from d.
bool is_directed_dominating(const CommGraph& g, const std::vector<int>& d);

struct CollusionResult {
    /// rounds[r][i]: adversary i is non-opaque (strong FAILS) after round r.
    std::vector<std::vector<bool>> rounds;
    /// Index of the map each adversary ends up using.
    std::vector<int> map_used;
    /// FAILS iff every adversary is non-opaque at the fixpoint.
    Verdict aggregate;

    const std::vector<bool>& final_status() const { return rounds.back(); }
    int rounds_to_fixpoint() const { return static_cast<int>(rounds.size()) - 1; }
};

/// Synchronous rounds: a non-opaque adversary sends its current map to its
/// out-neighbours; an opaque receiver adopts the map of its lowest-index
/// non-opaque sender and recomputes. Stops when nothing changes.
CollusionResult simulate_collusion(const Scenario& sc, const AdversaryEnsemble& ens, const CommGraph& g, int k,
                                   const CheckOptions& opts = {});

/// One independent run per k of sc.schedule, each from the original maps.
std::map<int, CollusionResult> simulate_collusion_K(const Scenario& sc, const AdversaryEnsemble& ens,
                                                    const CommGraph& g, const CheckOptions& opts = {});

/// Each C_i alone is opaque but the stacked map is not.
struct AggregationCounterexample {
    Scenario scenario;
    AdversaryEnsemble ensemble;
    int k = 1;
};

AggregationCounterexample aggregation_converse_fixture();

} // namespace opaque
