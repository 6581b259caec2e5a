// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/decentralized.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>

namespace opaque {

Mat AdversaryEnsemble::stacked() const {
    int rows = 0;
    for (const auto& c : maps) {
        rows += static_cast<int>(c.rows());
    }
    Mat out(rows, maps.empty() ? 0 : maps.front().cols());
    int r = 0;
    for (const auto& c : maps) {
        out.middleRows(r, c.rows()) = c;
        r += static_cast<int>(c.rows());
    }
    return out;
}

void AdversaryEnsemble::validate(int n) const {
    if (maps.empty()) {
        throw InvalidArgument("adversary ensemble is empty");
    }
    if (!labels.empty() && labels.size() != maps.size()) {
        throw InvalidArgument("adversary ensemble: one label per map");
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
        require_dims(maps[i].cols() == n, "adversary " + std::to_string(i) + ": map must have n columns");
        if (maps[i].rows() < 1) {
            throw InvalidArgument("adversary " + std::to_string(i) + ": map has no rows");
        }
    }
}

void CommGraph::validate() const {
    if (size < 0) {
        throw InvalidArgument("communication graph: negative size");
    }
    for (const auto& [a, b] : edges) {
        if (a < 0 || a >= size || b < 0 || b >= size) {
            throw InvalidArgument("communication graph: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                  ") references a missing vertex");
        }
    }
}

std::vector<int> CommGraph::in_neighbors(int j) const {
    std::set<int> in;
    for (const auto& [a, b] : edges) {
        if (b == j && a != j) {
            in.insert(a);
        }
    }
    return {in.begin(), in.end()};
}

namespace {

Scenario observed_by(const Scenario& sc, const Mat& c) {
    Scenario out = sc;
    out.sys = sc.sys.with_output(c);
    return out;
}

void check_k(int k, const char* what) {
    if (k < 1) {
        throw InvalidArgument(std::string(what) + ": k must be >= 1");
    }
}

// The adversary's view: a strong-k-ISO check through one map.
std::vector<Verdict> per_adversary(const Scenario& sc, const AdversaryEnsemble& ens, int k, const CheckOptions& opts) {
    std::vector<Verdict> out;
    for (const auto& c : ens.maps) {
        out.push_back(check_strong_k_iso(observed_by(sc, c), k, opts));
    }
    return out;
}

} // namespace

DecentralizedReport check_decentralized(const Scenario& sc, const AdversaryEnsemble& ens, int k,
                                        const CheckOptions& opts) {
    check_k(k, "check_decentralized");
    ens.validate(sc.sys.n());
    DecentralizedReport rep;
    rep.per_adversary = per_adversary(sc, ens, k, opts);
    std::vector<Status> parts;
    for (const auto& v : rep.per_adversary) {
        parts.push_back(v.status);
    }
    rep.aggregate = Verdict{combine(parts), Mode::decentralized, k, std::nullopt, {}, ""};
    for (int i = 0; i < ens.size(); ++i) {
        const Verdict& v = rep.per_adversary[static_cast<std::size_t>(i)];
        if (v.fails()) {
            rep.aggregate.witness = v.witness;
            rep.aggregate.note = "adversary " + std::to_string(ens.label(i)) + " is not fooled";
            break;
        }
    }
    return rep;
}

DecentralizedScheduleReport check_decentralized_K(const Scenario& sc, const AdversaryEnsemble& ens,
                                                  const CheckOptions& opts) {
    sc.validate();
    DecentralizedScheduleReport rep;
    std::vector<Status> parts;
    for (int k : sc.schedule) {
        auto r = check_decentralized(sc, ens, k, opts);
        parts.push_back(r.aggregate.status);
        rep.per_k.emplace(k, std::move(r));
    }
    rep.aggregate = combine(parts);
    return rep;
}

Verdict check_aggregated(const Scenario& sc, const AdversaryEnsemble& ens, int k, const CheckOptions& opts) {
    check_k(k, "check_aggregated");
    ens.validate(sc.sys.n());
    Verdict v = check_strong_k_iso(observed_by(sc, ens.stacked()), k, opts);
    v.mode = Mode::decentralized;
    return v;
}

namespace {

constexpr int kMaxClauseLps = 10000;
constexpr int kSamples = 10000;

struct CoSearch {
    const VPolytope& xs;
    std::vector<Mat> maps;
    std::vector<HPolytope> hulls;   ///< conv(C_i X_ns(k)), normalized, output space
    std::vector<HPolytope> regions; ///< the same rows pulled back to state space
    Tolerances tol;
    int lps = 0;
    bool capped = false;

    // A point of conv(xs) that violates one row of every region, if any.
    std::optional<Vec> search(std::size_t depth, const Mat& rows, const Vec& offsets) {
        if (depth == regions.size()) {
            auto x = lp_feasible_in_hull(HPolytope(xs.dim(), rows, offsets), xs, tol);
            return x && !explained(*x) ? x : std::nullopt;
        }
        const HPolytope& r = regions[depth];
        for (int j = 0; j < r.rows(); ++j) {
            if (lps >= kMaxClauseLps) {
                capped = true;
                return std::nullopt;
            }
            // a·x >= b + margin, written as -a·x <= -b - margin.
            Mat nr(rows.rows() + 1, xs.dim());
            nr << rows, -r.normals().row(j);
            Vec no(offsets.size() + 1);
            no << offsets, -r.offsets()(j) - 2 * tol.geom_eps;
            ++lps;
            if (!lp_feasible_in_hull(HPolytope(xs.dim(), nr, no), xs, tol)) {
                continue;
            }
            if (auto x = search(depth + 1, nr, no)) {
                return x;
            }
            if (capped) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    bool explained(const Vec& x) const {
        for (std::size_t i = 0; i < maps.size(); ++i) {
            if (hulls[i].max_violation(maps[i] * x) <= tol.geom_eps) {
                return true;
            }
        }
        return false;
    }
};

} // namespace

Verdict check_co_opacity(const Scenario& sc, const AdversaryEnsemble& ens, const CoordinatorRule& rule, int k) {
    check_k(k, "check_co_opacity");
    sc.validate();
    ens.validate(sc.sys.n());
    if (rule.kind != CoordinatorRule::Kind::union_of_maps) {
        throw InvalidArgument("check_co_opacity: unknown coordinator rule");
    }
    for (const auto& c : ens.maps) {
        if (c.rows() > 3) {
            throw UnsupportedDimension("check_co_opacity: adversary output dimension above 3");
        }
    }
    if (!sc.inputs.bounded()) {
        throw InvalidArgument("check_co_opacity: unbounded input set");
    }
    const ReachSet rs = reach_exact(sc.sys, sc.secret, sc.inputs, k);
    const ReachSet rns = reach_exact(sc.sys, sc.nonsecret, sc.inputs, k);
    const bool fails_sound = rs.fidelity == Fidelity::exact;
    const bool holds_sound = rns.fidelity == Fidelity::exact;
    const VPolytope xs = rs.vertices();
    const VPolytope xns = rns.vertices();

    CoSearch s{xs, ens.maps, {}, {}, sc.tol};
    for (const auto& c : ens.maps) {
        const HPolytope h = convex_hull_h(linear_image(c, xns), sc.tol).normalized();
        s.hulls.push_back(h);
        // Rows orthogonal to range(C_i) can never be violated by C_i x.
        const Mat pulled = h.normals() * c;
        std::vector<int> keep;
        for (int i = 0; i < pulled.rows(); ++i) {
            if (pulled.row(i).norm() > 1e-12) {
                keep.push_back(i);
            }
        }
        Mat rows(static_cast<int>(keep.size()), sc.sys.n());
        Vec offs(static_cast<int>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) {
            rows.row(static_cast<int>(i)) = pulled.row(keep[i]);
            offs(static_cast<int>(i)) = h.offsets()(keep[i]);
        }
        s.regions.push_back(HPolytope(sc.sys.n(), rows, offs));
    }

    Verdict v{Status::unknown, Mode::co, k, std::nullopt, {}, ""};
    auto fail_at = [&](const Vec& x) {
        // Distance for the adversary that comes closest to explaining x.
        double dist = std::numeric_limits<double>::infinity();
        std::optional<Vec> nearest;
        for (const auto& c : ens.maps) {
            dist = std::min(dist, point_distance(c * x, linear_image(c, xns), sc.tol).distance);
        }
        v.status = fails_sound ? Status::fails : Status::unknown;
        v.witness = Witness{ens.stacked() * x, dist, nearest, std::nullopt, std::nullopt, x};
    };

    for (const auto& x : xs.vertices()) {
        if (!s.explained(x)) {
            fail_at(x);
            v.note = "a vertex of X_s(k) is explained by no adversary";
            return v;
        }
    }
    const Mat none(0, sc.sys.n());
    if (auto x = s.search(0, none, Vec(0))) {
        fail_at(*x);
        v.note = "a point of X_s(k) is explained by no adversary";
        return v;
    }
    if (!s.capped) {
        v.status = holds_sound ? Status::holds : Status::unknown;
        v.note = "X_s(k) is covered by the explainable regions (" + std::to_string(s.lps) + " LPs)";
        return v;
    }
    std::mt19937_64 rng(rule.seed);
    std::exponential_distribution<double> expo(1.0);
    const Mat vm = xs.as_matrix();
    for (int i = 0; i < kSamples; ++i) {
        Vec w(vm.cols());
        for (int j = 0; j < w.size(); ++j) {
            w(j) = expo(rng);
        }
        const Vec x = vm * (w / w.sum());
        if (!s.explained(x)) {
            fail_at(x);
            v.note = "sampled point of X_s(k) is explained by no adversary";
            return v;
        }
    }
    v.note = "clause budget exhausted; no counterexample among " + std::to_string(kSamples) + " samples";
    return v;
}

bool is_directed_dominating(const CommGraph& g, const std::vector<int>& d) {
    g.validate();
    std::vector<bool> in_d(static_cast<std::size_t>(g.size), false);
    for (int v : d) {
        if (v < 0 || v >= g.size) {
            throw InvalidArgument("is_directed_dominating: vertex " + std::to_string(v) + " not in graph");
        }
        in_d[static_cast<std::size_t>(v)] = true;
    }
    std::vector<bool> covered = in_d;
    for (const auto& [a, b] : g.edges) {
        if (a != b && in_d[static_cast<std::size_t>(a)]) {
            covered[static_cast<std::size_t>(b)] = true;
        }
    }
    return std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
}

CollusionResult simulate_collusion(const Scenario& sc, const AdversaryEnsemble& ens, const CommGraph& g, int k,
                                   const CheckOptions& opts) {
    check_k(k, "simulate_collusion");
    ens.validate(sc.sys.n());
    g.validate();
    if (g.size != ens.size()) {
        throw InvalidArgument("simulate_collusion: graph size must equal the number of adversaries");
    }
    const int l = ens.size();
    const std::vector<Verdict> own = per_adversary(sc, ens, k, opts);
    CollusionResult res;
    res.map_used.resize(static_cast<std::size_t>(l));
    std::vector<bool> status(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
        res.map_used[static_cast<std::size_t>(i)] = i;
        status[static_cast<std::size_t>(i)] = own[static_cast<std::size_t>(i)].fails();
    }
    res.rounds.push_back(status);
    for (int round = 0; round < l; ++round) {
        std::vector<bool> next = status;
        std::vector<int> maps = res.map_used;
        for (int j = 0; j < l; ++j) {
            if (status[static_cast<std::size_t>(j)]) {
                continue;
            }
            for (int i : g.in_neighbors(j)) {
                if (status[static_cast<std::size_t>(i)]) {
                    const int adopted = res.map_used[static_cast<std::size_t>(i)];
                    maps[static_cast<std::size_t>(j)] = adopted;
                    next[static_cast<std::size_t>(j)] = own[static_cast<std::size_t>(adopted)].fails();
                    break;
                }
            }
        }
        if (next == status) {
            break;
        }
        status = std::move(next);
        res.map_used = std::move(maps);
        res.rounds.push_back(status);
    }
    const bool all = std::all_of(status.begin(), status.end(), [](bool b) { return b; });
    res.aggregate = Verdict{all ? Status::fails : Status::holds, Mode::collusion, k, std::nullopt, {}, ""};
    if (all) {
        res.aggregate.witness = own[static_cast<std::size_t>(res.map_used.front())].witness;
        res.aggregate.note = "every adversary is non-opaque after " + std::to_string(res.rounds_to_fixpoint()) +
                             " rounds";
    } else {
        res.aggregate.note = "some adversary remains fooled at the fixpoint";
    }
    return res;
}

std::map<int, CollusionResult> simulate_collusion_K(const Scenario& sc, const AdversaryEnsemble& ens,
                                                    const CommGraph& g, const CheckOptions& opts) {
    sc.validate();
    std::map<int, CollusionResult> out;
    for (int k : sc.schedule) {
        out.emplace(k, simulate_collusion(sc, ens, g, k, opts));
    }
    return out;
}

AggregationCounterexample aggregation_converse_fixture() {
    // X_ns is the segment (1,0)-(0,1). Each coordinate of the secret origin is
    // matched by some nonsecret state, but no single one matches both.
    Vec s = Vec::Zero(2);
    Vec a(2), b(2);
    a << 1, 0;
    b << 0, 1;
    Scenario sc{LtiSystem(Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Identity(2, 2)), VPolytope::singleton(s),
                VPolytope(Points{a, b}), InputSet::zero(1), {1}, {}};
    AdversaryEnsemble ens{{Mat(Eigen::RowVector2d(1, 0)), Mat(Eigen::RowVector2d(0, 1))}, {}};
    return {sc, ens, 1};
}

} // namespace opaque
