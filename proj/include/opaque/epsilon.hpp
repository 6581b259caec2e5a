// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/system.hpp"
#include "opaque/verdict.hpp"

#include <map>

namespace opaque {

/// max over z in CX_s(k) of dist(z, CX_ns(k)). The distance to a convex set is
/// convex, so the maximum sits at a vertex of CX_s(k).
struct OpacityRadius {
    double radius = 0.0;
    Vec argmax;  ///< output-space vertex attaining the radius
    Vec nearest; ///< closest point of CX_ns(k) to argmax
    /// False when a reach set hit the vertex cap; the radius is then computed
    /// on an over-approximation and is only a bound.
    bool exact = true;
};

/// With unbounded inputs the distance is taken modulo the reachable output
/// directions, where it is exact.
OpacityRadius opacity_radius(const Scenario& sc, int k, const ReachOptions& opts = {});

struct EpsVerdict {
    int k = 0;
    double radius = 0.0;
    double threshold = 0.0;
    /// HOLDS iff radius <= threshold + geom_eps; UNKNOWN if the radius is not exact.
    Status status = Status::holds;
    Vec argmax_vertex;
    Vec nearest;
    bool exact = true;

    bool holds() const { return status == Status::holds; }
    Verdict as_verdict() const;
};

/// Throws InvalidArgument for negative or non-finite eps.
EpsVerdict check_eps_k_iso(const Scenario& sc, int k, double eps, const ReachOptions& opts = {});

struct EpsScheduleReport {
    std::map<int, EpsVerdict> per_k;
    Status aggregate = Status::holds;
};

/// Every k of sc.schedule; HOLDS iff each k holds.
EpsScheduleReport check_eps_K_iso(const Scenario& sc, double eps, const ReachOptions& opts = {});

} // namespace opaque
