// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/expr.hpp"
#include "opaque/polytope.hpp"
#include "opaque/system.hpp"
#include "opaque/verdict.hpp"

#include <functional>
#include <string>
#include <vector>

namespace opaque {

/// x(t+1) = f(x(t), u(t)),  y(t) = h(x(t)).
struct NlSystem {
    int n = 0;
    int m = 0;
    int p = 0;
    std::function<Vec(const Vec& x, const Vec& u)> step;
    std::function<Vec(const Vec& x)> output;

    /// One expression per state (f) and per output (h). Throws ParseError.
    static NlSystem from_expressions(int n, int m, const std::vector<std::string>& f, const std::vector<std::string>& h);
    /// The linear system as a nonlinear one.
    static NlSystem linear(const LtiSystem& sys);

    /// Throws InvalidArgument if dimensions or functions are missing.
    void validate() const;
    /// E.g. h(0) != 0.
    std::vector<std::string> warnings() const;
    /// x(0) .. x(T); throws NumericalError on a non-finite state or output.
    Points simulate(const Vec& x0, const Points& controls) const;
};

struct GridSpec {
    int x_per_axis = 5; ///< >= 2; points per nondegenerate axis of bbox(X0)
    int u_per_axis = 3; ///< >= 2; same for U
    std::size_t max_trajectories = 1000000;
    int threads = 1;
};

struct SampleProvenance {
    int x0 = -1;               ///< index into SampleCloud::x0_grid
    std::vector<int> controls; ///< indices into SampleCloud::u_grid, one per step
};

/// Outputs h(x(k)) of gridded runs, ordered by provenance (x0 index major,
/// then control indices lexicographically).
struct SampleCloud {
    Points points;
    std::vector<SampleProvenance> provenance;
    Points x0_grid;
    Points u_grid;
    int k = 0;

    Trace trace(std::size_t i) const;
};

/// Grid points are the bounding-box lattice points inside conv(P), plus the
/// points of P. Throws SizeLimitError past grid.max_trajectories.
SampleCloud nl_reach_samples(const NlSystem& sys, const VPolytope& x0, const VPolytope& u, int k,
                             const GridSpec& grid = {});

struct NlFalsifyResult {
    Verdict verdict;           ///< FAILS or UNKNOWN, never HOLDS
    double dispersion = 0.0;   ///< largest nearest-neighbour gap inside the nonsecret cloud
    std::size_t secret_points = 0;
    std::size_t nonsecret_points = 0;
};

/// FAILS if some secret sample is farther than delta from every nonsecret
/// sample. That is a real counterexample only when delta exceeds how far
/// h(X_ns(k)) can be from its samples, which the caller asserts.
NlFalsifyResult nl_falsify(const NlSystem& sys, const VPolytope& xs, const VPolytope& xns, const VPolytope& u, int k,
                           double delta, const GridSpec& secret_grid = {});
NlFalsifyResult nl_falsify(const NlSystem& sys, const VPolytope& xs, const VPolytope& xns, const VPolytope& u, int k,
                           double delta, const GridSpec& secret_grid, const GridSpec& nonsecret_grid);

} // namespace opaque
