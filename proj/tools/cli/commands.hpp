// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "report.hpp"
#include "scenario_io.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace opaque::cli {

struct Options {
    std::string mode = "strong";
    std::optional<int> k;
    std::optional<double> eps;
    int order = 3;
    std::optional<double> delta;
    int proj_x = 0;
    int proj_y = 1;
    std::uint64_t seed = 0x5eed;
    int threads = 1;
};

/// OPAQUE_REACH_THREADS if set and positive, else the hardware count.
int threads_from_env();

Report cmd_check(const ScenarioFile& file, const Options& opts);
Report cmd_radius(const ScenarioFile& file, const Options& opts);

struct PruneOutput {
    Report report;
    /// Input document with the secret set replaced by X_s', when X_s' has vertices.
    std::optional<nlohmann::ordered_json> scenario;
};
/// Unsalvageable or empty secrets give a FAILS report.
PruneOutput cmd_prune(const ScenarioFile& file, const Options& opts);

struct PlotOutput {
    std::string svg;
    std::string csv;
};
PlotOutput cmd_plot(const ScenarioFile& file, const Options& opts);

} // namespace opaque::cli
