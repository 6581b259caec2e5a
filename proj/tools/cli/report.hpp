// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/verdict.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace opaque::cli {

struct KReport {
    int k = 0;
    Status status = Status::unknown;
    std::string note;
    std::optional<double> radius;
    std::optional<bool> exact;
    std::optional<Witness> witness;
    int certificates = 0;
    std::optional<double> predicted_cost;
    std::vector<Status> adversaries;
    double seconds = 0.0;

    bool operator==(const KReport&) const;
};

struct Report {
    std::string command;
    std::string mode;
    std::string scenario;
    Status status = Status::unknown;
    std::vector<KReport> per_k;
    std::vector<std::string> warnings;
    /// Command-specific payload (pruned set, collusion rounds, ...).
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    double seconds = 0.0;

    bool operator==(const Report&) const;
};

/// 0 HOLDS, 1 FAILS, 2 UNKNOWN.
int exit_code(Status s);
Status parse_status(const std::string& s);

/// timing = false drops every "seconds" field so reports hash reproducibly.
nlohmann::ordered_json to_json(const Report& r, bool timing = true);
Report report_from_json(const nlohmann::ordered_json& j);

void write_text(std::ostream& os, const Report& r);

} // namespace opaque::cli
