// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opaque {

enum class Status { holds, fails, unknown };
enum class Mode { strong, weak, eps, decentralized, co, collusion, sound };

std::string to_string(Status s);
std::string to_string(Mode m);

/// An initial state and the controls applied from it.
struct Trace {
    Vec x0;
    Points controls;
};

/// Evidence against opacity: a secret output and how far it is from what a
/// nonsecret run can produce.
struct Witness {
    Vec output;   ///< secret output point (output space)
    double distance = 0.0;
    std::optional<Vec> nearest; ///< closest nonsecret output, when known
    std::optional<Trace> secret;
    std::optional<Trace> nonsecret;
    /// State-space point for witnesses that are not outputs (co-opacity).
    std::optional<Vec> state;
};

/// A secret output vertex matched by a nonsecret run with the same output.
struct Certificate {
    int secret_vertex = -1;
    Vec output;
    Trace secret;
    Trace nonsecret;
};

struct Verdict {
    Status status = Status::unknown;
    Mode mode = Mode::strong;
    int k = 0;
    std::optional<Witness> witness;
    std::vector<Certificate> certificates;
    std::string note;

    bool holds() const { return status == Status::holds; }
    bool fails() const { return status == Status::fails; }
};

/// HOLDS iff all hold; FAILS if any fails; otherwise UNKNOWN.
Status combine(const std::vector<Status>& parts);

} // namespace opaque
