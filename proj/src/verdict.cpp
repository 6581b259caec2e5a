// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/verdict.hpp"

namespace opaque {

std::string to_string(Status s) {
    switch (s) {
    case Status::holds:
        return "HOLDS";
    case Status::fails:
        return "FAILS";
    case Status::unknown:
        return "UNKNOWN";
    }
    return "?";
}

std::string to_string(Mode m) {
    switch (m) {
    case Mode::strong:
        return "strong";
    case Mode::weak:
        return "weak";
    case Mode::eps:
        return "eps";
    case Mode::decentralized:
        return "decentralized";
    case Mode::co:
        return "co";
    case Mode::collusion:
        return "collusion";
    case Mode::sound:
        return "sound";
    }
    return "?";
}

Status combine(const std::vector<Status>& parts) {
    bool unknown = false;
    for (Status s : parts) {
        if (s == Status::fails) {
            return Status::fails;
        }
        unknown = unknown || s == Status::unknown;
    }
    return unknown ? Status::unknown : Status::holds;
}

} // namespace opaque
