// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/error.hpp"

#include <cmath>

namespace opaque {

struct Tolerances {
    double geom_eps = 1e-9; ///< membership / containment slack (Euclidean)
    double lp_eps = 1e-9;   ///< LP feasibility slack
    double gjk_eps = 1e-10; ///< distance convergence

    void validate() const {
        for (double v : {geom_eps, lp_eps, gjk_eps}) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InvalidArgument("tolerances must be finite and nonnegative");
            }
        }
    }
};

} // namespace opaque
