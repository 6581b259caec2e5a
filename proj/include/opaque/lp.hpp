// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"

#include <string>
#include <vector>

namespace opaque::lp {

/// minimize cost·x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x_j >= 0 unless free[j].
struct LinearProgram {
    Vec cost;
    Mat a_ub;
    Vec b_ub;
    Mat a_eq;
    Vec b_eq;
    std::vector<bool> free; ///< empty means "all nonnegative"

    explicit LinearProgram(int num_vars = 0);
    int num_vars() const { return static_cast<int>(cost.size()); }

    void add_le(const Vec& row, double rhs);
    void add_eq(const Vec& row, double rhs);
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(Status s);

struct Result {
    Status status = Status::infeasible;
    Vec x;
    double objective = 0.0;
    int iterations = 0;
};

struct Options {
    double feas_tol = 1e-9;  ///< phase-1 optimum above this => infeasible
    double pivot_tol = 1e-11;
    double cost_tol = 1e-11;
    int max_iterations = 200000;
};

/// Dense two-phase tableau simplex with Bland's anti-cycling rule.
Result solve(const LinearProgram& problem, const Options& options = {});

} // namespace opaque::lp
