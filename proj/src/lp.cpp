// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/lp.hpp"

#include "opaque/error.hpp"

#include <cmath>
#include <limits>

namespace opaque::lp {

LinearProgram::LinearProgram(int num_vars)
    : cost(Vec::Zero(num_vars)), a_ub(0, num_vars), b_ub(0), a_eq(0, num_vars), b_eq(0) {}

namespace {

void append_row(Mat& a, Vec& b, const Vec& row, double rhs) {
    require_dims(row.size() == a.cols(), "lp: constraint row has wrong length");
    a.conservativeResize(a.rows() + 1, Eigen::NoChange);
    a.row(a.rows() - 1) = row.transpose();
    b.conservativeResize(b.size() + 1);
    b(b.size() - 1) = rhs;
}

// Tableau layout: rows 0..m-1 constraints, last column is the rhs.
// The objective row is kept separately as reduced costs.
class Tableau {
  public:
    Tableau(Mat t, std::vector<int> basis, const Options& opt) : t_(std::move(t)), basis_(std::move(basis)), opt_(opt) {}

    int rows() const { return static_cast<int>(t_.rows()); }
    int cols() const { return static_cast<int>(t_.cols()) - 1; }
    double rhs(int r) const { return t_(r, cols()); }
    const std::vector<int>& basis() const { return basis_; }
    Mat& raw() { return t_; }

    void pivot(int r, int c) {
        t_.row(r) /= t_(r, c);
        for (int i = 0; i < rows(); ++i) {
            if (i != r && t_(i, c) != 0.0) {
                t_.row(i) -= t_(i, c) * t_.row(r);
            }
        }
        basis_[r] = c;
    }

    // Minimizes cost over columns [0, active_cols). Returns status; iterations accumulated.
    Status run(const Vec& cost, int active_cols, int& iterations) {
        while (true) {
            if (iterations >= opt_.max_iterations) {
                return Status::iteration_limit;
            }
            // Reduced costs d_j = c_j - c_B^T B^{-1} a_j (tableau already holds B^{-1} A).
            int entering = -1;
            for (int j = 0; j < active_cols; ++j) {
                double d = cost(j);
                for (int r = 0; r < rows(); ++r) {
                    d -= cost(basis_[r]) * t_(r, j);
                }
                if (d < -opt_.cost_tol) {
                    entering = j; // Bland: lowest index
                    break;
                }
            }
            if (entering < 0) {
                return Status::optimal;
            }
            int leaving = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < rows(); ++r) {
                double a = t_(r, entering);
                if (a > opt_.pivot_tol) {
                    double ratio = rhs(r) / a;
                    if (ratio < best - 1e-15 ||
                        (std::abs(ratio - best) <= 1e-15 && leaving >= 0 && basis_[r] < basis_[leaving])) {
                        best = ratio;
                        leaving = r;
                    }
                }
            }
            if (leaving < 0) {
                return Status::unbounded;
            }
            pivot(leaving, entering);
            ++iterations;
        }
    }

    void drop_row(int r) {
        Mat next(t_.rows() - 1, t_.cols());
        next << t_.topRows(r), t_.bottomRows(t_.rows() - r - 1);
        t_ = std::move(next);
        basis_.erase(basis_.begin() + r);
    }

  private:
    Mat t_;
    std::vector<int> basis_;
    Options opt_;
};

} // namespace

void LinearProgram::add_le(const Vec& row, double rhs) { append_row(a_ub, b_ub, row, rhs); }
void LinearProgram::add_eq(const Vec& row, double rhs) { append_row(a_eq, b_eq, row, rhs); }

std::string to_string(Status s) {
    switch (s) {
    case Status::optimal:
        return "optimal";
    case Status::infeasible:
        return "infeasible";
    case Status::unbounded:
        return "unbounded";
    case Status::iteration_limit:
        return "iteration_limit";
    }
    return "unknown";
}

Result solve(const LinearProgram& p, const Options& opt) {
    const int n = p.num_vars();
    require_dims(p.a_ub.cols() == n && p.a_eq.cols() == n, "lp: constraint matrix width != number of variables");
    require_dims(p.b_ub.size() == p.a_ub.rows() && p.b_eq.size() == p.a_eq.rows(), "lp: rhs length mismatch");
    require_dims(p.free.empty() || static_cast<int>(p.free.size()) == n, "lp: free-flag length mismatch");

    // Column map: variable j -> (plus column, minus column or -1).
    std::vector<int> plus(n), minus(n, -1);
    int ncols = 0;
    for (int j = 0; j < n; ++j) {
        plus[j] = ncols++;
        if (!p.free.empty() && p.free[j]) {
            minus[j] = ncols++;
        }
    }
    const int n_ub = static_cast<int>(p.a_ub.rows());
    const int n_eq = static_cast<int>(p.a_eq.rows());
    const int m = n_ub + n_eq;
    const int structural = ncols + n_ub; // plus slacks
    const int total = structural + m;    // plus artificials

    Mat t = Mat::Zero(m, total + 1);
    Vec cost2 = Vec::Zero(total);
    for (int j = 0; j < n; ++j) {
        cost2(plus[j]) = p.cost(j);
        if (minus[j] >= 0) {
            cost2(minus[j]) = -p.cost(j);
        }
    }
    auto fill = [&](int r, const Eigen::Ref<const Vec>& row, double rhs, int slack) {
        double sign = rhs < 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
            t(r, plus[j]) = sign * row(j);
            if (minus[j] >= 0) {
                t(r, minus[j]) = -sign * row(j);
            }
        }
        if (slack >= 0) {
            t(r, slack) = sign;
        }
        t(r, structural + r) = 1.0;
        t(r, total) = sign * rhs;
    };
    for (int i = 0; i < n_ub; ++i) {
        fill(i, p.a_ub.row(i).transpose(), p.b_ub(i), ncols + i);
    }
    for (int i = 0; i < n_eq; ++i) {
        fill(n_ub + i, p.a_eq.row(i).transpose(), p.b_eq(i), -1);
    }
    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) {
        basis[r] = structural + r;
    }

    Result result;
    Tableau tab(std::move(t), std::move(basis), opt);

    // Phase 1: minimize the sum of artificials.
    Vec cost1 = Vec::Zero(total);
    cost1.tail(m).setOnes();
    Status s1 = tab.run(cost1, total, result.iterations);
    if (s1 == Status::iteration_limit) {
        result.status = s1;
        return result;
    }
    double infeas = 0.0;
    for (int r = 0; r < tab.rows(); ++r) {
        if (tab.basis()[r] >= structural) {
            infeas += tab.rhs(r);
        }
    }
    if (infeas > opt.feas_tol) {
        result.status = Status::infeasible;
        return result;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (int r = tab.rows() - 1; r >= 0; --r) {
        if (tab.basis()[r] < structural) {
            continue;
        }
        int col = -1;
        double best = opt.pivot_tol;
        for (int j = 0; j < structural; ++j) {
            if (std::abs(tab.raw()(r, j)) > best) {
                best = std::abs(tab.raw()(r, j));
                col = j;
            }
        }
        if (col >= 0) {
            tab.pivot(r, col);
        } else {
            tab.drop_row(r);
        }
    }
    // Artificial columns must stay out of phase 2.
    Status s2 = tab.run(cost2, structural, result.iterations);
    result.status = s2;
    if (s2 != Status::optimal) {
        return result;
    }
    Vec y = Vec::Zero(total);
    for (int r = 0; r < tab.rows(); ++r) {
        y(tab.basis()[r]) = tab.rhs(r);
    }
    result.x.resize(n);
    for (int j = 0; j < n; ++j) {
        result.x(j) = y(plus[j]) - (minus[j] >= 0 ? y(minus[j]) : 0.0);
    }
    result.objective = p.cost.dot(result.x);
    return result;
}

} // namespace opaque::lp
