// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/nonlinear.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace opaque {

NlSystem NlSystem::from_expressions(int n, int m, const std::vector<std::string>& f,
                                    const std::vector<std::string>& h) {
    if (n < 1 || m < 0) {
        throw InvalidArgument("nonlinear system: need n >= 1 and m >= 0");
    }
    if (static_cast<int>(f.size()) != n) {
        throw InvalidArgument("nonlinear system: need one expression per state, got " + std::to_string(f.size()));
    }
    if (h.empty()) {
        throw InvalidArgument("nonlinear system: output map is empty");
    }
    std::vector<Expr> fe, he;
    for (const auto& s : f) {
        fe.push_back(Expr::parse(s, n, m));
    }
    for (const auto& s : h) {
        // Outputs may not read controls.
        he.push_back(Expr::parse(s, n, 0));
    }
    NlSystem sys;
    sys.n = n;
    sys.m = m;
    sys.p = static_cast<int>(h.size());
    sys.step = [fe](const Vec& x, const Vec& u) {
        Vec out(static_cast<int>(fe.size()));
        for (std::size_t i = 0; i < fe.size(); ++i) {
            out(static_cast<int>(i)) = fe[i].eval(x, u);
        }
        return out;
    };
    sys.output = [he](const Vec& x) {
        Vec out(static_cast<int>(he.size()));
        const Vec none(0);
        for (std::size_t i = 0; i < he.size(); ++i) {
            out(static_cast<int>(i)) = he[i].eval(x, none);
        }
        return out;
    };
    return sys;
}

NlSystem NlSystem::linear(const LtiSystem& lti) {
    NlSystem sys;
    sys.n = lti.n();
    sys.m = lti.m();
    sys.p = lti.p();
    const Mat a = lti.A(), b = lti.B(), c = lti.C();
    sys.step = [a, b](const Vec& x, const Vec& u) { return Vec(a * x + b * u); };
    sys.output = [c](const Vec& x) { return Vec(c * x); };
    return sys;
}

void NlSystem::validate() const {
    if (n < 1 || m < 0 || p < 1) {
        throw InvalidArgument("nonlinear system: bad dimensions");
    }
    if (!step || !output) {
        throw InvalidArgument("nonlinear system: step and output must be set");
    }
}

std::vector<std::string> NlSystem::warnings() const {
    validate();
    std::vector<std::string> w;
    const Vec y0 = output(Vec::Zero(n));
    if (y0.size() != p || !y0.allFinite() || y0.norm() > 0) {
        w.push_back("h(0) != 0");
    }
    return w;
}

Points NlSystem::simulate(const Vec& x0, const Points& controls) const {
    validate();
    require_dims(x0.size() == n, "nonlinear simulate: x0 dimension != n");
    Points xs{x0};
    for (const auto& u : controls) {
        require_dims(u.size() == m, "nonlinear simulate: control dimension != m");
        Vec next = step(xs.back(), u);
        require_dims(next.size() == n, "nonlinear simulate: f returned the wrong dimension");
        if (!next.allFinite()) {
            throw NumericalError("nonlinear simulate: state became non-finite at step " + std::to_string(xs.size()));
        }
        xs.push_back(std::move(next));
    }
    return xs;
}

Trace SampleCloud::trace(std::size_t i) const {
    const SampleProvenance& pr = provenance.at(i);
    Trace t{x0_grid[static_cast<std::size_t>(pr.x0)], {}};
    for (int j : pr.controls) {
        t.controls.push_back(u_grid[static_cast<std::size_t>(j)]);
    }
    return t;
}

namespace {

// Lattice points of bbox(P) inside conv(P), then the points of P not already listed.
Points grid_of(const VPolytope& p, int per_axis, const Tolerances& tol) {
    if (per_axis < 2) {
        throw InvalidArgument("grid resolution must be >= 2 per axis");
    }
    const Vec lo = p.lower_bound(), hi = p.upper_bound();
    const int d = p.dim();
    std::vector<int> counts(static_cast<std::size_t>(d));
    double total = 1.0;
    for (int i = 0; i < d; ++i) {
        counts[static_cast<std::size_t>(i)] = hi(i) > lo(i) ? per_axis : 1;
        total *= counts[static_cast<std::size_t>(i)];
    }
    if (total > 1e7) {
        throw SizeLimitError("grid has more than 1e7 lattice points; use a coarser grid");
    }
    Points out;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        Vec z(d);
        for (int i = 0; i < d; ++i) {
            const int c = counts[static_cast<std::size_t>(i)];
            z(i) = c == 1 ? lo(i) : lo(i) + (hi(i) - lo(i)) * idx[static_cast<std::size_t>(i)] / (c - 1);
        }
        if (point_distance(z, p, tol).distance <= tol.geom_eps) {
            out.push_back(z);
        }
        int i = 0;
        while (i < d && ++idx[static_cast<std::size_t>(i)] == counts[static_cast<std::size_t>(i)]) {
            idx[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == d) {
            break;
        }
    }
    for (const auto& v : p.vertices()) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Vec& z) { return (z - v).norm() == 0.0; });
        if (!seen) {
            out.push_back(v);
        }
    }
    return out;
}

class KdTree {
  public:
    explicit KdTree(const Points& pts) : pts_(pts), idx_(pts.size()), dims_(pts.size(), 0) {
        std::iota(idx_.begin(), idx_.end(), 0);
        if (!pts.empty()) {
            build(0, idx_.size());
        }
    }

    /// Nearest point to q other than `exclude`; (index, distance), index -1 if none.
    std::pair<int, double> nearest(const Vec& q, int exclude = -1) const {
        best_ = {-1, std::numeric_limits<double>::infinity()};
        if (!pts_.empty()) {
            search(0, idx_.size(), q, exclude);
        }
        return {best_.first, std::sqrt(best_.second)};
    }

  private:
    void build(std::size_t lo, std::size_t hi) {
        if (hi - lo <= 8) {
            return;
        }
        const int d = static_cast<int>(pts_[idx_[lo]].size());
        int dim = 0;
        double spread = -1.0;
        for (int j = 0; j < d; ++j) {
            double a = std::numeric_limits<double>::infinity(), b = -a;
            for (std::size_t i = lo; i < hi; ++i) {
                a = std::min(a, pts_[idx_[i]](j));
                b = std::max(b, pts_[idx_[i]](j));
            }
            if (b - a > spread) {
                spread = b - a;
                dim = j;
            }
        }
        const std::size_t mid = (lo + hi) / 2;
        std::nth_element(idx_.begin() + static_cast<long>(lo), idx_.begin() + static_cast<long>(mid),
                         idx_.begin() + static_cast<long>(hi),
                         [&](int a, int b) { return pts_[a](dim) < pts_[b](dim); });
        dims_[mid] = dim;
        build(lo, mid);
        build(mid + 1, hi);
    }

    void search(std::size_t lo, std::size_t hi, const Vec& q, int exclude) const {
        if (hi - lo <= 8) {
            for (std::size_t i = lo; i < hi; ++i) {
                visit(idx_[i], q, exclude);
            }
            return;
        }
        const std::size_t mid = (lo + hi) / 2;
        const int dim = dims_[mid];
        visit(idx_[mid], q, exclude);
        const double diff = q(dim) - pts_[idx_[mid]](dim);
        const bool left_first = diff < 0;
        if (left_first) {
            search(lo, mid, q, exclude);
        } else {
            search(mid + 1, hi, q, exclude);
        }
        if (diff * diff < best_.second) {
            if (left_first) {
                search(mid + 1, hi, q, exclude);
            } else {
                search(lo, mid, q, exclude);
            }
        }
    }

    void visit(int i, const Vec& q, int exclude) const {
        if (i == exclude) {
            return;
        }
        const double d2 = (pts_[i] - q).squaredNorm();
        if (d2 < best_.second || (d2 == best_.second && i < best_.first)) {
            best_ = {i, d2};
        }
    }

    const Points& pts_;
    std::vector<int> idx_;
    std::vector<int> dims_;
    mutable std::pair<int, double> best_;
};

} // namespace

SampleCloud nl_reach_samples(const NlSystem& sys, const VPolytope& x0, const VPolytope& u, int k,
                             const GridSpec& grid) {
    sys.validate();
    require_dims(x0.dim() == sys.n, "nl_reach_samples: X0 dimension != n");
    require_dims(u.dim() == sys.m, "nl_reach_samples: U dimension != m");
    if (k < 0) {
        throw InvalidArgument("nl_reach_samples: k must be >= 0");
    }
    const Tolerances tol;
    SampleCloud cloud;
    cloud.k = k;
    cloud.x0_grid = grid_of(x0, grid.x_per_axis, tol);
    cloud.u_grid = grid_of(u, grid.u_per_axis, tol);
    const double count = static_cast<double>(cloud.x0_grid.size()) *
                         std::pow(static_cast<double>(cloud.u_grid.size()), static_cast<double>(k));
    if (count > static_cast<double>(grid.max_trajectories)) {
        throw SizeLimitError("nl_reach_samples: " + std::to_string(static_cast<long long>(count)) +
                             " trajectories exceed the cap of " + std::to_string(grid.max_trajectories) +
                             "; use a coarser grid");
    }
    const std::size_t per_x0 = static_cast<std::size_t>(std::llround(std::pow(cloud.u_grid.size(), k)));
    const std::size_t total = cloud.x0_grid.size() * per_x0;
    cloud.points.resize(total);
    cloud.provenance.resize(total);
    const int nu = static_cast<int>(cloud.u_grid.size());

    auto run = [&](std::size_t first, std::size_t last) {
        for (std::size_t t = first; t < last; ++t) {
            SampleProvenance pr;
            pr.x0 = static_cast<int>(t / per_x0);
            std::size_t rest = t % per_x0;
            pr.controls.assign(static_cast<std::size_t>(k), 0);
            for (int j = k - 1; j >= 0; --j) {
                pr.controls[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(nu));
                rest /= static_cast<std::size_t>(nu);
            }
            Vec x = cloud.x0_grid[static_cast<std::size_t>(pr.x0)];
            for (int j : pr.controls) {
                x = sys.step(x, cloud.u_grid[static_cast<std::size_t>(j)]);
            }
            Vec y = sys.output(x);
            if (!y.allFinite()) {
                throw NumericalError("nl_reach_samples: non-finite output for run " + std::to_string(t));
            }
            cloud.points[t] = std::move(y);
            cloud.provenance[t] = std::move(pr);
        }
    };
    const int workers = std::max(1, std::min<int>(grid.threads, static_cast<int>(total / 256) + 1));
    if (workers == 1) {
        run(0, total);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        const std::size_t chunk = (total + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    run(std::min(total, w * chunk), std::min(total, (w + 1) * chunk));
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    return cloud;
}

NlFalsifyResult nl_falsify(const NlSystem& sys, const VPolytope& xs, const VPolytope& xns, const VPolytope& u, int k,
                           double delta, const GridSpec& secret_grid) {
    return nl_falsify(sys, xs, xns, u, k, delta, secret_grid, secret_grid);
}

NlFalsifyResult nl_falsify(const NlSystem& sys, const VPolytope& xs, const VPolytope& xns, const VPolytope& u, int k,
                           double delta, const GridSpec& secret_grid, const GridSpec& nonsecret_grid) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("nl_falsify: delta must be finite and > 0");
    }
    const SampleCloud s = nl_reach_samples(sys, xs, u, k, secret_grid);
    const SampleCloud ns = nl_reach_samples(sys, xns, u, k, nonsecret_grid);
    const KdTree tree(ns.points);

    NlFalsifyResult res;
    res.secret_points = s.points.size();
    res.nonsecret_points = ns.points.size();
    for (std::size_t i = 0; i < ns.points.size(); ++i) {
        const auto [j, d] = tree.nearest(ns.points[i], static_cast<int>(i));
        if (j >= 0) {
            res.dispersion = std::max(res.dispersion, d);
        }
    }

    res.verdict = Verdict{Status::unknown, Mode::strong, k, std::nullopt, {}, ""};
    std::size_t worst = 0;
    double worst_d = -1.0;
    int worst_j = -1;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const auto [j, d] = tree.nearest(s.points[i]);
        if (d > worst_d) {
            worst_d = d;
            worst = i;
            worst_j = j;
        }
    }
    if (worst_d > delta) {
        res.verdict.status = Status::fails;
        res.verdict.witness = Witness{s.points[worst], worst_d, ns.points[static_cast<std::size_t>(worst_j)],
                                      s.trace(worst), ns.trace(static_cast<std::size_t>(worst_j)), std::nullopt};
        res.verdict.note = "secret sample " + std::to_string(worst_d) + " from every nonsecret sample (delta " +
                           std::to_string(delta) + ")";
    } else {
        res.verdict.note = "no secret sample farther than delta " + std::to_string(delta) +
                           "; nonsecret dispersion " + std::to_string(res.dispersion);
    }
    return res;
}

} // namespace opaque
