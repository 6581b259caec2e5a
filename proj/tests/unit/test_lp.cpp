#include "doctest.h"
#include "oracles.hpp"

#include "opaque/lp.hpp"

using namespace opaque;
using opaque::lp::LinearProgram;
using opaque::lp::Status;

TEST_CASE("simplex: textbook maximization") {
    // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
    LinearProgram p(2);
    p.cost << -3, -5;
    p.add_le(Vec::Unit(2, 0), 4);
    p.add_le(2 * Vec::Unit(2, 1), 12);
    Vec r(2);
    r << 3, 2;
    p.add_le(r, 18);
    auto res = lp::solve(p);
    REQUIRE(res.status == Status::optimal);
    CHECK(res.objective == doctest::Approx(-36));
    CHECK(res.x(0) == doctest::Approx(2));
    CHECK(res.x(1) == doctest::Approx(6));
}

TEST_CASE("simplex: infeasible and unbounded") {
    LinearProgram p(1);
    p.cost << 1;
    p.add_le(Vec::Constant(1, 1.0), -1.0); // x <= -1 with x >= 0
    CHECK(lp::solve(p).status == Status::infeasible);

    LinearProgram q(1);
    q.cost << -1;
    CHECK(lp::solve(q).status == Status::unbounded);
}

TEST_CASE("simplex: free variables and equalities") {
    LinearProgram p(2);
    p.free = {true, true};
    p.cost << 1, 1;
    Vec e(2);
    e << 1, -1;
    p.add_eq(e, -3);       // x - y = -3
    p.add_le(-Vec::Unit(2, 1), 1); // y >= -1
    auto res = lp::solve(p);
    REQUIRE(res.status == Status::optimal);
    CHECK(res.x(1) == doctest::Approx(-1));
    CHECK(res.x(0) == doctest::Approx(-4));
}

TEST_CASE("simplex: degenerate vertex does not cycle") {
    // Beale's cycling example.
    LinearProgram p(4);
    p.cost << -0.75, 150, -0.02, 6;
    Vec a(4), b(4), c(4);
    a << 0.25, -60, -0.04, 9;
    b << 0.5, -90, -0.02, 3;
    c << 0, 0, 1, 0;
    p.add_le(a, 0);
    p.add_le(b, 0);
    p.add_le(c, 1);
    auto res = lp::solve(p);
    REQUIRE(res.status == Status::optimal);
    CHECK(res.objective == doctest::Approx(-0.05));
}

TEST_CASE("lp_feasible_point: spec examples") {
    Mat n(2, 1);
    n << 1, -1;
    Vec h(2);
    h << 1, 0;
    auto x = lp_feasible_point(HPolytope(1, n, h));
    REQUIRE(x);
    CHECK((*x)(0) >= -1e-9);
    CHECK((*x)(0) <= 1 + 1e-9);

    h << 0, -1;
    CHECK_FALSE(lp_feasible_point(HPolytope(1, n, h)));
}

TEST_CASE("lp_feasible_point: construct-then-solve") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int d = rng.integer(1, 4);
        int m = rng.integer(1, 12);
        Vec x0 = rng.vec(d, -5, 5);
        Mat n = rng.mat(m, d, -1, 1);
        Vec h = n * x0 + rng.vec(m, 0.0, 2.0);
        HPolytope hp(d, n, h);
        auto x = lp_feasible_point(hp);
        REQUIRE(x);
        CHECK(hp.max_violation(*x) <= 1e-9);
    }
}

TEST_CASE("lp_feasible_in_hull: spec examples and grid agreement") {
    VPolytope sq = VPolytope::box(Vec::Zero(2), Vec::Ones(2));
    auto any = lp_feasible_in_hull(HPolytope::whole_space(2), sq);
    REQUIRE(any);
    CHECK(any->isApprox(sq.vertex(0)));

    Mat n(1, 2);
    n << 1, 0;
    CHECK_FALSE(lp_feasible_in_hull(HPolytope(2, n, Vec::Constant(1, -5)), sq));

    oracle::Rng rng(12);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Points v = rng.points(rng.integer(1, 5), 2, -2, 2);
        Mat hn = rng.mat(2, 2, -1, 1);
        Vec hh = rng.vec(2, -1, 1);
        HPolytope hp(2, hn, hh);
        // Grid over barycentric weights of conv(V).
        bool grid_hit = false;
        double best_violation = 1e300;
        const int steps = 40;
        for (std::size_t a = 0; a < v.size(); ++a) {
            for (std::size_t b = 0; b < v.size(); ++b) {
                for (std::size_t c = 0; c < v.size(); ++c) {
                    for (int i = 0; i <= steps; ++i) {
                        for (int j = 0; i + j <= steps; ++j) {
                            double s = double(i) / steps, t = double(j) / steps;
                            Vec x = (1 - s - t) * v[a] + s * v[b] + t * v[c];
                            double viol = hp.max_violation(x);
                            best_violation = std::min(best_violation, viol);
                            grid_hit = grid_hit || viol <= 0;
                        }
                    }
                }
            }
        }
        auto x = lp_feasible_in_hull(hp, VPolytope(v));
        if (grid_hit) {
            CHECK(x.has_value());
        }
        if (x) {
            CHECK(hp.max_violation(*x) <= 1e-9);
            CHECK(oracle::in_hull_lp(*x, v));
            // Coarse grid must come within its resolution.
            CHECK(best_violation <= 0.2);
        }
        agree += (grid_hit == x.has_value());
    }
    CHECK(agree >= 90);
}
