#include "doctest.h"
#include "oracles.hpp"

#include "opaque/error.hpp"
#include "opaque/opacity.hpp"
#include "opaque/outputctrl.hpp"

#include <Eigen/LU>

using namespace opaque;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v;
}

LtiSystem atm() {
    Mat a(2, 2), b(2, 1), c(1, 2);
    a << 1, 1, 0, 1;
    b << 0.5, 1;
    c << 1, 0;
    return LtiSystem(a, b, c);
}

LtiSystem scalar() { return LtiSystem(Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1)); }

int rank(const Mat& m) {
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

// Output-controllable from x0 at k iff -CA^k x0 is in range(M).
bool rank_oracle(const LtiSystem& sys, const Vec& x0, int k) {
    const Mat m = sys.output_control_matrix(k);
    Mat aug(m.rows(), m.cols() + 1);
    aug << m, sys.C() * matrix_power(sys.A(), k) * x0;
    return rank(aug) == rank(m);
}

} // namespace

TEST_CASE("is_output_controllable examples") {
    SUBCASE("origin: zero controls") {
        auto w = is_output_controllable(atm(), Vec::Zero(2), 3);
        REQUIRE(w);
        CHECK(w->controls.size() == 3);
        for (const auto& u : w->controls) {
            CHECK(u.norm() == 0.0);
        }
        CHECK(w->residual == 0.0);
    }
    SUBCASE("ATM from (1,0) in two steps") {
        // p(2) = 1 + 1.5 a(0) + 0.5 a(1); minimum norm solution is (-0.6, -0.2).
        auto w = is_output_controllable(atm(), vec({1, 0}), 2);
        REQUIRE(w);
        const double a0 = w->controls[0](0), a1 = w->controls[1](0);
        CHECK(1 + 1.5 * a0 + 0.5 * a1 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(a0 == doctest::Approx(-0.6));
        CHECK(a1 == doctest::Approx(-0.2));
        CHECK(w->residual <= 1e-12);
        // Any exact solution is a valid witness too.
        CHECK(simulate(atm(), vec({1, 0}), Points{vec({-1}), vec({1})}).outputs.back().norm() < 1e-12);
    }
    SUBCASE("target outside the range of the output control matrix") {
        LtiSystem sys(Mat::Identity(2, 2), vec({1, 0}), Mat::Identity(2, 2));
        CHECK_FALSE(rank_oracle(sys, vec({0, 1}), 2));
        CHECK_FALSE(is_output_controllable(sys, vec({0, 1}), 2));
        CHECK(is_output_controllable(sys, vec({3, 0}), 2));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(is_output_controllable(atm(), Vec::Zero(2), 0), InvalidArgument);
        CHECK_THROWS_AS(is_output_controllable(atm(), Vec::Zero(3), 1), DimensionError);
    }
}

TEST_CASE("is_output_controllable agrees with the rank oracle") {
    oracle::Rng rng(41);
    int with = 0, without = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = rng.integer(1, 4), m = rng.integer(1, 2), p = rng.integer(1, 3), k = rng.integer(1, 3);
        LtiSystem sys(rng.int_mat(n, n, -1, 1), rng.int_mat(n, m, -1, 1), rng.int_mat(p, n, -2, 2));
        const Vec x0 = rng.int_mat(n, 1, -3, 3).col(0);
        const bool expected = rank_oracle(sys, x0, k);
        auto w = is_output_controllable(sys, x0, k);
        INFO("trial " << trial);
        CHECK(w.has_value() == expected);
        if (w) {
            ++with;
            // Least-squares residual matches the simulated one.
            Vec stacked(k * m);
            for (int j = 0; j < k; ++j) {
                stacked.segment(j * m, m) = w->controls[static_cast<std::size_t>(j)];
            }
            const double ls = (sys.output_control_matrix(k) * stacked + sys.C() * matrix_power(sys.A(), k) * x0).norm();
            CHECK(std::abs(ls - w->residual) <= 1e-12);
        } else {
            ++without;
        }
    }
    CHECK(with > 50);
    CHECK(without > 20);
}

TEST_CASE("constrained output controllability") {
    const InputSet small(VPolytope::box(vec({-1}), vec({1})));
    // 1-D integrator from 5: needs a total push of -5 over k steps.
    CHECK_FALSE(is_output_controllable(scalar(), vec({5}), 2, small));
    auto w = is_output_controllable(scalar(), vec({5}), 5, small);
    REQUIRE(w);
    for (const auto& u : w->controls) {
        CHECK(std::abs(u(0)) <= 1 + 1e-9);
    }
    CHECK(w->residual <= 1e-9);
    CHECK(is_output_controllable(scalar(), vec({5}), 2, InputSet::unbounded(1)));

    const InputSet d = difference_set(InputSet(VPolytope::box(vec({0}), vec({1}))));
    CHECK(d.polytope().lower_bound()(0) == doctest::Approx(-1.0));
    CHECK(d.polytope().upper_bound()(0) == doctest::Approx(1.0));
    const InputSet dz = difference_set(InputSet(Zonotope(vec({4}), Mat::Constant(1, 1, 0.5))));
    CHECK(dz.zonotope().center()(0) == 0.0);
    CHECK(dz.zonotope().radius()(0) == doctest::Approx(1.0));
    CHECK(difference_set(InputSet::unbounded(2)).kind() == InputSet::Kind::unbounded);
}

TEST_CASE("oc_witness_from_opacity") {
    const LtiSystem toy(Mat::Identity(3, 3), Mat::Ones(3, 1), Mat::Ones(1, 3));
    SUBCASE("identical runs") {
        const Trace t{vec({1, 2, 3}), Points{vec({0.3}), vec({0.1})}};
        OcWitness w = oc_witness_from_opacity(toy, t, t);
        CHECK(w.x0.norm() == 0.0);
        for (const auto& u : w.controls) {
            CHECK(u.norm() == 0.0);
        }
        CHECK(w.residual == 0.0);
    }
    SUBCASE("toy system, two steps") {
        const Trace s{vec({1, 0, 0}), Points{vec({1}), vec({0})}};
        const Trace ns{vec({0, 1, 0}), Points{vec({0.5}), vec({0.5})}};
        OcWitness w = oc_witness_from_opacity(toy, s, ns);
        CHECK((w.x0 - vec({1, -1, 0})).norm() == 0.0);
        CHECK(w.controls[0](0) == doctest::Approx(0.5));
        CHECK(w.controls[1](0) == doctest::Approx(-0.5));
        CHECK(w.residual <= 1e-12);
    }
    SUBCASE("runs that do not match") {
        const Trace s{vec({1, 0, 0}), Points{vec({1}), vec({1})}};
        const Trace ns{vec({0, 1, 0}), Points{vec({0}), vec({0})}};
        CHECK_THROWS_AS(oc_witness_from_opacity(toy, s, ns), InvalidArgument);
        const Trace shorter{vec({0, 1, 0}), Points{vec({2})}};
        CHECK_THROWS_AS(oc_witness_from_opacity(toy, s, shorter), InvalidArgument);
    }
}

TEST_CASE("every certificate of a HOLDS verdict is an output-controllability witness") {
    oracle::Rng rng(9);
    int certs = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Verdict v = check_strong_k_iso(b.scenario(), b.k);
        if (!v.holds()) {
            continue;
        }
        for (const auto& c : v.certificates) {
            const OcWitness w = oc_witness_from_opacity(b.sys, c);
            CHECK(w.residual <= 10 * Tolerances{}.geom_eps);
            ++certs;
        }
    }
    CHECK(certs > 100);
}

TEST_CASE("synth_opaque_pair") {
    SUBCASE("X_oc = {0}: X1 = X2") {
        const VPolytope x2 = VPolytope::box(vec({0, 0}), vec({1, 2}));
        auto w = is_output_controllable(atm(), Vec::Zero(2), 2);
        SynthPair sp = synth_opaque_pair(atm(), VPolytope::singleton(Vec::Zero(2)), {*w}, x2, 2);
        CHECK(oracle::hulls_equal(sp.secret.vertices(), x2.vertices()));
        CHECK(sp.verdict.holds());
    }
    SUBCASE("1-D: X_oc = {-2}, X2 = {5}") {
        const OcWitness w{vec({-2}), Points{vec({2})}, 0.0};
        SynthPair sp = synth_opaque_pair(scalar(), VPolytope::singleton(vec({-2})), {w}, VPolytope::singleton(vec({5})), 1);
        REQUIRE(sp.secret.size() == 1);
        CHECK(sp.secret.vertex(0)(0) == doctest::Approx(3.0));
        CHECK(sp.verdict.holds());
        // y1(1) = 3 + u matches y2(1) = 5 + (u - 2).
        for (double u : {-1.0, 0.0, 4.5}) {
            CHECK(simulate(scalar(), vec({3}), Points{vec({u})}).outputs.back()(0) ==
                  doctest::Approx(simulate(scalar(), vec({5}), Points{vec({u - 2})}).outputs.back()(0)));
        }
        // With a shared bounded input set the pair is not opaque: {3} + [0,1] ⊄ {5} + [0,1].
        SynthPair bounded = synth_opaque_pair(scalar(), VPolytope::singleton(vec({-2})), {w},
                                              VPolytope::singleton(vec({5})), 1,
                                              InputSet(VPolytope::box(vec({0}), vec({1}))));
        CHECK(bounded.verdict.fails());
    }
    SUBCASE("missing or wrong witnesses") {
        const VPolytope xoc(Points{vec({-2}), vec({1})});
        const OcWitness w{vec({-2}), Points{vec({2})}, 0.0};
        CHECK_THROWS_AS(synth_opaque_pair(scalar(), xoc, {w}, VPolytope::singleton(vec({5})), 1), InvalidArgument);
        const OcWitness bad{vec({1}), Points{vec({0})}, 0.0};
        CHECK_THROWS_AS(synth_opaque_pair(scalar(), xoc, {w, bad}, VPolytope::singleton(vec({5})), 1), InvalidArgument);
        CHECK_THROWS_AS(synth_opaque_pair(scalar(), VPolytope::singleton(vec({-2})), {w}, VPolytope::singleton(vec({5})), 2),
                        InvalidArgument);
    }
    SUBCASE("random instances hold with unconstrained inputs") {
        oracle::Rng rng(19);
        int built = 0;
        for (int trial = 0; trial < 150; ++trial) {
            const int n = rng.integer(1, 3), m = rng.integer(1, 2), p = rng.integer(1, 2), k = rng.integer(1, 3);
            LtiSystem sys(rng.mat(n, n, -1, 1), rng.mat(n, m, -1, 1), rng.mat(p, n, -1, 1));
            Points oc;
            std::vector<OcWitness> ws;
            for (const auto& x : rng.points(rng.integer(1, 4), n, -2, 2)) {
                if (auto w = is_output_controllable(sys, x, k)) {
                    oc.push_back(x);
                    ws.push_back(*w);
                }
            }
            if (oc.empty()) {
                continue;
            }
            SynthPair sp = synth_opaque_pair(sys, VPolytope(oc), ws, VPolytope(rng.points(rng.integer(1, 4), n, -3, 3)), k);
            INFO("trial " << trial);
            CHECK(sp.verdict.holds());
            ++built;
        }
        CHECK(built >= 100);
    }
}
