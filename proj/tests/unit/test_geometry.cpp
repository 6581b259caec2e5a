#include "doctest.h"
#include "oracles.hpp"

#include "opaque/error.hpp"
#include "opaque/gjk.hpp"
#include "opaque/hull.hpp"
#include "opaque/polytope.hpp"
#include "opaque/zonotope.hpp"

using namespace opaque;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}
VPolytope unit_square() { return VPolytope::box(Vec::Zero(2), Vec::Ones(2)); }

bool same_hull(const VPolytope& a, const VPolytope& b) {
    return hull_contains(a, b) && hull_contains(b, a);
}

} // namespace

TEST_CASE("VPolytope validation") {
    CHECK_THROWS_AS(VPolytope(Points{}), InvalidArgument);
    CHECK_THROWS_AS(VPolytope(Points{v1(0), v2(0, 0)}), DimensionError);
    CHECK_THROWS_AS(VPolytope(Points{v1(NAN)}), InvalidArgument);
    CHECK(VPolytope::box(v2(0, 1), v2(2, 1)).size() == 2);
}

TEST_CASE("minkowski_sum examples") {
    auto s = minkowski_sum(VPolytope::singleton(v1(0)), VPolytope(Points{v1(-1), v1(1)}));
    CHECK(same_hull(s, VPolytope(Points{v1(-1), v1(1)})));
    CHECK(s.size() == 2);

    auto sq = minkowski_sum(unit_square(), VPolytope::singleton(v2(0, 0)));
    CHECK(sq.size() == 4);
    CHECK(same_hull(sq, unit_square()));

    auto sum = minkowski_sum(VPolytope(Points{v2(0, 0), v2(1, 0)}), VPolytope(Points{v2(0, 0), v2(0, 1)}));
    for (const auto& p : {v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1), v2(0.5, 0.5)}) {
        CHECK(oracle::in_hull_lp(p, sum.vertices()));
    }
    CHECK_FALSE(oracle::in_hull_lp(v2(1.1, 0.5), sum.vertices()));

    CHECK_THROWS_AS(minkowski_sum(unit_square(), VPolytope::singleton(v1(0))), DimensionError);
}

TEST_CASE("linear_image examples") {
    Mat ones(1, 3);
    ones << 1, 1, 1;
    auto img = linear_image(ones, VPolytope(Points{v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)}));
    for (const auto& v : img.vertices()) {
        CHECK(v(0) == 1.0);
    }
    Mat c(1, 2);
    c << 1, 0;
    CHECK(linear_image(c, VPolytope::singleton(v2(2, 5))).vertex(0)(0) == 2.0);
    CHECK(same_hull(linear_image(Mat::Identity(2, 2), unit_square()), unit_square()));
    CHECK_THROWS_AS(linear_image(ones, unit_square()), DimensionError);
}

TEST_CASE("convex_hull_h examples") {
    auto seg = convex_hull_h(VPolytope(Points{v1(0), v1(4)}));
    CHECK(seg.rows() == 2);
    CHECK(seg.contains(v1(4), 1e-9));
    CHECK(seg.contains(v1(0), 1e-9));
    CHECK_FALSE(seg.contains(v1(4.1), 1e-9));

    auto sq = convex_hull_h(unit_square());
    CHECK(sq.rows() == 4);
    CHECK(sq.contains(v2(0.5, 0.5), 0));
    CHECK_FALSE(sq.contains(v2(1.5, 0.5), 1e-9));

    CHECK_THROWS_AS(convex_hull_h(VPolytope::box(Vec::Zero(4), Vec::Ones(4))), UnsupportedDimension);
}

TEST_CASE("convex_hull_h matches LP membership on disk samples") {
    oracle::Rng rng(21);
    Points pts;
    while (pts.size() < 20) {
        Vec p = rng.vec(2, -1, 1);
        if (p.norm() <= 1) {
            pts.push_back(p);
        }
    }
    auto h = convex_hull_h(VPolytope(pts));
    int disagreements = 0;
    for (int i = 0; i < 1000; ++i) {
        Vec q = rng.vec(2, -1.2, 1.2);
        bool lp_in = oracle::in_hull_lp(q, pts, 1e-9);
        double viol = h.max_violation(q);
        if (std::abs(viol) > 1e-9 && lp_in != (viol <= 0)) {
            ++disagreements;
        }
    }
    CHECK(disagreements == 0);
}

TEST_CASE("convex_hull_h in 3-D, flat and full-dimensional") {
    oracle::Rng rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        int flat = trial % 3; // 0: full, 1: planar, 2: collinear
        Points pts;
        for (int i = 0; i < 12; ++i) {
            Vec p = rng.vec(3, -1, 1);
            if (flat == 1) {
                p(2) = 0.5 * p(0) - p(1);
            } else if (flat == 2) {
                p = p(0) * v3(1, 2, -1);
            }
            pts.push_back(p);
        }
        auto h = convex_hull_h(VPolytope(pts));
        for (int i = 0; i < 300; ++i) {
            Vec q = (flat == 0) ? rng.vec(3, -1.3, 1.3) : rng.sample_hull(pts) + (i % 2 ? rng.vec(3, -0.3, 0.3) : Vec::Zero(3));
            double viol = h.max_violation(q);
            if (std::abs(viol) > 1e-8) {
                CHECK(oracle::in_hull_lp(q, pts, 1e-10) == (viol <= 0));
            }
        }
        for (const auto& p : pts) {
            CHECK(h.max_violation(p) <= 1e-9);
        }
    }
}

TEST_CASE("hull::compute extreme points") {
    Points pts{v2(0, 0), v2(2, 0), v2(1, 0), v2(2, 2), v2(0, 2), v2(1, 1)};
    auto h = hull::compute(pts, 1e-9, 0);
    CHECK(h.extreme == std::vector<int>{0, 1, 3, 4});
    CHECK(h.affine_dim == 2);

    Points cube = VPolytope::box(Vec::Zero(3), Vec::Ones(3)).vertices();
    cube.push_back(v3(0.5, 0.5, 0.5));
    cube.push_back(v3(0.5, 0.5, 1.0));
    auto hc = hull::compute(cube, 1e-9, 0);
    CHECK(hc.extreme.size() == 8);
    CHECK(hc.normals.rows() == 6);
}

TEST_CASE("gjk_distance examples") {
    CHECK(gjk_distance(VPolytope::singleton(v2(0, 0)), VPolytope::singleton(v2(3, 4))) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(gjk_distance(VPolytope::singleton(v2(0, 0)), VPolytope(Points{v2(1, -1), v2(1, 1)})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gjk_distance(unit_square(), translate(unit_square(), v2(1, 1))) == 0.0);
    CHECK_FALSE(hulls_intersect(translate(unit_square(), v2(-0.5, -0.5)), translate(unit_square(), v2(9.5, 9.5))));
    CHECK(hulls_intersect(unit_square(), translate(unit_square(), v2(1, 1))));
    CHECK(hulls_intersect(unit_square(), unit_square()));
}

TEST_CASE("gjk_distance against brute-force minimization, 3-D") {
    oracle::Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        Points a = rng.points(rng.integer(1, 5), 3, -1, 1);
        Points b = rng.points(rng.integer(1, 5), 3, -1, 1);
        Vec shift = rng.vec(3, -3, 3);
        for (auto& q : b) {
            q += shift;
        }
        double expected = oracle::set_distance(a, b);
        double got = gjk_distance(VPolytope(a), VPolytope(b));
        CHECK(std::abs(got - expected) <= 1e-6);
        CHECK(std::abs(got - gjk_distance(VPolytope(b), VPolytope(a))) <= 1e-10);
    }
}

TEST_CASE("gjk properties: symmetry, self distance, translation") {
    oracle::Rng rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        int d = rng.integer(1, 4);
        VPolytope p(rng.points(rng.integer(1, 6), d, -1, 1));
        VPolytope q(rng.points(rng.integer(1, 6), d, -1, 1));
        CHECK(gjk_distance(p, p) <= 1e-10);
        CHECK(std::abs(gjk_distance(p, q) - gjk_distance(q, p)) <= 1e-10);
        Vec s = rng.vec(d, -4, 4);
        Vec t = rng.vec(d, -4, 4);
        double base = gjk_distance(p, translate(q, s));
        // Common translation leaves the distance unchanged; a one-sided shift
        // moves it by at most the shift length.
        CHECK(std::abs(gjk_distance(translate(p, t), translate(q, s + t)) - base) <= 1e-9);
        CHECK(gjk_distance(p, translate(q, s + t)) <= base + t.norm() + 1e-9);
        CHECK(gjk_distance(p, translate(q, s + t)) >= base - t.norm() - 1e-9);
    }
}

TEST_CASE("hull_contains examples") {
    CHECK(hull_contains(VPolytope::singleton(v1(1)), VPolytope::singleton(v1(1))));
    CHECK(hull_contains(VPolytope(Points{v2(0, 0), v2(1, 1)}), unit_square()));
    auto c = containment(VPolytope::singleton(v2(1.5, 0)), unit_square());
    CHECK_FALSE(c.contained);
    CHECK(c.worst_distance == doctest::Approx(0.5));
    CHECK(c.worst_index == 0);
}

TEST_CASE("set algebra properties") {
    oracle::Rng rng(25);
    for (int trial = 0; trial < 60; ++trial) {
        int d = rng.integer(1, 3);
        VPolytope p(rng.points(rng.integer(1, 5), d, -1, 1));
        VPolytope q(rng.points(rng.integer(1, 5), d, -1, 1));
        VPolytope r(rng.points(rng.integer(1, 5), d, -1, 1));
        CHECK(same_hull(minkowski_sum(p, q), minkowski_sum(q, p)));
        CHECK(same_hull(minkowski_sum(minkowski_sum(p, q), r), minkowski_sum(p, minkowski_sum(q, r))));
        Mat m = rng.mat(rng.integer(1, 3), d, -2, 2);
        CHECK(same_hull(linear_image(m, minkowski_sum(p, q)), minkowski_sum(linear_image(m, p), linear_image(m, q))));

        // Containment chains.
        VPolytope big = minkowski_sum(p, VPolytope::box(Vec::Constant(d, -0.1), Vec::Constant(d, 0.1)));
        VPolytope bigger = minkowski_sum(big, q);
        VPolytope bigger_c = translate(bigger, -q.centroid());
        Tolerances wide;
        wide.geom_eps = 2e-9;
        if (hull_contains(p, big) && hull_contains(big, bigger_c)) {
            CHECK(hull_contains(p, bigger_c, wide));
        }
    }
}

TEST_CASE("enumerate_vertices and hull_intersection") {
    auto h = convex_hull_h(VPolytope::box(v2(-1, -1), v2(1, 1)));
    auto v = enumerate_vertices(h);
    REQUIRE(v);
    CHECK(v->size() == 4);
    CHECK(same_hull(*v, VPolytope::box(v2(-1, -1), v2(1, 1))));

    Mat n(1, 2);
    n << 1, 1;
    CHECK_FALSE(enumerate_vertices(HPolytope(2, n, Vec::Constant(1, 0))));
    Mat e(2, 1);
    e << 1, -1;
    Vec off(2);
    off << 0, -1;
    CHECK_THROWS_AS(enumerate_vertices(HPolytope(1, e, off)), InvalidArgument);

    auto cut = hull_intersection(VPolytope::box(v2(0, 0), v2(2, 2)), VPolytope::box(v2(1, 1), v2(3, 3)));
    REQUIRE(cut);
    CHECK(same_hull(*cut, VPolytope::box(v2(1, 1), v2(2, 2))));
    CHECK_FALSE(hull_intersection(unit_square(), translate(unit_square(), v2(3, 0))));

    auto touch = hull_intersection(unit_square(), translate(unit_square(), v2(1, 1)));
    REQUIRE(touch);
    CHECK(gjk_distance(*touch, VPolytope::singleton(v2(1, 1))) <= 1e-8);
}

TEST_CASE("zonotope calculus examples") {
    Zonotope z = Zonotope::box(v2(-1, -1), v2(1, 1));
    CHECK(zonotope_image(Mat::Identity(2, 2), z).center() == z.center());
    auto s = zonotope_sum(z, Zonotope::singleton(v2(0, 0)));
    CHECK(s.num_generators() == z.num_generators());

    Mat m(2, 2);
    m << 1, 1, 0, 1;
    auto img = zonotope_image(m, z);
    auto img_v = zonotope_to_vpolytope(img);
    oracle::Rng rng(26);
    Points exact_img;
    const VPolytope square = VPolytope::box(v2(-1, -1), v2(1, 1));
    for (const auto& v : square.vertices()) {
        exact_img.push_back(m * v);
    }
    for (int i = 0; i < 300; ++i) {
        Vec x = m * rng.vec(2, -1, 1);
        CHECK(img.contains(x));
        CHECK(oracle::in_hull_lp(x, img_v.vertices()));
    }
    for (const auto& v : img_v.vertices()) {
        CHECK(oracle::in_hull_lp(v, exact_img));
    }

    CHECK(zonotope_to_vpolytope(Zonotope::singleton(v1(3))).size() == 1);
    Mat g(1, 2);
    g << 0.5, 0.5;
    auto seg = zonotope_to_vpolytope(Zonotope(v1(1), g));
    CHECK(seg.size() == 2);
    CHECK(seg.lower_bound()(0) == doctest::Approx(0));
    CHECK(seg.upper_bound()(0) == doctest::Approx(2));
}

TEST_CASE("zonotope_to_vpolytope sampling agreement") {
    oracle::Rng rng(27);
    for (int trial = 0; trial < 40; ++trial) {
        int d = 2 + trial % 2;
        int g = rng.integer(1, 7);
        Zonotope z(rng.vec(d, -1, 1), rng.mat(d, g, -1, 1));
        auto v = zonotope_to_vpolytope(z);
        for (int i = 0; i < 100; ++i) {
            Vec x = z.center() + z.generators() * rng.vec(g, -1, 1);
            CHECK(oracle::in_hull_lp(x, v.vertices()));
        }
        for (const auto& p : v.vertices()) {
            CHECK(z.distance_to(p) <= 1e-8);
        }
    }
    Zonotope big(Vec::Zero(4), Mat::Ones(4, 13));
    CHECK_THROWS_AS(zonotope_to_vpolytope(big), SizeLimitError);
}

TEST_CASE("zonotope reductions sandwich") {
    oracle::Rng rng(28);
    Zonotope within(Vec::Zero(2), Mat::Identity(2, 2));
    CHECK(zonotope_reduce_over(within, 2).num_generators() == 2);
    CHECK(zonotope_reduce_under(within, 2).num_generators() == 2);
    for (int trial = 0; trial < 20; ++trial) {
        int d = rng.integer(1, 3);
        int g = rng.integer(d, 4 * d + 3);
        Zonotope z(rng.vec(d, -1, 1), rng.mat(d, g, -1, 1));
        int order = rng.integer(1, 3);
        auto over = zonotope_reduce_over(z, order);
        auto under = zonotope_reduce_under(z, order);
        CHECK(over.num_generators() <= std::max(order * d, g));
        for (int i = 0; i < 1000; ++i) {
            Vec zs = z.center() + z.generators() * rng.vec(g, -1, 1);
            CHECK(over.contains(zs));
            Vec us = under.center() + under.generators() * rng.vec(under.num_generators(), -1, 1);
            CHECK(z.contains(us));
        }
    }
}
