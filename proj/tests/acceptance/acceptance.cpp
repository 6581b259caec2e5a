// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails. `acceptance 3 5` runs a subset.
#include "oracles.hpp"

#include "opaque/approx.hpp"
#include "opaque/decentralized.hpp"
#include "opaque/epsilon.hpp"
#include "opaque/gjk.hpp"
#include "opaque/nonlinear.hpp"
#include "opaque/opacity.hpp"
#include "opaque/outputctrl.hpp"
#include "opaque/set_algebra.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace opaque;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[" << what << "] ";
        }
    }
};

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LtiSystem atm() {
    Mat a(2, 2), b(2, 1), c(1, 2);
    a << 1, 1, 0, 1;
    b << 0.5, 1;
    c << 1, 0;
    return LtiSystem(a, b, c);
}

Scenario toy() {
    return Scenario{LtiSystem(Mat::Identity(3, 3), Mat::Ones(3, 1), Mat::Ones(1, 3)),
                    VPolytope(Points{vec({1, 0, 0}), vec({0, 0, 1})}), VPolytope::singleton(vec({0, 1, 0})),
                    InputSet(VPolytope::box(vec({0}), vec({1}))), {1, 2, 3}, {}};
}

AdversaryEnsemble random_ensemble(oracle::Rng& rng, int n, int l) {
    AdversaryEnsemble ens;
    for (int i = 0; i < l; ++i) {
        ens.maps.push_back(rng.int_mat(rng.integer(1, 2), n, -2, 2));
    }
    return ens;
}

void criterion1(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = toy();
    for (int k : {1, 2, 3}) {
        o.require(check_strong_k_iso(sc, k).holds(), "strong HOLDS at k=" + std::to_string(k));
    }
    const ReachSet ys = output_set(sc.sys, reach_exact(sc.sys, sc.secret, sc.inputs, 2));
    const VPolytope y = ys.polytope();
    o.require(std::abs(y.lower_bound()(0) - 1) <= 1e-9 && std::abs(y.upper_bound()(0) - 7) <= 1e-9,
              "CX_s(2) = [1,7]");
    const double t = seconds_since(t0);
    o.require(t < 1.0, "runtime < 1 s");
    o.detail << "CX_s(2) = [" << y.lower_bound()(0) << ", " << y.upper_bound()(0) << "], " << t << " s";
}

void criterion2(Outcome& o) {
    Scenario far{atm(), VPolytope::singleton(vec({0, 1})), VPolytope::singleton(vec({10, 1})), InputSet::zero(1), {3}, {}};
    o.require(check_strong_k_iso(far, 3).fails(), "strong FAILS");
    o.require(check_weak_k_iso(far, 3).fails(), "weak FAILS");
    const double r = opacity_radius(far, 3).radius;
    o.require(std::abs(r - 10) <= 1e-9, "radius 10");
    // p(3) = p(0) + 3 v(0) + 2.5 a0 + 1.5 a1 + 0.5 a2; the two position ranges
    // meet once 2 * 4.5 * a covers the gap of 10.
    const double a = 1.25 * 10.0 / (2 * 4.5);
    Scenario overlap = far;
    overlap.inputs = InputSet(VPolytope::box(vec({-a}), vec({a})));
    o.require(check_weak_k_iso(overlap, 3).holds(), "weak HOLDS with a = " + std::to_string(a));
    o.detail << "radius " << r << ", overlap at a = " << a;
}

void criterion3(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    oracle::Rng rng(1003);
    int strong_cmp = 0, weak_cmp = 0, disagree = 0;
    CheckOptions opts;
    opts.certificates = false;
    const int total = 500;
    for (int trial = 0; trial < total; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Scenario sc = b.scenario();
        const oracle::GridOracleResult g = oracle::grid_oracle(b, 10 * sc.tol.geom_eps);
        if (g.strong != oracle::OracleVerdict::undecided) {
            ++strong_cmp;
            disagree += check_strong_k_iso(sc, b.k, opts).holds() != (g.strong == oracle::OracleVerdict::holds);
        }
        if (g.weak != oracle::OracleVerdict::undecided) {
            ++weak_cmp;
            disagree += check_weak_k_iso(sc, b.k, opts).holds() != (g.weak == oracle::OracleVerdict::holds);
        }
    }
    const double t = seconds_since(t0);
    o.require(disagree == 0, "zero disagreements");
    o.require(strong_cmp > 0 && weak_cmp > 0, "some instances decided");
    o.require(t < 300, "runtime < 5 min");
    o.detail << total << " scenarios, " << strong_cmp << " strong and " << weak_cmp << " weak compared, " << disagree
             << " disagreements, " << t << " s";
}

void criterion4(Outcome& o) {
    oracle::Rng rng(1004);
    int mismatches = 0, holds = 0;
    const int total = 400;
    for (int trial = 0; trial < total; ++trial) {
        const Scenario sc = trial % 2 ? oracle::random_box_scenario(rng).scenario() : [&] {
            const int n = rng.integer(1, 3), m = rng.integer(1, 2), p = rng.integer(1, 3);
            LtiSystem sys(rng.mat(n, n, -1, 1), rng.mat(n, m, -1, 1), rng.mat(p, n, -1, 1));
            return Scenario{sys, VPolytope(rng.points(rng.integer(1, 3), n, -1, 1)),
                            VPolytope(rng.points(rng.integer(1, 5), n, -2, 2)),
                            InputSet(VPolytope(rng.points(rng.integer(1, 3), m, -1, 1))), {rng.integer(1, 3)}, {}};
        }();
        const int k = sc.schedule.front();
        const Verdict s = check_strong_k_iso(sc, k);
        holds += s.holds();
        mismatches += check_pre0_conditions(sc, k).both() != s.holds();
    }
    o.require(mismatches == 0, "zero mismatches");
    o.detail << total << " scenarios (" << holds << " HOLDS), " << mismatches << " mismatches";
}

void criterion5(Outcome& o) {
    oracle::Rng rng(1005);
    const Tolerances tol;
    int conflicts = 0, decided = 0;
    const int total = 500;
    const std::vector<int> orders{1, 2, 3};
    for (int trial = 0; trial < total; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Scenario sc = b.scenario();
        const Status exact = check_strong_k_iso(sc, b.k).status;
        for (int order : orders) {
            const Status s = verify_sound(sc, b.k, order).status;
            if (s != Status::unknown) {
                ++decided;
                conflicts += s != exact;
            }
        }
    }
    // Sandwich: 10^3 samples of the exact set inside over, 10^3 samples of under inside exact.
    int violations = 0, sets = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = rng.integer(1, 3), m = rng.integer(1, 2);
        LtiSystem sys(rng.mat(n, n, -1.1, 1.1), rng.mat(n, m, -1, 1), Mat::Identity(n, n));
        const VPolytope x0(rng.points(rng.integer(1, 6), n, -1, 1));
        const InputSet u(VPolytope(rng.points(rng.integer(1, 4), m, -1, 1)));
        const int k = rng.integer(1, 3);
        const VPolytope exact = reach_exact(sys, x0, u, k).polytope();
        for (int order : orders) {
            const ApproxPair ap = approx_reach(sys, x0, u, k, order);
            ++sets;
            for (int i = 0; i < 1000; ++i) {
                violations += !ap.over.zonotope().contains(rng.sample_hull(exact.vertices()), tol);
                const Zonotope& z = ap.under.zonotope();
                Vec xi(z.num_generators());
                for (int j = 0; j < xi.size(); ++j) {
                    xi(j) = rng.uniform(-1, 1);
                }
                violations += point_distance(z.center() + z.generators() * xi, exact, tol).distance > tol.geom_eps;
            }
        }
    }
    o.require(conflicts == 0, "no HOLDS-vs-FAILS conflicts");
    o.require(violations == 0, "sandwich");
    o.detail << total << " scenarios x " << orders.size() << " orders, " << decided << " decided, " << conflicts
             << " conflicts; sandwich " << sets << " set pairs x 1000 samples each side, " << violations
             << " violations";
}

void criterion6(Outcome& o) {
    oracle::Rng rng(1006);
    std::vector<AlgebraFamily> fams;
    for (int i = 0; i < 200; ++i) {
        const int n = rng.integer(1, 3);
        LtiSystem sys(rng.mat(n, n, -1, 1), rng.mat(n, 1, -1, 1), rng.mat(rng.integer(1, 2), n, -1, 1));
        const Vec c = rng.vec(n, -1, 1);
        auto around = [&](double r) {
            Points p = rng.points(3, n, -r, r);
            for (auto& x : p) {
                x += c + rng.vec(n, -0.5 * r, 0.5 * r);
            }
            return VPolytope(p);
        };
        fams.push_back(AlgebraFamily{sys, InputSet(VPolytope::box(vec({-0.5}), vec({0.5}))), rng.integer(1, 2),
                                     {around(0.5), around(0.5)}, {around(1.5), around(1.5)}});
    }
    for (auto f : {strict_inclusion_fixture(), empty_nonsecret_intersection_fixture(),
                   empty_secret_intersection_fixture(), union_nonsecret_converse_fixture(),
                   weak_union_converse_fixture()}) {
        fams.push_back(f);
    }
    const AlgebraReport rep = set_algebra_suite(fams);
    // Criterion wording: lemmas 1-2 and theorems 3, 4, 10 both ways; the rest as implications.
    const std::set<std::string> two_way{"lemma1", "lemma2", "theorem3", "theorem4", "theorem10"};
    for (const auto& l : rep.laws) {
        const bool need_converse = two_way.count(l.law) > 0;
        const bool ok = l.forward_violations == 0 && (!need_converse || l.converse_violations == 0);
        o.require(ok, l.law + (need_converse ? " both ways" : " forward"));
        o.detail << l.law << " " << l.cases << "/" << l.skipped << "/" << l.forward_violations << "/"
                 << l.converse_violations << "/" << l.strict << "; ";
    }
    const AlgebraReport strict = set_algebra_suite({strict_inclusion_fixture()});
    const AlgebraReport ns = set_algebra_suite({empty_nonsecret_intersection_fixture()});
    const AlgebraReport ss = set_algebra_suite({empty_secret_intersection_fixture()});
    o.require(strict.law("lemma5").skipped == 1 && ns.law("theorem9").strict == 1 && ss.law("theorem8").skipped == 1,
              "remark fixtures exhibited");
    o.detail << "(cases/skipped/forward/converse/strict over " << fams.size() << " families)";
}

void criterion7(Outcome& o) {
    oracle::Rng rng(1007);
    const double bound = 10 * Tolerances{}.geom_eps;
    int certs = 0, bad = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Verdict v = check_strong_k_iso(b.scenario(), b.k);
        if (!v.holds()) {
            continue;
        }
        for (const auto& c : v.certificates) {
            bad += oc_witness_from_opacity(b.sys, c).residual > bound;
            ++certs;
        }
    }
    int built = 0, holds = 0;
    for (int trial = 0; trial < 400 && built < 150; ++trial) {
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
        const SynthPair sp =
            synth_opaque_pair(sys, VPolytope(oc), ws, VPolytope(rng.points(rng.integer(1, 4), n, -3, 3)), k);
        ++built;
        Scenario sc{sys, sp.secret, sp.nonsecret, InputSet::unbounded(m), {k}, {}};
        holds += check_strong_k_iso(sc, k).holds();
    }
    o.require(bad == 0 && certs > 0, "certificate residuals");
    o.require(built >= 100 && holds == built, "synthesized pairs HOLD");
    o.detail << certs << " certificates, " << bad << " over " << bound << "; " << holds << "/" << built
             << " synthesized pairs HOLD";
}

void criterion8(Outcome& o) {
    oracle::Rng rng(1008);
    int decomposition = 0, implication = 0, degeneracy = 0, domination = 0, slow = 0, dominated = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Scenario sc = b.scenario();
        const int l = rng.integer(1, 4);
        const AdversaryEnsemble ens = random_ensemble(rng, sc.sys.n(), l);
        const DecentralizedReport rep = check_decentralized(sc, ens, b.k);
        bool all = true;
        for (const auto& c : ens.maps) {
            all = all && check_strong_k_iso(Scenario{sc.sys.with_output(c), sc.secret, sc.nonsecret, sc.inputs,
                                                     sc.schedule, sc.tol},
                                            b.k)
                             .holds();
        }
        decomposition += rep.aggregate.holds() != all;
        implication += check_aggregated(sc, ens, b.k).holds() && !rep.aggregate.holds();
        degeneracy += check_co_opacity(sc, AdversaryEnsemble{{sc.sys.C()}, {}}, CoordinatorRule{}, b.k).status !=
                      check_strong_k_iso(sc, b.k).status;

        CommGraph g{l, {}};
        for (int a = 0; a < l; ++a) {
            for (int c = 0; c < l; ++c) {
                if (rng.integer(0, 2) == 0) {
                    g.edges.emplace_back(a, c);
                }
            }
        }
        const CollusionResult res = simulate_collusion(sc, ens, g, b.k);
        slow += res.rounds_to_fixpoint() > l;
        std::vector<int> initial;
        for (int i = 0; i < l; ++i) {
            if (res.rounds.front()[static_cast<std::size_t>(i)]) {
                initial.push_back(i);
            }
        }
        if (is_directed_dominating(g, initial)) {
            ++dominated;
            domination += !res.aggregate.fails();
        }
    }
    const AggregationCounterexample cx = aggregation_converse_fixture();
    const bool stored = check_decentralized(cx.scenario, cx.ensemble, cx.k).aggregate.holds() &&
                        check_aggregated(cx.scenario, cx.ensemble, cx.k).fails();
    o.require(decomposition == 0, "decomposition");
    o.require(implication == 0, "aggregated => decentralized");
    o.require(stored, "stored non-converse counterexample");
    o.require(degeneracy == 0, "co-opacity l = 1");
    o.require(domination == 0 && dominated > 0, "dominating set");
    o.require(slow == 0, "fixpoint within l rounds");
    o.detail << "200 pairs: " << decomposition << " decomposition, " << implication << " implication, " << degeneracy
             << " degeneracy, " << domination << "/" << dominated << " dominating, " << slow
             << " slow-fixpoint violations";
}

void criterion9(Outcome& o) {
    oracle::Rng rng(1009);
    double worst = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int m = rng.integer(1, 2), p = rng.integer(1, 2);
        LtiSystem sys(rng.mat(2, 2, -1.2, 1.2), rng.mat(2, m, -1, 1), rng.mat(p, 2, -1, 1));
        Points s = rng.points(rng.integer(1, 4), 2, -1, 1);
        const Vec shift = rng.vec(2, -2, 2);
        for (auto& x : s) {
            x += shift;
        }
        const Scenario sc{sys, VPolytope(s), VPolytope(rng.points(rng.integer(1, 4), 2, -1, 1)),
                          InputSet(VPolytope(rng.points(rng.integer(1, 3), m, -0.5, 0.5))), {rng.integer(1, 3)}, {}};
        const int k = sc.schedule.front();
        const OutputSets os = output_sets(sc, k);
        const double grid = oracle::grid_max_distance(os.secret.polytope(), os.nonsecret.polytope());
        worst = std::max(worst, std::abs(opacity_radius(sc, k).radius - grid));
    }
    o.require(worst <= 1e-4, "grid agreement");

    const double eps = Tolerances{}.geom_eps;
    int inconsistent = 0, non_monotone = 0, compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Scenario sc = b.scenario();
        const double r = opacity_radius(sc, b.k).radius;
        if (r <= 0 || r > 2 * eps) {
            ++compared;
            inconsistent += check_eps_k_iso(sc, b.k, 0.0).status != check_strong_k_iso(sc, b.k).status;
        }
        bool held = false;
        for (double e : {0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
            const bool h = check_eps_k_iso(sc, b.k, e).holds();
            non_monotone += held && !h;
            held = held || h;
        }
    }
    o.require(inconsistent == 0, "eps = 0 consistency");
    o.require(non_monotone == 0, "monotone in eps");
    o.detail << "grid max error " << worst << " over 60; eps=0 " << inconsistent << "/" << compared
             << " inconsistent; " << non_monotone << " monotonicity violations";
}

void criterion10(Outcome& o) {
    oracle::Rng rng(1010);
    int wrong = 0, fails = 0;
    const int total = 150;
    for (int trial = 0; trial < total; ++trial) {
        const oracle::BoxScenario b = oracle::random_box_scenario(rng);
        const Scenario sc = b.scenario();
        const double delta = oracle::covering_radius(b.sys, b.xns_lo, b.xns_hi, b.u_lo, b.u_hi, b.k, 3) + 1e-6;
        const NlFalsifyResult r = nl_falsify(NlSystem::linear(b.sys), sc.secret, sc.nonsecret,
                                             VPolytope::box(b.u_lo, b.u_hi), b.k, delta, GridSpec{3, 3, 100000, 1});
        if (r.verdict.fails()) {
            ++fails;
            wrong += !check_strong_k_iso(sc, b.k).fails();
        }
        wrong += r.verdict.holds();
    }
    const NlSystem sq = NlSystem::from_expressions(1, 1, {"x0 + 0 * u0"}, {"x0^2"});
    const VPolytope u = VPolytope::box(vec({0}), vec({0}));
    const NlFalsifyResult square =
        nl_falsify(sq, VPolytope::box(vec({2}), vec({3})), VPolytope::box(vec({0}), vec({1})), u, 1, 0.5);

    const NlSystem logistic = NlSystem::from_expressions(1, 1, {"3.7 * x0 * (1 - x0) + 0.01 * u0"}, {"x0"});
    const VPolytope x0 = VPolytope::box(vec({0.1}), vec({0.9})), uu = VPolytope::box(vec({-1}), vec({1}));
    const SampleCloud a = nl_reach_samples(logistic, x0, uu, 4, GridSpec{9, 5, 100000, 1});
    const SampleCloud c = nl_reach_samples(logistic, x0, uu, 4, GridSpec{9, 5, 100000, 4});
    bool same = a.points.size() == c.points.size();
    for (std::size_t i = 0; same && i < a.points.size(); ++i) {
        same = a.points[i](0) == c.points[i](0);
    }
    o.require(wrong == 0, "linear consistency");
    o.require(square.verdict.fails(), "x^2 fixture FAILS");
    o.require(same, "deterministic clouds");
    o.detail << total << " linear instances, " << fails << " FAILS, " << wrong << " inconsistent; x^2 distance "
             << (square.verdict.witness ? square.verdict.witness->distance : 0.0) << "; " << a.points.size()
             << " cloud points identical across thread counts";
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<void(Outcome&)>>> all{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (const auto& [id, fn] : all) {
        if (!only.empty() && !only.count(id)) {
            continue;
        }
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("criterion %2d: %s  (%.1f s) %s\n", id, o.pass ? "PASS" : "FAIL", seconds_since(t0),
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
