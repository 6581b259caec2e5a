// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "opaque/approx.hpp"
#include "opaque/decentralized.hpp"
#include "opaque/epsilon.hpp"
#include "opaque/error.hpp"
#include "opaque/nonlinear.hpp"
#include "opaque/opacity.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace opaque::cli {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs fn(0..count-1) on up to `threads` workers; results land in caller-owned slots.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    // Rethrow the error of the smallest index so failures are deterministic too.
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::vector<int> schedule_of(const ScenarioFile& file, const Options& opts) {
    if (opts.k) {
        if (*opts.k < 1) {
            throw InvalidArgument("--k must be >= 1");
        }
        return {*opts.k};
    }
    return file.schedule;
}

KReport from_verdict(const Verdict& v) {
    KReport r;
    r.k = v.k;
    r.status = v.status;
    r.note = v.note;
    r.witness = v.witness;
    r.certificates = static_cast<int>(v.certificates.size());
    return r;
}

const AdversaryEnsemble& need_adversaries(const ScenarioFile& file, const std::string& mode) {
    if (!file.adversaries) {
        throw InputError(file.name, 0, "/adversaries", "mode " + mode + " needs adversaries.C_list");
    }
    return *file.adversaries;
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

Report start(const ScenarioFile& file, const std::string& command, const std::string& mode) {
    Report r;
    r.command = command;
    r.mode = mode;
    // Reports name the file, not the path, so they do not depend on the working directory.
    const auto slash = file.name.find_last_of('/');
    r.scenario = slash == std::string::npos ? file.name : file.name.substr(slash + 1);
    r.warnings = file.warnings();
    return r;
}

void finish(Report& r) {
    std::vector<Status> parts;
    for (const auto& k : r.per_k) {
        parts.push_back(k.status);
    }
    r.status = combine(parts);
}

} // namespace

int threads_from_env() {
    if (const char* s = std::getenv("OPAQUE_REACH_THREADS")) {
        const int v = std::atoi(s);
        if (v > 0) {
            return v;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Report cmd_check(const ScenarioFile& file, const Options& opts) {
    const auto t0 = Clock::now();
    const std::string& mode = opts.mode;
    Report rep = start(file, "check", mode);
    const std::vector<int> ks = schedule_of(file, opts);
    std::vector<KReport> out(ks.size());
    std::vector<json> extra(ks.size());

    if (mode == "nonlinear") {
        if (!file.nonlinear) {
            throw InputError(file.name, 0, "/nonlinear", "mode nonlinear needs a nonlinear section");
        }
        const NonlinearSpec& nl = *file.nonlinear;
        const std::optional<double> delta = opts.delta ? opts.delta : nl.delta;
        if (!delta) {
            throw InputError(file.name, 0, "/nonlinear/delta", "mode nonlinear needs --delta or nonlinear.delta");
        }
        parallel_for(ks.size(), opts.threads, [&](std::size_t i) {
            const auto t = Clock::now();
            const NlFalsifyResult res = nl_falsify(nl.sys, file.secret, file.nonsecret, file.inputs.polytope(), ks[i],
                                                   *delta, nl.grid, nl.grid);
            out[i] = from_verdict(res.verdict);
            out[i].seconds = since(t);
            extra[i] = json{{"k", ks[i]},
                            {"dispersion", res.dispersion},
                            {"secret_samples", res.secret_points},
                            {"nonsecret_samples", res.nonsecret_points}};
        });
        rep.per_k = out;
        rep.extra["delta"] = *delta;
        rep.extra["nonlinear"] = extra;
        finish(rep);
        rep.seconds = since(t0);
        return rep;
    }

    const Scenario sc = file.scenario();
    std::function<void(std::size_t)> run;
    if (mode == "strong" || mode == "weak") {
        run = [&](std::size_t i) {
            out[i] = from_verdict(mode == "strong" ? check_strong_k_iso(sc, ks[i]) : check_weak_k_iso(sc, ks[i]));
        };
    } else if (mode == "eps") {
        const std::optional<double> eps = opts.eps ? opts.eps : file.epsilon;
        if (!eps) {
            throw InputError(file.name, 0, "/epsilon", "mode eps needs --eps or epsilon");
        }
        rep.extra["eps"] = *eps;
        run = [&, e = *eps](std::size_t i) {
            const EpsVerdict v = check_eps_k_iso(sc, ks[i], e);
            out[i] = from_verdict(v.as_verdict());
            out[i].radius = v.radius;
            out[i].exact = v.exact;
        };
    } else if (mode == "sound") {
        if (opts.order < 1) {
            throw InvalidArgument("--order must be >= 1");
        }
        rep.extra["order"] = opts.order;
        run = [&](std::size_t i) {
            out[i] = from_verdict(verify_sound(sc, ks[i], opts.order));
            out[i].predicted_cost = cost_model(sc.sys.n(), sc.sys.p(), ks[i], opts.order, opts.order);
        };
    } else if (mode == "decentralized") {
        const AdversaryEnsemble& ens = need_adversaries(file, mode);
        run = [&](std::size_t i) {
            const DecentralizedReport d = check_decentralized(sc, ens, ks[i]);
            out[i] = from_verdict(d.aggregate);
            for (const auto& v : d.per_adversary) {
                out[i].adversaries.push_back(v.status);
            }
        };
    } else if (mode == "co") {
        const AdversaryEnsemble& ens = need_adversaries(file, mode);
        CoordinatorRule rule = file.coordinator;
        rule.seed = opts.seed;
        run = [&, rule](std::size_t i) { out[i] = from_verdict(check_co_opacity(sc, ens, rule, ks[i])); };
    } else if (mode == "collusion") {
        const AdversaryEnsemble& ens = need_adversaries(file, mode);
        if (!file.graph) {
            throw InputError(file.name, 0, "/adversaries/graph", "mode collusion needs a communication graph");
        }
        run = [&](std::size_t i) {
            const CollusionResult c = simulate_collusion(sc, ens, *file.graph, ks[i]);
            out[i] = from_verdict(c.aggregate);
            for (bool non_opaque : c.final_status()) {
                out[i].adversaries.push_back(non_opaque ? Status::fails : Status::holds);
            }
            json rounds = json::array();
            for (const auto& r : c.rounds) {
                rounds.push_back(r);
            }
            extra[i] = json{{"k", ks[i]}, {"rounds", rounds}, {"map_used", c.map_used}};
        };
    } else {
        throw InvalidArgument("unknown mode '" + mode +
                              "' (strong, weak, eps, sound, decentralized, co, collusion, nonlinear)");
    }

    parallel_for(ks.size(), opts.threads, [&](std::size_t i) {
        const auto t = Clock::now();
        run(i);
        out[i].k = ks[i];
        out[i].seconds = since(t);
    });
    rep.per_k = out;
    if (mode == "collusion") {
        rep.extra["collusion"] = extra;
    }
    finish(rep);
    rep.seconds = since(t0);
    return rep;
}

Report cmd_radius(const ScenarioFile& file, const Options& opts) {
    const auto t0 = Clock::now();
    Report rep = start(file, "radius", "eps");
    const Scenario sc = file.scenario();
    const std::vector<int> ks = schedule_of(file, opts);
    const double eps = opts.eps ? *opts.eps : file.epsilon.value_or(0.0);
    rep.extra["eps"] = eps;
    std::vector<KReport> out(ks.size());
    parallel_for(ks.size(), opts.threads, [&](std::size_t i) {
        const auto t = Clock::now();
        const EpsVerdict v = check_eps_k_iso(sc, ks[i], eps);
        out[i].k = ks[i];
        out[i].status = v.status;
        out[i].radius = v.radius;
        out[i].exact = v.exact;
        out[i].witness = Witness{v.argmax_vertex, v.radius, v.nearest, std::nullopt, std::nullopt, std::nullopt};
        out[i].note = v.exact ? "exact" : "bound from an over-approximation";
        out[i].seconds = since(t);
    });
    rep.per_k = out;
    finish(rep);
    rep.seconds = since(t0);
    return rep;
}

PruneOutput cmd_prune(const ScenarioFile& file, const Options& opts) {
    const auto t0 = Clock::now();
    PruneOutput po{start(file, "prune", "strong"), std::nullopt};
    Report& rep = po.report;
    const Scenario sc = file.scenario();
    const int k = opts.k ? *opts.k : sc.schedule.front();
    if (k < 1) {
        throw InvalidArgument("--k must be >= 1");
    }
    KReport kr;
    kr.k = k;
    try {
        const PruneResult res = prune_secret(sc, k);
        json set{{"dim", res.set.dim()}, {"normals", json::array()}, {"offsets", json::array()}};
        for (int i = 0; i < res.set.rows(); ++i) {
            set["normals"].push_back(vec_json(res.set.normals().row(i).transpose()));
            set["offsets"].push_back(res.set.offsets()(i));
        }
        set["empty"] = res.empty;
        if (res.vertices) {
            json verts = json::array();
            for (const auto& v : res.vertices->vertices()) {
                verts.push_back(vec_json(v));
            }
            set["vertices"] = verts;
            json doc = file.document;
            doc["sets"]["secret"] = json{{"vertices", verts}};
            doc["schedule"] = json::array({k});
            po.scenario = doc;
        }
        rep.extra["pruned_secret"] = set;
        if (res.empty) {
            kr.status = Status::fails;
            kr.note = "no secret state keeps every run inside CX_ns(k)";
        } else {
            kr.status = Status::holds;
            kr.note = res.vertices ? "pruned secret has " + std::to_string(res.vertices->size()) + " vertices"
                                   : "pruned secret given as inequalities";
        }
    } catch (const UnsalvageableSecret& e) {
        kr.status = Status::fails;
        kr.note = e.what();
    }
    kr.seconds = since(t0);
    rep.per_k.push_back(kr);
    finish(rep);
    rep.seconds = since(t0);
    return po;
}

namespace {

struct P2 {
    double x, y;
    bool operator<(const P2& o) const { return x < o.x || (x == o.x && y < o.y); }
    bool operator==(const P2& o) const { return x == o.x && y == o.y; }
};

double cross(const P2& o, const P2& a, const P2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Andrew's monotone chain, counter-clockwise, collinear points dropped.
std::vector<P2> hull2d(std::vector<P2> p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) {
        return p;
    }
    std::vector<P2> h(2 * p.size());
    std::size_t n = 0;
    for (const auto& q : p) {
        while (n >= 2 && cross(h[n - 2], h[n - 1], q) <= 0) {
            --n;
        }
        h[n++] = q;
    }
    for (std::size_t i = p.size() - 1, lo = n + 1; i-- > 0;) {
        while (n >= lo && cross(h[n - 2], h[n - 1], p[i]) <= 0) {
            --n;
        }
        h[n++] = p[i];
    }
    h.resize(n - 1);
    return h;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    return s == "-0.000" ? "0.000" : s;
}

struct Canvas {
    static constexpr double width = 640, height = 480, margin = 48;
    double x0, x1, y0, y1;

    double sx(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
    double sy(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

void draw_shape(std::ostringstream& os, const Canvas& c, const std::vector<P2>& h, const std::string& cls) {
    if (h.size() == 1) {
        os << "  <circle class=\"" << cls << "\" cx=\"" << num(c.sx(h[0].x)) << "\" cy=\"" << num(c.sy(h[0].y))
           << "\" r=\"4\"/>\n";
    } else if (h.size() == 2) {
        os << "  <line class=\"" << cls << "\" x1=\"" << num(c.sx(h[0].x)) << "\" y1=\"" << num(c.sy(h[0].y))
           << "\" x2=\"" << num(c.sx(h[1].x)) << "\" y2=\"" << num(c.sy(h[1].y)) << "\"/>\n";
    } else {
        os << "  <polygon class=\"" << cls << "\" points=\"";
        for (std::size_t i = 0; i < h.size(); ++i) {
            os << (i ? " " : "") << num(c.sx(h[i].x)) << "," << num(c.sy(h[i].y));
        }
        os << "\"/>\n";
    }
}

} // namespace

PlotOutput cmd_plot(const ScenarioFile& file, const Options& opts) {
    const Scenario sc = file.scenario();
    const int k = opts.k ? *opts.k : sc.schedule.front();
    const int p = sc.sys.p();
    const bool bars = p == 1;
    if (opts.proj_x < 0 || opts.proj_x >= p || (!bars && (opts.proj_y < 0 || opts.proj_y >= p || opts.proj_y == opts.proj_x))) {
        throw InvalidArgument("--proj: need two distinct output axes in 0.." + std::to_string(p - 1));
    }
    const OutputSets os_ = output_sets(sc, k);
    const VPolytope ys = os_.secret.vertices(), yns = os_.nonsecret.vertices();

    PlotOutput out;
    std::ostringstream csv;
    csv << "set,vertex";
    for (int i = 0; i < p; ++i) {
        csv << ",y" << i;
    }
    csv << "\n";
    for (const auto& [name, set] : {std::pair<const char*, const VPolytope*>{"secret", &ys}, {"nonsecret", &yns}}) {
        for (std::size_t v = 0; v < set->size(); ++v) {
            csv << name << "," << v;
            for (int i = 0; i < p; ++i) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", set->vertex(v)(i));
                csv << "," << buf;
            }
            csv << "\n";
        }
    }
    out.csv = csv.str();

    std::optional<OpacityRadius> radius;
    if (opts.mode == "eps" || opts.eps) {
        radius = opacity_radius(sc, k);
    }

    auto project = [&](const VPolytope& set, int level) {
        std::vector<P2> pts;
        for (const auto& v : set.vertices()) {
            pts.push_back(bars ? P2{v(opts.proj_x), static_cast<double>(level)} : P2{v(opts.proj_x), v(opts.proj_y)});
        }
        return hull2d(pts);
    };
    const std::vector<P2> hs = project(ys, 1), hns = project(yns, 0);
    Canvas c{};
    c.x0 = c.y0 = std::numeric_limits<double>::infinity();
    c.x1 = c.y1 = -c.x0;
    for (const auto* h : {&hs, &hns}) {
        for (const auto& q : *h) {
            c.x0 = std::min(c.x0, q.x);
            c.x1 = std::max(c.x1, q.x);
            c.y0 = std::min(c.y0, q.y);
            c.y1 = std::max(c.y1, q.y);
        }
    }
    if (bars) {
        c.y0 = -1;
        c.y1 = 2;
    }
    const double padx = std::max(0.05 * (c.x1 - c.x0), 0.5), pady = std::max(0.05 * (c.y1 - c.y0), 0.5);
    c.x0 -= padx;
    c.x1 += padx;
    c.y0 -= pady;
    c.y1 += pady;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
        << "  <style>.secret{fill:#d62728;fill-opacity:0.35;stroke:#d62728;stroke-width:3}"
           ".nonsecret{fill:#1f77b4;fill-opacity:0.25;stroke:#1f77b4;stroke-width:3;stroke-dasharray:6 3}"
           ".radius{stroke:#000;stroke-width:1.5}text{font-family:monospace;font-size:12px}</style>\n"
        << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#fff\"/>\n"
        << "  <text x=\"48\" y=\"24\">" << (bars ? "CX(k) on y" + std::to_string(opts.proj_x)
                                                 : "CX(k) on (y" + std::to_string(opts.proj_x) + ", y" +
                                                       std::to_string(opts.proj_y) + ")")
        << ", k = " << k << "</text>\n"
        << "  <text x=\"440\" y=\"24\" fill=\"#d62728\">secret</text>\n"
        << "  <text x=\"520\" y=\"24\" fill=\"#1f77b4\">nonsecret</text>\n"
        << "  <text x=\"48\" y=\"470\">" << num(c.x0) << "</text>\n"
        << "  <text x=\"560\" y=\"470\">" << num(c.x1) << "</text>\n";
    if (!bars) {
        svg << "  <text x=\"4\" y=\"436\">" << num(c.y0) << "</text>\n"
            << "  <text x=\"4\" y=\"52\">" << num(c.y1) << "</text>\n";
    }
    draw_shape(svg, c, hns, "nonsecret");
    draw_shape(svg, c, hs, "secret");
    if (radius && radius->radius > sc.tol.geom_eps) {
        const Vec& a = radius->argmax;
        const Vec& b = radius->nearest;
        const P2 pa = bars ? P2{a(opts.proj_x), 1} : P2{a(opts.proj_x), a(opts.proj_y)};
        const P2 pb = bars ? P2{b(opts.proj_x), 0} : P2{b(opts.proj_x), b(opts.proj_y)};
        svg << "  <line class=\"radius\" x1=\"" << num(c.sx(pa.x)) << "\" y1=\"" << num(c.sy(pa.y)) << "\" x2=\""
            << num(c.sx(pb.x)) << "\" y2=\"" << num(c.sy(pb.y)) << "\"/>\n"
            << "  <text x=\"" << num(c.sx((pa.x + pb.x) / 2) + 6) << "\" y=\"" << num(c.sy((pa.y + pb.y) / 2) - 6)
            << "\">eps* = " << num(radius->radius) << "</text>\n";
    }
    svg << "</svg>\n";
    out.svg = svg.str();
    return out;
}

} // namespace opaque::cli
