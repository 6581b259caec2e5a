// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenario_io.hpp"

#include "opaque/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace opaque::cli {

using json = nlohmann::ordered_json;

InputError::InputError(const std::string& file, int line, const std::string& pointer, const std::string& detail)
    : std::runtime_error(file + ":" + (line > 0 ? std::to_string(line) + ":" : "") + " " +
                         (pointer.empty() ? std::string() : pointer + ": ") + detail),
      line_(line), pointer_(pointer) {}

namespace {

// Walks text that is already known to be valid JSON.
class LineScanner {
  public:
    explicit LineScanner(const std::string& s) : s_(s) {}

    std::map<std::string, int> run() {
        value("");
        return lines_;
    }

  private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            if (s_[pos_] == '\n') {
                ++line_;
            }
            ++pos_;
        }
    }

    std::string string() {
        std::string out;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') {
                out += s_[pos_++];
            }
            out += s_[pos_++];
        }
        ++pos_;
        return out;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out += c;
            }
        }
        return out;
    }

    void value(const std::string& ptr) {
        skip();
        lines_.emplace(ptr, line_);
        if (pos_ >= s_.size()) {
            return;
        }
        const char c = s_[pos_];
        if (c == '{') {
            ++pos_;
            skip();
            if (s_[pos_] == '}') {
                ++pos_;
                return;
            }
            for (;;) {
                skip();
                const std::string key = string();
                skip();
                ++pos_; // ':'
                value(ptr + "/" + escape(key));
                skip();
                if (s_[pos_++] == '}') {
                    return;
                }
            }
        }
        if (c == '[') {
            ++pos_;
            skip();
            if (s_[pos_] == ']') {
                ++pos_;
                return;
            }
            for (int i = 0;; ++i) {
                value(ptr + "/" + std::to_string(i));
                skip();
                if (s_[pos_++] == ']') {
                    return;
                }
            }
        }
        if (c == '"') {
            string();
            return;
        }
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ',' &&
               s_[pos_] != ']' && s_[pos_] != '}') {
            ++pos_;
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

struct Context {
    std::string file;
    std::map<std::string, int> lines;

    int line_of(const std::string& ptr) const {
        // A missing member is reported at its parent.
        std::string p = ptr;
        for (;;) {
            auto it = lines.find(p);
            if (it != lines.end()) {
                return it->second;
            }
            if (p.empty()) {
                return 0;
            }
            p.erase(p.rfind('/'));
        }
    }
};

class Node {
  public:
    Node(const json& j, std::string ptr, const Context& ctx) : j_(j), ptr_(std::move(ptr)), ctx_(ctx) {}

    [[noreturn]] void fail(const std::string& detail) const {
        throw InputError(ctx_.file, ctx_.line_of(ptr_), ptr_.empty() ? "/" : ptr_, detail);
    }

    const json& raw() const { return j_; }
    const std::string& pointer() const { return ptr_; }

    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

    Node at(const std::string& key) const {
        if (!j_.is_object()) {
            fail("expected an object");
        }
        if (!j_.contains(key)) {
            throw InputError(ctx_.file, ctx_.line_of(ptr_), ptr_ + "/" + key, "missing field");
        }
        return Node(j_.at(key), ptr_ + "/" + key, ctx_);
    }

    Node at(std::size_t i) const { return Node(j_.at(i), ptr_ + "/" + std::to_string(i), ctx_); }

    std::size_t size() const {
        if (!j_.is_array()) {
            fail("expected an array");
        }
        return j_.size();
    }

    double number() const {
        if (!j_.is_number()) {
            fail("expected a number");
        }
        const double v = j_.get<double>();
        if (!std::isfinite(v)) {
            fail("expected a finite number");
        }
        return v;
    }

    int integer() const {
        if (!j_.is_number_integer()) {
            fail("expected an integer");
        }
        return j_.get<int>();
    }

    std::string string() const {
        if (!j_.is_string()) {
            fail("expected a string");
        }
        return j_.get<std::string>();
    }

    Vec vec(int dim = -1) const {
        const std::size_t n = size();
        if (dim >= 0 && static_cast<int>(n) != dim) {
            fail("expected " + std::to_string(dim) + " entries, got " + std::to_string(n));
        }
        Vec v(static_cast<int>(n));
        for (std::size_t i = 0; i < n; ++i) {
            v(static_cast<int>(i)) = at(i).number();
        }
        return v;
    }

    /// {"rows": r, "cols": c, "data": [row-major]}.
    Mat matrix(int rows = -1, int cols = -1) const {
        const int r = at("rows").integer(), c = at("cols").integer();
        if (r < 1 || c < 1) {
            fail("rows and cols must be >= 1");
        }
        if (rows >= 0 && r != rows) {
            at("rows").fail("expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
        }
        if (cols >= 0 && c != cols) {
            at("cols").fail("expected " + std::to_string(cols) + " cols, got " + std::to_string(c));
        }
        const Vec d = at("data").vec(r * c);
        Mat m(r, c);
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) {
                m(i, j) = d(i * c + j);
            }
        }
        return m;
    }

    Points points(int dim) const {
        if (size() == 0) {
            fail("need at least one vertex");
        }
        Points out;
        for (std::size_t i = 0; i < size(); ++i) {
            out.push_back(at(i).vec(dim));
        }
        return out;
    }

  private:
    const json& j_;
    std::string ptr_;
    const Context& ctx_;
};

VPolytope read_polytope(const Node& n, int dim) {
    if (n.has("vertices")) {
        return VPolytope(n.at("vertices").points(dim));
    }
    if (n.has("box")) {
        const Node b = n.at("box");
        const Vec lo = b.at("lo").vec(dim), hi = b.at("hi").vec(dim);
        for (int i = 0; i < dim; ++i) {
            if (lo(i) > hi(i)) {
                b.at("lo").fail("lo > hi in coordinate " + std::to_string(i));
            }
        }
        return VPolytope::box(lo, hi);
    }
    n.fail("expected \"vertices\" or \"box\"");
}

InputSet read_inputs(const Node& n, int m) {
    if (n.raw().is_string()) {
        if (n.string() == "unbounded") {
            return InputSet::unbounded(m);
        }
        n.fail("expected \"unbounded\" or an object");
    }
    if (n.has("zonotope")) {
        const Node z = n.at("zonotope");
        const Vec c = z.at("center").vec(m);
        Mat g(m, 0);
        if (z.has("generators")) {
            g = z.at("generators").matrix(m, -1);
        }
        return InputSet(Zonotope(c, g));
    }
    return InputSet(read_polytope(n, m));
}

AdversaryEnsemble read_adversaries(const Node& n, int dim) {
    AdversaryEnsemble ens;
    const Node list = n.at("C_list");
    if (list.size() == 0) {
        list.fail("need at least one adversary");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        ens.maps.push_back(list.at(i).matrix(-1, dim));
    }
    if (n.has("labels")) {
        const Node l = n.at("labels");
        if (l.size() != ens.maps.size()) {
            l.fail("need one label per adversary");
        }
        for (std::size_t i = 0; i < l.size(); ++i) {
            ens.labels.push_back(l.at(i).integer());
        }
    }
    return ens;
}

CommGraph read_graph(const Node& n, int size) {
    CommGraph g;
    g.size = size;
    const Node edges = n.at("edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Node e = edges.at(i);
        if (e.size() != 2) {
            e.fail("an edge is [from, to]");
        }
        const int a = e.at(0).integer(), b = e.at(1).integer();
        if (a < 0 || a >= size || b < 0 || b >= size) {
            e.fail("endpoint outside 0.." + std::to_string(size - 1));
        }
        g.edges.emplace_back(a, b);
    }
    return g;
}

NonlinearSpec read_nonlinear(const Node& n) {
    NonlinearSpec spec;
    const int nx = n.at("n").integer(), m = n.at("m").integer();
    if (nx < 1) {
        n.at("n").fail("must be >= 1");
    }
    if (m < 1) {
        n.at("m").fail("must be >= 1");
    }
    auto strings = [](const Node& a) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < a.size(); ++i) {
            out.push_back(a.at(i).string());
        }
        return out;
    };
    spec.f = strings(n.at("f"));
    spec.h = strings(n.at("h"));
    if (static_cast<int>(spec.f.size()) != nx) {
        n.at("f").fail("need " + std::to_string(nx) + " expressions, got " + std::to_string(spec.f.size()));
    }
    if (spec.h.empty()) {
        n.at("h").fail("need at least one output expression");
    }
    // Parse one by one so errors point at the offending expression.
    for (std::size_t i = 0; i < spec.f.size(); ++i) {
        try {
            Expr::parse(spec.f[i], nx, m);
        } catch (const ParseError& e) {
            n.at("f").at(i).fail(e.what());
        }
    }
    for (std::size_t i = 0; i < spec.h.size(); ++i) {
        try {
            Expr::parse(spec.h[i], nx, 0);
        } catch (const ParseError& e) {
            n.at("h").at(i).fail(e.what());
        }
    }
    spec.sys = NlSystem::from_expressions(nx, m, spec.f, spec.h);
    if (n.has("grid")) {
        const Node g = n.at("grid");
        if (g.has("x_per_axis")) {
            spec.grid.x_per_axis = g.at("x_per_axis").integer();
            if (spec.grid.x_per_axis < 2) {
                g.at("x_per_axis").fail("must be >= 2");
            }
        }
        if (g.has("u_per_axis")) {
            spec.grid.u_per_axis = g.at("u_per_axis").integer();
            if (spec.grid.u_per_axis < 2) {
                g.at("u_per_axis").fail("must be >= 2");
            }
        }
        if (g.has("max_trajectories")) {
            const int cap = g.at("max_trajectories").integer();
            if (cap < 1) {
                g.at("max_trajectories").fail("must be >= 1");
            }
            spec.grid.max_trajectories = static_cast<std::size_t>(cap);
        }
    }
    if (n.has("delta")) {
        spec.delta = n.at("delta").number();
        if (*spec.delta <= 0) {
            n.at("delta").fail("must be > 0");
        }
    }
    return spec;
}

} // namespace

std::map<std::string, int> pointer_lines(const std::string& text) { return LineScanner(text).run(); }

Scenario ScenarioFile::scenario() const {
    if (!system) {
        throw InputError(name, 0, "/system", "this command needs a linear system");
    }
    return Scenario{*system, secret, nonsecret, inputs, schedule, tol};
}

std::vector<std::string> ScenarioFile::warnings() const {
    std::vector<std::string> w;
    if (system) {
        w = scenario().warnings();
    }
    if (nonlinear) {
        for (const auto& s : nonlinear->sys.warnings()) {
            w.push_back("nonlinear: " + s);
        }
    }
    return w;
}

ScenarioFile parse_scenario(const std::string& text, const std::string& name) {
    Context ctx{name, {}};
    ScenarioFile out;
    out.name = name;
    try {
        out.document = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) {
            line += text[i] == '\n';
        }
        throw InputError(name, line, "", "invalid JSON");
    }
    ctx.lines = pointer_lines(text);
    const Node root(out.document, "", ctx);
    if (!out.document.is_object()) {
        root.fail("expected an object");
    }
    if (!root.has("system") && !root.has("nonlinear")) {
        root.fail("need \"system\" or \"nonlinear\"");
    }

    int n = 0, m = 0;
    if (root.has("system")) {
        const Node s = root.at("system");
        const Mat a = s.at("A").matrix();
        if (a.rows() != a.cols()) {
            s.at("A").fail("A must be square");
        }
        n = static_cast<int>(a.rows());
        const Mat b = s.at("B").matrix(n, -1);
        m = static_cast<int>(b.cols());
        Mat c;
        if (s.has("C")) {
            c = s.at("C").matrix(-1, n);
        } else if (root.has("adversaries")) {
            c = read_adversaries(root.at("adversaries"), n).stacked();
        } else {
            s.fail("missing field C");
        }
        out.system = LtiSystem(a, b, c);
    }
    if (root.has("nonlinear")) {
        out.nonlinear = read_nonlinear(root.at("nonlinear"));
        const int nn = out.nonlinear->sys.n, nm = out.nonlinear->sys.m;
        if (out.system && (nn != n || nm != m)) {
            root.at("nonlinear").fail("n and m must match the linear system");
        }
        n = nn;
        m = nm;
    }

    const Node sets = root.at("sets");
    out.secret = read_polytope(sets.at("secret"), n);
    out.nonsecret = read_polytope(sets.at("nonsecret"), n);
    out.inputs = read_inputs(sets.at("inputs"), m);
    if (out.nonlinear && out.inputs.kind() != InputSet::Kind::polytope) {
        sets.at("inputs").fail("nonlinear scenarios need a box or vertex input set");
    }

    if (root.has("schedule")) {
        const Node k = root.at("schedule");
        if (k.size() == 0) {
            k.fail("schedule is empty");
        }
        out.schedule.clear();
        for (std::size_t i = 0; i < k.size(); ++i) {
            const int v = k.at(i).integer();
            if (v < 1) {
                k.at(i).fail("observation times must be >= 1");
            }
            out.schedule.push_back(v);
        }
    }
    if (root.has("tolerances")) {
        const Node t = root.at("tolerances");
        for (const auto& [key, field] : {std::pair{"geom_eps", &Tolerances::geom_eps},
                                         std::pair{"lp_eps", &Tolerances::lp_eps},
                                         std::pair{"gjk_eps", &Tolerances::gjk_eps}}) {
            if (t.has(key)) {
                const double v = t.at(key).number();
                if (v < 0) {
                    t.at(key).fail("must be >= 0");
                }
                out.tol.*field = v;
            }
        }
    }
    if (root.has("epsilon")) {
        out.epsilon = root.at("epsilon").number();
        if (*out.epsilon < 0) {
            root.at("epsilon").fail("must be >= 0");
        }
    }
    if (root.has("adversaries")) {
        const Node a = root.at("adversaries");
        if (n == 0 || !out.system) {
            a.fail("adversaries need a linear system");
        }
        out.adversaries = read_adversaries(a, n);
        if (a.has("graph")) {
            out.graph = read_graph(a.at("graph"), out.adversaries->size());
        }
        if (a.has("coordinator") && a.at("coordinator").string() != "union_of_maps") {
            a.at("coordinator").fail("the only coordinator rule is \"union_of_maps\"");
        }
    }
    if (out.system) {
        try {
            out.scenario().validate();
        } catch (const std::exception& e) {
            root.fail(e.what());
        }
    }
    return out;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError(path, 0, "", "cannot open file");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

} // namespace opaque::cli
