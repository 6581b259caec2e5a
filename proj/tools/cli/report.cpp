// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include "opaque/error.hpp"

#include <cstdio>
#include <iomanip>

namespace opaque::cli {

using json = nlohmann::ordered_json;

namespace {

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

Vec json_vec(const json& a) {
    Vec v(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        v(static_cast<int>(i)) = a[i].get<double>();
    }
    return v;
}

json trace_json(const Trace& t) {
    json c = json::array();
    for (const auto& u : t.controls) {
        c.push_back(vec_json(u));
    }
    return json{{"x0", vec_json(t.x0)}, {"controls", c}};
}

Trace json_trace(const json& j) {
    Trace t{json_vec(j.at("x0")), {}};
    for (const auto& u : j.at("controls")) {
        t.controls.push_back(json_vec(u));
    }
    return t;
}

bool same(const Vec& a, const Vec& b) { return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() == 0.0; }

template <class T, class Eq>
bool same_opt(const std::optional<T>& a, const std::optional<T>& b, Eq eq) {
    return a.has_value() == b.has_value() && (!a || eq(*a, *b));
}

bool same_trace(const Trace& a, const Trace& b) {
    if (!same(a.x0, b.x0) || a.controls.size() != b.controls.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.controls.size(); ++i) {
        if (!same(a.controls[i], b.controls[i])) {
            return false;
        }
    }
    return true;
}

bool same_witness(const Witness& a, const Witness& b) {
    return same(a.output, b.output) && a.distance == b.distance && same_opt(a.nearest, b.nearest, same) &&
           same_opt(a.secret, b.secret, same_trace) && same_opt(a.nonsecret, b.nonsecret, same_trace) &&
           same_opt(a.state, b.state, same);
}

json witness_json(const Witness& w) {
    json j{{"output", vec_json(w.output)}, {"distance", w.distance}};
    if (w.nearest) {
        j["nearest"] = vec_json(*w.nearest);
    }
    if (w.secret) {
        j["secret_trace"] = trace_json(*w.secret);
    }
    if (w.nonsecret) {
        j["nonsecret_trace"] = trace_json(*w.nonsecret);
    }
    if (w.state) {
        j["state"] = vec_json(*w.state);
    }
    return j;
}

Witness json_witness(const json& j) {
    Witness w;
    w.output = json_vec(j.at("output"));
    w.distance = j.at("distance").get<double>();
    if (j.contains("nearest")) {
        w.nearest = json_vec(j.at("nearest"));
    }
    if (j.contains("secret_trace")) {
        w.secret = json_trace(j.at("secret_trace"));
    }
    if (j.contains("nonsecret_trace")) {
        w.nonsecret = json_trace(j.at("nonsecret_trace"));
    }
    if (j.contains("state")) {
        w.state = json_vec(j.at("state"));
    }
    return w;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

bool KReport::operator==(const KReport& o) const {
    return k == o.k && status == o.status && note == o.note && radius == o.radius && exact == o.exact &&
           same_opt(witness, o.witness, same_witness) && certificates == o.certificates &&
           predicted_cost == o.predicted_cost && adversaries == o.adversaries && seconds == o.seconds;
}

bool Report::operator==(const Report& o) const {
    return command == o.command && mode == o.mode && scenario == o.scenario && status == o.status &&
           per_k == o.per_k && warnings == o.warnings && extra == o.extra && seconds == o.seconds;
}

int exit_code(Status s) {
    switch (s) {
    case Status::holds:
        return 0;
    case Status::fails:
        return 1;
    case Status::unknown:
        return 2;
    }
    return 2;
}

Status parse_status(const std::string& s) {
    if (s == "HOLDS") {
        return Status::holds;
    }
    if (s == "FAILS") {
        return Status::fails;
    }
    if (s == "UNKNOWN") {
        return Status::unknown;
    }
    throw InvalidArgument("unknown status '" + s + "'");
}

json to_json(const Report& r, bool timing) {
    json j;
    j["tool"] = "opaque-reach";
    j["command"] = r.command;
    j["mode"] = r.mode;
    j["scenario"] = r.scenario;
    j["status"] = to_string(r.status);
    json ks = json::array();
    for (const auto& k : r.per_k) {
        json e{{"k", k.k}, {"status", to_string(k.status)}, {"note", k.note}};
        if (k.radius) {
            e["radius"] = *k.radius;
        }
        if (k.exact) {
            e["exact"] = *k.exact;
        }
        if (k.witness) {
            e["witness"] = witness_json(*k.witness);
        }
        e["certificates"] = k.certificates;
        if (k.predicted_cost) {
            e["predicted_cost"] = *k.predicted_cost;
        }
        if (!k.adversaries.empty()) {
            json a = json::array();
            for (Status s : k.adversaries) {
                a.push_back(to_string(s));
            }
            e["adversaries"] = a;
        }
        if (timing) {
            e["seconds"] = k.seconds;
        }
        ks.push_back(e);
    }
    j["per_k"] = ks;
    j["warnings"] = r.warnings;
    j["extra"] = r.extra;
    if (timing) {
        j["seconds"] = r.seconds;
    }
    return j;
}

Report report_from_json(const json& j) {
    Report r;
    r.command = j.at("command").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.status = parse_status(j.at("status").get<std::string>());
    for (const auto& e : j.at("per_k")) {
        KReport k;
        k.k = e.at("k").get<int>();
        k.status = parse_status(e.at("status").get<std::string>());
        k.note = e.at("note").get<std::string>();
        if (e.contains("radius")) {
            k.radius = e.at("radius").get<double>();
        }
        if (e.contains("exact")) {
            k.exact = e.at("exact").get<bool>();
        }
        if (e.contains("witness")) {
            k.witness = json_witness(e.at("witness"));
        }
        k.certificates = e.at("certificates").get<int>();
        if (e.contains("predicted_cost")) {
            k.predicted_cost = e.at("predicted_cost").get<double>();
        }
        if (e.contains("adversaries")) {
            for (const auto& s : e.at("adversaries")) {
                k.adversaries.push_back(parse_status(s.get<std::string>()));
            }
        }
        k.seconds = e.value("seconds", 0.0);
        r.per_k.push_back(k);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.extra = j.at("extra");
    r.seconds = j.value("seconds", 0.0);
    return r;
}

void write_text(std::ostream& os, const Report& r) {
    os << "opaque-reach " << r.command << " (" << r.mode << ") " << r.scenario << "\n";
    for (const auto& w : r.warnings) {
        os << "warning: " << w << "\n";
    }
    os << std::left << std::setw(5) << "k" << std::setw(9) << "status" << std::setw(13) << "distance"
       << std::setw(13) << "radius" << "note\n";
    for (const auto& k : r.per_k) {
        os << std::setw(5) << k.k << std::setw(9) << to_string(k.status) << std::setw(13)
           << (k.witness ? fmt(k.witness->distance) : "-") << std::setw(13) << (k.radius ? fmt(*k.radius) : "-")
           << k.note << "\n";
        if (!k.adversaries.empty()) {
            os << "     adversaries:";
            for (Status s : k.adversaries) {
                os << " " << to_string(s);
            }
            os << "\n";
        }
        if (k.predicted_cost) {
            os << "     predicted cost: " << fmt(*k.predicted_cost) << "\n";
        }
    }
    os << "result: " << to_string(r.status) << "\n";
}

} // namespace opaque::cli
