// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
//
// opaque-reach: k-initial-state opacity checks for scenario files.
// Exit codes: 0 HOLDS, 1 FAILS, 2 UNKNOWN, 3 input error.
#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace opaque::cli;

namespace {

constexpr int kInputError = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << content;
}

std::string csv_path(const std::string& svg) {
    const auto dot = svg.find_last_of('.');
    const auto slash = svg.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return svg + ".csv";
    }
    return svg.substr(0, dot) + ".csv";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"opaque-reach: set-based opacity verification for linear systems"};
    app.require_subcommand(1);

    std::string file, out;
    Options opts;
    std::vector<int> proj;
    bool json_out = false, no_timing = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("scenario", file, "scenario JSON file")->required();
        sub->add_option("--k", opts.k, "single observation time instead of the schedule");
        sub->add_option("--eps", opts.eps, "eps threshold");
        sub->add_option("--out", out, "output path");
        sub->add_flag("--json", json_out, "print the JSON report instead of the table");
        sub->add_flag("--no-timing", no_timing, "leave timings out of JSON reports");
    };
    CLI::App* check = app.add_subcommand("check", "decide opacity for every k of the schedule");
    common(check);
    check->add_option("--mode", opts.mode, "strong|weak|eps|sound|decentralized|co|collusion|nonlinear");
    check->add_option("--order", opts.order, "zonotope order for --mode sound");
    check->add_option("--delta", opts.delta, "sample tolerance for --mode nonlinear");
    check->add_option("--seed", opts.seed, "seed for sampling fallbacks");

    CLI::App* radius = app.add_subcommand("radius", "opacity radius per k");
    common(radius);

    CLI::App* prune = app.add_subcommand("prune", "shrink the secret set until strong opacity holds at k");
    common(prune);

    CLI::App* plot = app.add_subcommand("plot", "SVG and CSV of CX_s(k) and CX_ns(k)");
    common(plot);
    plot->add_option("--mode", opts.mode, "eps draws the radius");
    plot->add_option("--proj", proj, "two output axes")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }
    if (proj.size() == 2) {
        opts.proj_x = proj[0];
        opts.proj_y = proj[1];
    }
    opts.threads = threads_from_env();

    try {
        const ScenarioFile sf = load_scenario(file);
        auto emit = [&](const Report& r) {
            const std::string j = to_json(r, !no_timing).dump(2) + "\n";
            if (json_out) {
                std::cout << j;
            } else {
                write_text(std::cout, r);
            }
            return j;
        };
        if (check->parsed() || radius->parsed()) {
            const Report r = check->parsed() ? cmd_check(sf, opts) : cmd_radius(sf, opts);
            const std::string j = emit(r);
            if (!out.empty()) {
                write_file(out, j);
            }
            return exit_code(r.status);
        }
        if (prune->parsed()) {
            const PruneOutput po = cmd_prune(sf, opts);
            emit(po.report);
            if (!out.empty()) {
                if (!po.scenario) {
                    std::cerr << "prune: no vertex form of the pruned set; " << out << " not written\n";
                } else {
                    write_file(out, po.scenario->dump(2) + "\n");
                }
            }
            return exit_code(po.report.status);
        }
        if (out.empty()) {
            throw std::runtime_error("plot needs --out file.svg");
        }
        const PlotOutput po = cmd_plot(sf, opts);
        write_file(out, po.svg);
        write_file(csv_path(out), po.csv);
        std::cout << "wrote " << out << " and " << csv_path(out) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
