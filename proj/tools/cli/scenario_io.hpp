// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/decentralized.hpp"
#include "opaque/nonlinear.hpp"
#include "opaque/system.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace opaque::cli {

/// Bad scenario file. The message reads "file:line: /json/pointer: detail".
class InputError : public std::runtime_error {
  public:
    InputError(const std::string& file, int line, const std::string& pointer, const std::string& detail);
    int line() const { return line_; }
    const std::string& pointer() const { return pointer_; }

  private:
    int line_;
    std::string pointer_;
};

/// Line of the value at each JSON pointer ("" is the root). Expects valid JSON.
std::map<std::string, int> pointer_lines(const std::string& text);

struct NonlinearSpec {
    NlSystem sys;
    std::vector<std::string> f;
    std::vector<std::string> h;
    GridSpec grid;
    std::optional<double> delta;
};

struct ScenarioFile {
    std::string name;
    nlohmann::ordered_json document;

    std::optional<LtiSystem> system;
    VPolytope secret{Points{Vec::Zero(1)}};
    VPolytope nonsecret{Points{Vec::Zero(1)}};
    InputSet inputs = InputSet::zero(1);
    std::vector<int> schedule{1};
    Tolerances tol;

    std::optional<AdversaryEnsemble> adversaries;
    std::optional<CommGraph> graph;
    CoordinatorRule coordinator;
    std::optional<NonlinearSpec> nonlinear;
    std::optional<double> epsilon;

    /// The linear scenario; throws InputError if the file has no system.
    Scenario scenario() const;
    std::vector<std::string> warnings() const;
};

ScenarioFile parse_scenario(const std::string& text, const std::string& name);
ScenarioFile load_scenario(const std::string& path);

} // namespace opaque::cli
