// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "opaque/linalg.hpp"
#include "opaque/polytope.hpp"
#include "opaque/tolerances.hpp"
#include "opaque/zonotope.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace opaque {

/// x(t+1) = A x(t) + B u(t),  y(t) = C x(t).
class LtiSystem {
  public:
    LtiSystem(Mat a, Mat b, Mat c);

    int n() const { return static_cast<int>(a_.rows()); }
    int m() const { return static_cast<int>(b_.cols()); }
    int p() const { return static_cast<int>(c_.rows()); }
    const Mat& A() const { return a_; }
    const Mat& B() const { return b_; }
    const Mat& C() const { return c_; }

    /// Same dynamics observed through another output map.
    LtiSystem with_output(const Mat& c) const { return LtiSystem(a_, b_, c); }
    /// [C A^{k-1} B, ..., C A B, C B]: maps the stacked controls to y(k).
    Mat output_control_matrix(int k) const;

  private:
    Mat a_;
    Mat b_;
    Mat c_;
};

/// Time-invariant admissible control set.
class InputSet {
  public:
    enum class Kind { polytope, zonotope, unbounded };

    explicit InputSet(VPolytope p);
    explicit InputSet(Zonotope z);
    static InputSet unbounded(int m);
    static InputSet zero(int m) { return InputSet(VPolytope::singleton(Vec::Zero(m))); }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool bounded() const { return kind_ != Kind::unbounded; }
    const VPolytope& polytope() const;
    const Zonotope& zonotope() const;
    /// Vertex form; zonotopes are enumerated. Throws for unbounded sets.
    VPolytope vertices() const;
    /// Enclosing zonotope (interval hull for V-polytopes). Throws for unbounded sets.
    Zonotope outer_zonotope() const;

  private:
    Kind kind_;
    int dim_;
    std::optional<VPolytope> poly_;
    std::optional<Zonotope> zono_;
};

enum class Space { state, output };
enum class Fidelity { exact, over, under };
std::string to_string(Space s);
std::string to_string(Fidelity f);

/// Which initial vertex and which input vertex per step generated a reach vertex.
struct Provenance {
    int x0 = -1;
    std::vector<int> inputs;
};

struct ReachSet {
    std::variant<VPolytope, Zonotope> set;
    int time = 0;
    Space space = Space::state;
    Fidelity fidelity = Fidelity::exact;
    /// Aligned with the V-polytope vertices; empty for zonotopes.
    std::vector<Provenance> provenance;

    int dim() const;
    bool is_polytope() const { return std::holds_alternative<VPolytope>(set); }
    const VPolytope& polytope() const { return std::get<VPolytope>(set); }
    const Zonotope& zonotope() const { return std::get<Zonotope>(set); }
    /// Vertex form of either representation.
    VPolytope vertices() const;
};

struct ReachOptions {
    /// Above this many vertices the V-polytope path gives up and returns a
    /// zonotope over-approximation (fidelity over). 0 disables the cap.
    std::size_t vertex_cap = 200000;
    /// Zonotope order used by that fallback.
    int fallback_order = 50;
};

/// A^k X0 ⊕ A^{k-1} B U ⊕ ... ⊕ B U. Throws InvalidArgument for negative k or
/// an unbounded input set.
ReachSet reach_exact(const LtiSystem& sys, const VPolytope& x0, const InputSet& u, int k, const ReachOptions& opts = {});
ReachSet reach_exact(const LtiSystem& sys, const Zonotope& x0, const InputSet& u, int k, const ReachOptions& opts = {});

/// C applied to a state-space reach set; vertex order and provenance are kept.
ReachSet output_set(const LtiSystem& sys, const ReachSet& r);

struct Trajectory {
    Points states;  ///< x(0) .. x(T)
    Points outputs; ///< y(0) .. y(T)
};
Trajectory simulate(const LtiSystem& sys, const Vec& x0, const Points& controls);

/// {x0 : C A^k x0 ∈ Y ⊕ (-C R_u)}: states from which some admissible control
/// sequence puts y(k) in Y. May be unbounded. Requires p <= 3.
HPolytope pre0_output(const LtiSystem& sys, const HPolytope& y, const InputSet& u, int k, const Tolerances& tol = {});

/// {x0 : C A^k x0 ⊕ C R_u ⊆ Y}: states from which every admissible control
/// sequence puts y(k) in Y. Any p.
HPolytope pre0_output_robust(const LtiSystem& sys, const HPolytope& y, const InputSet& u, int k, const Tolerances& tol = {});

/// Orthonormal basis of the output directions not reachable by controls at
/// horizon k (p x q). Used to handle unbounded input sets exactly.
Mat output_quotient(const LtiSystem& sys, int k);

struct Scenario {
    LtiSystem sys;
    VPolytope secret;
    VPolytope nonsecret;
    InputSet inputs;
    std::vector<int> schedule{1};
    Tolerances tol{};

    /// Throws on inconsistent dimensions or a bad schedule.
    void validate() const;
    /// Non-fatal findings, e.g. overlapping secret and nonsecret hulls.
    std::vector<std::string> warnings() const;
    Scenario with_secret(VPolytope s) const;
    Scenario with_nonsecret(VPolytope s) const;
};

} // namespace opaque
