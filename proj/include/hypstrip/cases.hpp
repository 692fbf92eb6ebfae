#pragma once

// Built-in problems: the non-uniqueness counterexample, decoupled transport
// with closed-form solutions, and manufactured-solution generators.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypstrip/diagnostics.hpp"
#include "hypstrip/problem.hpp"

namespace hypstrip {

enum class Behavior { unique_solvable, kernel_nontrivial, divergent };

std::string to_string(Behavior b);

struct DomainDefaults {
    double T = 2.0;
    int nx = 64;
    int nt = 128;
    int depth = 3;
};

struct CaseDescriptor {
    std::string name;
    std::string summary;
    ProblemSpec spec;
    std::optional<std::vector<Expr>> exact;
    std::map<Condition, Status> expected;
    Behavior behavior = Behavior::unique_solvable;
    DomainDefaults domain;
};

/// n = 2, m = 1, a = 2/pi, b_12 = -1, b_21 = 1, zero data; the exact
/// homogeneous solution with frequency l.
CaseDescriptor counterexample(int l);

/// b = 0 and constant speeds; u_j(x,t) = data_j(t - (x - x_j)/a_j).
CaseDescriptor decoupled_transport(int n, int m, const std::vector<double>& speeds, const std::vector<Expr>& data);

/// Forcing and boundary data chosen so that u_star solves the problem exactly.
/// Throws DiffError when u_star is not differentiable.
CaseDescriptor manufactured(const ProblemSpec& base, const std::vector<Expr>& u_star);

/// Names of all built-in cases in listing order.
std::vector<std::string> builtin_case_names();
/// Throws std::out_of_range for unknown names.
CaseDescriptor builtin_case(const std::string& name);

}  // namespace hypstrip
