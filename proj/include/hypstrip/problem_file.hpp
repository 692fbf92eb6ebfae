#pragma once

// Problem files: sectioned key = value text.
//
//   [system]        n, m
//   [speeds]        a_j
//   [coupling]      b_j_k            (missing entries are 0)
//   [factorization] bt_j_k
//   [forcing]       f_j
//   [boundary]      mu_j, reflect_j = k=K; weight=EXPR; shift=S; side=0|1   (repeatable)
//   [initial]       u_j              (trace at t = -T for the march mode)
//   [domain]        T, Nx, Nt, depth
//   [solver]        tol, max_iters, mode, ell
//
// Indices are 1-based. Lines starting with '#' or ';' are comments.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hypstrip/cases.hpp"

namespace hypstrip {

class ProblemFileError : public std::runtime_error {
public:
    ProblemFileError(const std::string& section, int line, const std::string& message);
    std::string section;
    int line;
};

enum class SolveMode { picard, two_phase, march };

std::string to_string(SolveMode m);
SolveMode parse_mode(std::string_view s);  // throws std::invalid_argument

struct SolverSettings {
    double tol = 1e-10;
    int max_iters = 1000;
    SolveMode mode = SolveMode::picard;
    int ell = 8;
};

struct ProblemFile {
    ProblemSpec spec;
    DomainDefaults domain;
    SolverSettings solver;
    std::vector<Expr> initial;  // empty or n entries
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::filesystem::path& path);

/// Text that parses back to an equivalent ProblemFile.
std::string format_problem_file(const ProblemFile& file, const std::string& comment = {});

}  // namespace hypstrip
