#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "hypstrip/problem_file.hpp"

namespace hypstrip {

enum ExitCode : int {
    exit_ok = 0,
    exit_input = 1,
    exit_divergence = 2,
    exit_hypothesis = 3,
    exit_verification = 4,
};

struct CliFlags {
    std::optional<double> tol;
    std::optional<int> max_iters;
    std::optional<SolveMode> mode;
    std::optional<int> ell;
    int threads = 0;
    bool skip_checks = false;
    bool gnuplot = false;
};

int cmd_solve(const std::filesystem::path& problem, const std::filesystem::path& out_dir, const CliFlags& flags,
              std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::filesystem::path& problem, const CliFlags& flags, std::ostream& out, std::ostream& err);
/// --tol defaults to 10 h^2 with h = max(dx, dt).
int cmd_verify(const std::filesystem::path& problem, const std::filesystem::path& solution_dir, const CliFlags& flags,
               std::ostream& out, std::ostream& err);
int cmd_cases_list(std::ostream& out);
/// Writes problem.txt and, when the case has one, the exact solution tables.
int cmd_cases_export(const std::string& name, const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream& err);

/// Parses arguments and dispatches to the commands above.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hypstrip
