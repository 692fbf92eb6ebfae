#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hypstrip/diagnostics.hpp"
#include "hypstrip/grid.hpp"
#include "hypstrip/solver.hpp"

namespace hypstrip {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Path of the table for component j (0-based): u_<j+1>.csv.
std::filesystem::path table_path(const std::filesystem::path& dir, int j);

/// One table per component over the whole padded grid: Nt + 1 rows (t
/// ascending), Nx + 1 comma-separated values per row, 17 significant digits.
void write_tables(const std::filesystem::path& dir, const GridFunction& u, double T);

/// Reads tables written by write_tables and checks they fit `grid`.
GridFunction read_tables(const std::filesystem::path& dir, int n, const Grid& grid);

std::string format_verdicts(const std::vector<HypothesisVerdict>& verdicts);
std::string format_estimates(const std::vector<NormEstimate>& estimates);

/// Human-readable key: value report.
std::string format_report(const SolveReport& report, const std::vector<NormEstimate>& estimates);

/// Gnuplot script drawing every table as a heat map.
std::string gnuplot_script(int n, const Grid& grid);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hypstrip
