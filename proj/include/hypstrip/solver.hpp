#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypstrip/diagnostics.hpp"
#include "hypstrip/grid.hpp"
#include "hypstrip/operators.hpp"

namespace hypstrip {

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public SolveError {
public:
    DivergenceError(const std::string& what, double growth) : SolveError(what), growth_ratio(growth) {}
    double growth_ratio;
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iters = 1000;
    int divergence_run = 10;  // consecutive increases that count as divergence
    std::optional<GridFunction> seed;  // u^0; zero when absent
    int max_sweeps = 200;      // per row in the forward march
};

struct SolveReport {
    std::string mode;
    int iterations = 0;
    std::vector<double> increments;
    double contraction_ratio = 0.0;
    bool converged = false;
    double fixed_point_residual = 0.0;
    std::optional<Residuals> residuals;
    std::vector<HypothesisVerdict> verdicts;
    double wall_seconds = 0.0;
    // Two-phase extras.
    int phase1_iterations = 0;
    double phase1_ratio = 0.0;
    int march_rows = 0;
    int max_row_sweeps = 0;
};

struct Solution {
    GridFunction u;
    SolveReport report;
};

/// Geometric mean of the last (up to) five increment ratios.
double contraction_ratio(const std::vector<double>& increments);

/// u^{m+1} = C u^m + D u^m + Ff + data on rows [r0, r1] (all rows by default).
/// Rows outside the range keep the seed's values.
Solution picard_solve(const StripOperators& ops, const SolverOptions& opts = {}, int r0 = 0, int r1 = -1);

/// Marches rows start_row+1 .. nt. Rows 0 .. start_row of `history` are taken
/// as known; each new row is resolved by local fixed-point sweeps.
/// Requires every characteristic and boundary read to look back in time.
Solution forward_march(const StripOperators& ops, const GridFunction& history, int start_row,
                       const SolverOptions& opts = {});

/// Marches from a single initial row; the rows below it hold the same values.
Solution forward_march(const StripOperators& ops, const std::vector<std::vector<double>>& initial, int start_row,
                       const SolverOptions& opts = {});

/// Picard on the rows with t <= -T, then a forward march from there.
Solution two_phase_solve(const StripOperators& ops, double T, const SolverOptions& opts = {});

/// Last grid row with t <= -T.
int split_row(const Grid& g, double T);

}  // namespace hypstrip
