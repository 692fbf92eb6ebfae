#include "hypstrip/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace hypstrip {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void copy_rows(const GridFunction& from, GridFunction& to, int r0, int r1) {
    const Grid& g = from.grid();
    for (int j = 0; j < from.components(); ++j)
        for (int i = 0; i <= g.nx; ++i)
            for (int r = r0; r <= r1; ++r) to.at(j, i, r) = from.at(j, i, r);
}

void check_finite(double incr, int iteration) {
    if (!std::isfinite(incr)) {
        std::ostringstream os;
        os << "non-finite value in iterate " << iteration;
        throw SolveError(os.str());
    }
}

// Every read of row r must come from rows <= r.
void require_causal(const StripOperators& ops, int start_row) {
    const ProblemSpec& spec = ops.spec();
    for (const auto& row : spec.boundary.rows)
        for (const auto& term : row.terms)
            if (term.shift > 0.0) throw SolveError("forward march needs boundary shifts <= 0");
    const Grid& g = ops.grid();
    const double slack = 1e-9 * g.dt();
    for (int j = 0; j < spec.n; ++j)
        for (int i = 0; i <= g.nx; ++i)
            for (int r = start_row + 1; r <= g.nt; ++r)
                if (ops.boundary_time(j, i, r) > g.t(r) + slack) {
                    std::ostringstream os;
                    os << "forward march needs characteristics running backward in time; component " << j + 1
                       << " reaches its boundary at t = " << ops.boundary_time(j, i, r) << " from t = " << g.t(r);
                    throw SolveError(os.str());
                }
}

}  // namespace

double contraction_ratio(const std::vector<double>& increments) {
    const int n = static_cast<int>(increments.size());
    if (n < 2) return 0.0;
    const int span = std::min(5, n - 1);
    const double last = increments[n - 1];
    const double first = increments[n - 1 - span];
    if (first == 0.0) return 0.0;
    if (last == 0.0) return 0.0;
    return std::pow(last / first, 1.0 / span);
}

Solution picard_solve(const StripOperators& ops, const SolverOptions& opts, int r0, int r1) {
    const auto start = Clock::now();
    const Grid& g = ops.grid();
    if (r1 < 0) r1 = g.nt;
    if (r0 < 0 || r0 > r1 || r1 > g.nt) throw SolveError("row range outside the grid");

    Solution sol{opts.seed ? *opts.seed : GridFunction(ops.components(), g), {}};
    if (sol.u.components() != ops.components() || !(sol.u.grid() == g))
        throw SolveError("seed does not match the operator grid");
    SolveReport& rep = sol.report;
    rep.mode = "picard";

    GridFunction next = sol.u;
    int rising = 0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        ops.apply_fixed_point(sol.u, next, r0, r1);
        const double incr = sup_distance(next, sol.u, r0, r1);
        check_finite(incr, it);
        std::swap(sol.u, next);
        rep.iterations = it;
        rep.increments.push_back(incr);
        if (incr < opts.tol) {
            rep.converged = true;
            break;
        }
        const std::size_t n = rep.increments.size();
        rising = (n >= 2 && incr > rep.increments[n - 2]) ? rising + 1 : 0;
        if (rising >= opts.divergence_run) {
            const double growth = std::pow(incr / rep.increments[n - 1 - rising], 1.0 / rising);
            std::ostringstream os;
            os << "Picard iteration diverges: increments grew for " << rising
               << " consecutive iterations, growth ratio " << growth;
            throw DivergenceError(os.str(), growth);
        }
    }
    rep.contraction_ratio = contraction_ratio(rep.increments);
    if (!rep.converged) {
        std::ostringstream os;
        os << "Picard iteration did not reach tol " << opts.tol << " in " << opts.max_iters
           << " iterations (last increment " << rep.increments.back() << ", ratio " << rep.contraction_ratio << ")";
        throw DivergenceError(os.str(), rep.contraction_ratio);
    }
    ops.apply_fixed_point(sol.u, next, r0, r1);
    rep.fixed_point_residual = sup_distance(next, sol.u, r0, r1);
    rep.wall_seconds = seconds_since(start);
    return sol;
}

Solution forward_march(const StripOperators& ops, const GridFunction& history, int start_row,
                       const SolverOptions& opts) {
    const auto start = Clock::now();
    const Grid& g = ops.grid();
    if (history.components() != ops.components() || !(history.grid() == g))
        throw SolveError("history does not match the operator grid");
    if (start_row < 0 || start_row > g.nt) throw SolveError("start row outside the grid");
    require_causal(ops, start_row);

    Solution sol{history, {}};
    SolveReport& rep = sol.report;
    rep.mode = "march";
    GridFunction next = history;
    for (int r = start_row + 1; r <= g.nt; ++r) {
        for (int j = 0; j < sol.u.components(); ++j)
            for (int i = 0; i <= g.nx; ++i) sol.u.at(j, i, r) = sol.u.at(j, i, r - 1);
        int sweeps = 0;
        for (;;) {
            ops.apply_fixed_point(sol.u, next, r, r);
            const double incr = sup_distance(next, sol.u, r, r);
            check_finite(incr, sweeps + 1);
            copy_rows(next, sol.u, r, r);
            ++sweeps;
            if (incr < opts.tol) break;
            if (sweeps >= opts.max_sweeps) {
                std::ostringstream os;
                os << "local sweep at t = " << g.t(r) << " did not converge in " << opts.max_sweeps
                   << " sweeps (last increment " << incr << ")";
                throw SolveError(os.str());
            }
        }
        rep.iterations += sweeps;
        rep.max_row_sweeps = std::max(rep.max_row_sweeps, sweeps);
        ++rep.march_rows;
    }
    rep.converged = true;
    ops.apply_fixed_point(sol.u, next, start_row + 1, g.nt);
    rep.fixed_point_residual = start_row < g.nt ? sup_distance(next, sol.u, start_row + 1, g.nt) : 0.0;
    rep.wall_seconds = seconds_since(start);
    return sol;
}

Solution forward_march(const StripOperators& ops, const std::vector<std::vector<double>>& initial, int start_row,
                       const SolverOptions& opts) {
    const Grid& g = ops.grid();
    if (static_cast<int>(initial.size()) != ops.components()) throw SolveError("initial trace needs one row per component");
    GridFunction history(ops.components(), g);
    for (int j = 0; j < ops.components(); ++j) {
        if (static_cast<int>(initial[j].size()) != g.nx + 1) throw SolveError("initial trace needs Nx + 1 values");
        for (int i = 0; i <= g.nx; ++i)
            for (int r = 0; r <= start_row; ++r) history.at(j, i, r) = initial[j][i];
    }
    return forward_march(ops, history, start_row, opts);
}

int split_row(const Grid& g, double T) {
    int row = -1;
    for (int r = 0; r <= g.nt; ++r)
        if (g.t(r) <= -T + 1e-12 * std::max(1.0, T)) row = r;
    return row;
}

Solution two_phase_solve(const StripOperators& ops, double T, const SolverOptions& opts) {
    const auto start = Clock::now();
    const int rs = split_row(ops.grid(), T);
    if (rs < 0) throw SolveError("no grid row at or below t = -T");

    Solution left;
    try {
        left = picard_solve(ops, opts, 0, rs);
    } catch (const DivergenceError& e) {
        throw SolveError(std::string("phase 1 does not contract: ") + e.what());
    }
    if (left.report.contraction_ratio >= 1.0) {
        std::ostringstream os;
        os << "phase 1 does not contract (ratio " << left.report.contraction_ratio << ")";
        throw SolveError(os.str());
    }

    SolverOptions march = opts;
    march.seed.reset();
    Solution sol = forward_march(ops, left.u, rs, march);
    SolveReport& rep = sol.report;
    rep.mode = "two-phase";
    rep.phase1_iterations = left.report.iterations;
    rep.phase1_ratio = left.report.contraction_ratio;
    rep.increments = left.report.increments;
    rep.contraction_ratio = left.report.contraction_ratio;
    rep.iterations += left.report.iterations;
    rep.fixed_point_residual = std::max(rep.fixed_point_residual, left.report.fixed_point_residual);
    rep.wall_seconds = seconds_since(start);
    return sol;
}

}  // namespace hypstrip
