#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hypstrip/problem.hpp"

namespace hypstrip {

/// Uniform (Nx+1) x (Nt+1) grid on [0,1] x [-t_pad, t_pad].
struct Grid {
    int nx = 0;
    int nt = 0;
    double t_pad = 0.0;

    double dx() const { return 1.0 / nx; }
    double dt() const { return 2.0 * t_pad / nt; }
    double x(int i) const { return static_cast<double>(i) / nx; }
    double t(int r) const { return -t_pad + 2.0 * t_pad * r / nt; }

    /// Row interval [first, last] with |t| <= limit.
    std::pair<int, int> rows_within(double limit) const;

    bool operator==(const Grid&) const = default;
};

/// Linear interpolation position in t: rows `row`, `row + 1` with weight `frac` on the upper.
struct RowPosition {
    int row = 0;
    double frac = 0.0;
    bool clamped = false;  // query fell outside [-t_pad, t_pad]
};

RowPosition locate(const Grid& g, double t);

/// Truncated strip Q(T) = [0,1] x [-T, T] plus padding on both sides:
///   t_pad = T + depth * (1 / a_inf + shift_max),
/// where a_inf is the sampled infimum of |a_j| on the padded domain.
struct Domain {
    double T = 1.0;
    int nx = 64;
    int nt = 64;
    int depth = 3;
    double a_inf = 1.0;
    double shift_max = 0.0;
    double t_pad = 1.0;

    Grid grid() const { return Grid{nx, nt, t_pad}; }
};

/// Sizes the padding from the sampled speeds. `speed_floor` bounds 1/a_inf for
/// problems that are not hyperbolic (those fail the hyperbolicity check anyway).
Domain make_domain(const ProblemSpec& spec, double T, int nx, int nt, int depth, double speed_floor = 0.1);

/// n-component function sampled on a Grid. Storage is component-major, then
/// column, then row so each column's time series is contiguous.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int n, const Grid& grid, double fill = 0.0);

    int components() const { return n_; }
    const Grid& grid() const { return grid_; }

    double& at(int j, int i, int r) { return values_[index(j, i, r)]; }
    double at(int j, int i, int r) const { return values_[index(j, i, r)]; }

    /// Column time series of component j at column i.
    std::span<const double> column(int j, int i) const {
        return {values_.data() + index(j, i, 0), static_cast<std::size_t>(grid_.nt + 1)};
    }

    /// Piecewise-linear in t along column i; constant extension beyond +-t_pad.
    double sample(int j, int i, double t) const;
    double sample(int j, int i, const RowPosition& pos) const {
        const double* col = values_.data() + index(j, i, 0);
        if (pos.frac == 0.0) return col[pos.row];
        return (1.0 - pos.frac) * col[pos.row] + pos.frac * col[pos.row + 1];
    }

    double sup_norm() const;
    /// Sup over rows [r0, r1].
    double sup_norm(int r0, int r1) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    template <class F>
    static GridFunction from(int n, const Grid& g, F&& f) {
        GridFunction u(n, g);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= g.nx; ++i)
                for (int r = 0; r <= g.nt; ++r) u.at(j, i, r) = f(j, g.x(i), g.t(r));
        return u;
    }

private:
    std::size_t index(int j, int i, int r) const {
        return (static_cast<std::size_t>(j) * (grid_.nx + 1) + static_cast<std::size_t>(i)) * (grid_.nt + 1) +
               static_cast<std::size_t>(r);
    }

    int n_ = 0;
    Grid grid_;
    std::vector<double> values_;
};

/// Max |a - b| over rows [r0, r1].
double sup_distance(const GridFunction& a, const GridFunction& b, int r0, int r1);
double sup_distance(const GridFunction& a, const GridFunction& b);

/// Samples expressions (one per component) on the grid.
GridFunction sample_expressions(const std::vector<Expr>& exprs, const Grid& g);

}  // namespace hypstrip
