#include "hypstrip/grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hypstrip {

std::pair<int, int> Grid::rows_within(double limit) const {
    int first = nt + 1;
    int last = -1;
    // Small slack so that rows landing on +-limit up to rounding are kept.
    const double eps = 1e-12 * std::max(1.0, limit);
    for (int r = 0; r <= nt; ++r) {
        if (std::abs(t(r)) <= limit + eps) {
            first = std::min(first, r);
            last = std::max(last, r);
        }
    }
    return {first, last};
}

RowPosition locate(const Grid& g, double t) {
    RowPosition p;
    const double s = (t + g.t_pad) / g.dt();
    if (!(s > 0.0)) {
        p.row = 0;
        p.clamped = s < 0.0;
        return p;
    }
    if (s >= g.nt) {
        p.row = g.nt;
        p.clamped = s > g.nt;
        return p;
    }
    p.row = static_cast<int>(s);
    p.frac = s - p.row;
    return p;
}

Domain make_domain(const ProblemSpec& spec, double T, int nx, int nt, int depth, double speed_floor) {
    if (!(T > 0.0)) throw ProblemError("domain half-width T must be positive");
    if (nx < 2 || nt < 2) throw ProblemError("grid needs Nx >= 2 and Nt >= 2");
    if (depth < 0) throw ProblemError("padding depth must be non-negative");
    Domain d;
    d.T = T;
    d.nx = nx;
    d.nt = nt;
    d.depth = depth;
    d.shift_max = spec.boundary.max_shift();

    double a_inf = std::numeric_limits<double>::infinity();
    double t_pad = T;
    // The padding depends on a_inf and a_inf is sampled on the padded domain.
    for (int pass = 0; pass < 4; ++pass) {
        for (int j = 0; j < spec.n; ++j) {
            const Expr& a = spec.speeds[j];
            const int sx = 2 * nx;
            const int st = a.depends_on(Var::t) ? 2 * nt : 0;
            for (int p = 0; p <= sx; ++p) {
                const double x = static_cast<double>(p) / sx;
                for (int q = 0; q <= st; ++q) {
                    const double t = st ? -t_pad + 2.0 * t_pad * q / st : 0.0;
                    a_inf = std::min(a_inf, std::abs(a.eval(x, t)));
                }
            }
        }
        const double next = T + depth * (1.0 / std::max(a_inf, speed_floor) + d.shift_max);
        if (next <= t_pad) break;
        t_pad = next;
    }
    d.a_inf = a_inf;
    d.t_pad = t_pad;
    return d;
}

GridFunction::GridFunction(int n, const Grid& grid, double fill)
    : n_(n), grid_(grid), values_(static_cast<std::size_t>(n) * (grid.nx + 1) * (grid.nt + 1), fill) {}

double GridFunction::sample(int j, int i, double t) const { return sample(j, i, locate(grid_, t)); }

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::sup_norm(int r0, int r1) const {
    double m = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i <= grid_.nx; ++i)
            for (int r = r0; r <= r1; ++r) m = std::max(m, std::abs(at(j, i, r)));
    return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b, int r0, int r1) {
    if (a.components() != b.components() || !(a.grid() == b.grid()))
        throw std::invalid_argument("grid functions have different shapes");
    double m = 0.0;
    const Grid& g = a.grid();
    for (int j = 0; j < a.components(); ++j)
        for (int i = 0; i <= g.nx; ++i)
            for (int r = r0; r <= r1; ++r) m = std::max(m, std::abs(a.at(j, i, r) - b.at(j, i, r)));
    return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
    return sup_distance(a, b, 0, a.grid().nt);
}

GridFunction sample_expressions(const std::vector<Expr>& exprs, const Grid& g) {
    const int n = static_cast<int>(exprs.size());
    return GridFunction::from(n, g, [&](int j, double x, double t) { return exprs[j].eval(x, t); });
}

}  // namespace hypstrip
