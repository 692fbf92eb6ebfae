#include "hypstrip/problem.hpp"

#include <algorithm>
#include <cmath>

namespace hypstrip {

double BoundaryOperatorSpec::max_shift() const {
    double s = 0.0;
    for (const auto& row : rows)
        for (const auto& term : row.terms) s = std::max(s, std::abs(term.shift));
    return s;
}

bool BoundaryOperatorSpec::is_linear_zero() const {
    for (const auto& row : rows)
        for (const auto& term : row.terms)
            if (!term.weight.is_zero()) return false;
    return true;
}

ProblemSpec ProblemSpec::zeros(int n, int m) {
    ProblemSpec p;
    p.n = n;
    p.m = m;
    p.speeds.assign(n, Expr(1.0));
    p.coupling.assign(n, std::vector<Expr>(n, Expr(0.0)));
    p.factor.assign(n, std::vector<std::optional<Expr>>(n));
    p.forcing.assign(n, Expr(0.0));
    p.boundary.rows.assign(n, BoundaryRow{});
    return p;
}

void ProblemSpec::validate() const {
    if (n < 1) throw ProblemError("system needs n >= 1 components");
    if (m < 0 || m > n) throw ProblemError("m must satisfy 0 <= m <= n");
    const auto un = static_cast<std::size_t>(n);
    if (speeds.size() != un || forcing.size() != un || coupling.size() != un || factor.size() != un ||
        boundary.rows.size() != un)
        throw ProblemError("coefficient tables do not match n");
    for (int j = 0; j < n; ++j) {
        if (coupling[j].size() != un || factor[j].size() != un)
            throw ProblemError("coupling row " + std::to_string(j + 1) + " does not match n");
        if (boundary.rows[j].data.depends_on(Var::x))
            throw ProblemError("boundary data of row " + std::to_string(j + 1) + " may depend on t only");
        for (const auto& term : boundary.rows[j].terms) {
            if (term.weight.depends_on(Var::x))
                throw ProblemError("boundary weight in row " + std::to_string(j + 1) + " may depend on t only");
            if (term.source < 0 || term.source >= n)
                throw ProblemError("boundary row " + std::to_string(j + 1) + " references component " +
                                   std::to_string(term.source + 1) + " outside 1.." + std::to_string(n));
            if (!std::isfinite(term.shift))
                throw ProblemError("boundary row " + std::to_string(j + 1) + " has a non-finite shift");
        }
    }
}

bool ProblemSpec::has_off_diagonal_coupling() const {
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (j != k && !coupling[j][k].is_zero()) return true;
    return false;
}

}  // namespace hypstrip
