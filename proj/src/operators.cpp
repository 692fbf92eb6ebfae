#include "hypstrip/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypstrip/parallel.hpp"

namespace hypstrip {

double apply_R(const ProblemSpec& spec, const GridFunction& u, int j, double t, bool linear_only) {
    const BoundaryRow& row = spec.boundary.rows.at(j);
    double value = linear_only ? 0.0 : row.data.eval(0.0, t);
    const Grid& g = u.grid();
    for (const auto& term : row.terms) {
        const double at = t + term.shift;
        const RowPosition pos = locate(g, at);
        if (pos.clamped) {
            std::ostringstream os;
            os << "boundary operator reads u_" << term.source + 1 << " at t = " << at << " outside the padded domain";
            throw OperatorError(os.str());
        }
        value += term.weight.eval(0.0, t) * u.sample(term.source, side_column(term.side, g.nx), pos);
    }
    return value;
}

StripOperators::StripOperators(const ProblemSpec& spec, const Grid& grid, const OperatorOptions& opts)
    : spec_(spec),
      grid_(grid),
      n_(spec.n),
      comp_(spec.n),
      forcing_(spec.n, grid),
      data_(spec.n, grid),
      reflection_only_(opts.reflection_only) {
    spec_.validate();
    const int nx = grid_.nx;
    const int nt = grid_.nt;
    const std::size_t anchors = static_cast<std::size_t>(nx + 1) * (nt + 1);

    // Size check before allocating.
    std::size_t total = 0;
    for (int j = 0; j < n_; ++j) {
        Component& c = comp_[j];
        c.boundary_col = spec_.anchor_side(j) == Side::left ? 0 : nx;
        for (int k = 0; k < n_; ++k)
            if (k != j && !spec_.coupling[j][k].is_zero()) c.coupled.push_back(k);
        c.base.resize(nx + 1);
        std::size_t nodes = 0;
        for (int i = 0; i <= nx; ++i) {
            c.base[i] = nodes;
            nodes += static_cast<std::size_t>(node_count(j, i)) * (nt + 1);
        }
        if (!reflection_only_) total += nodes * sizeof(double) * (2 + c.coupled.size());
        total += anchors * 2 * sizeof(double);
    }
    if (total > opts.memory_limit) {
        std::ostringstream os;
        os << "characteristic cache needs " << total / (1 << 20) << " MiB, above the limit of "
           << opts.memory_limit / (1 << 20) << " MiB; reduce Nx or Nt";
        throw OperatorError(os.str());
    }
    bytes_ = total;

    const ColumnTracer tracer(spec_, nx, opts.trace);
    const double dx = grid_.dx();

    for (int j = 0; j < n_; ++j) {
        Component& c = comp_[j];
        const std::size_t nodes = c.base[nx] + static_cast<std::size_t>(node_count(j, nx)) * (nt + 1);
        if (!reflection_only_) {
            c.omega.assign(nodes, 0.0);
            c.dweight.assign(nodes, 0.0);
            c.cweight.assign(nodes * c.coupled.size(), 0.0);
        }
        c.tau.assign(anchors, 0.0);
        c.c_end.assign(anchors, 0.0);

        const Expr& a = spec_.speeds[j];
        const Expr& bjj = spec_.coupling[j][j];
        const Expr& f = spec_.forcing[j];
        const BoundaryRow& brow = spec_.boundary.rows[j];
        const double orient = j < spec_.m ? 1.0 : -1.0;
        const int ib = c.boundary_col;

        std::vector<std::vector<ReflectionEntry>> refl_rows(anchors);

        parallel_for(0, nx + 1, [&](int i) {
            const int count = node_count(j, i);
            const int step = ib >= i ? 1 : -1;
            std::vector<double> g(count);
            std::vector<double> local(count);
            for (int r = 0; r <= nt; ++r) {
                const std::size_t n0 = first_node(j, i, r);
                std::span<double> om = reflection_only_ ? std::span<double>(local)
                                                        : std::span<double>(c.omega.data() + n0, count);
                tracer.trace(j, i, ib, grid_.t(r), om);

                // log c_j(xi; x_i, t_r) by trapezoid from the anchor outward.
                double logc = 0.0;
                double forcing = 0.0;
                for (int q = 0; q < count; ++q) {
                    const double xi = grid_.x(i + q * step);
                    const double av = a.eval(xi, om[q]);
                    g[q] = bjj.is_zero() ? 0.0 : bjj.eval(xi, om[q]) / av;
                    if (q > 0) logc += 0.5 * (g[q - 1] + g[q]) * (step * dx);
                    const double trap = (count == 1) ? 0.0 : ((q == 0 || q == count - 1) ? 0.5 : 1.0);
                    const double dw = orient * trap * dx * std::exp(logc) / av;
                    if (!reflection_only_) {
                        c.dweight[n0 + q] = dw;
                        for (std::size_t kk = 0; kk < c.coupled.size(); ++kk)
                            c.cweight[(n0 + q) * c.coupled.size() + kk] =
                                -dw * spec_.coupling[j][c.coupled[kk]].eval(xi, om[q]);
                    }
                    if (dw != 0.0 && !f.is_zero()) forcing += dw * f.eval(xi, om[q]);
                }
                const std::size_t aidx = anchor_index(i, r);
                const double tau = om[count - 1];
                const double cend = std::exp(logc);
                c.tau[aidx] = tau;
                c.c_end[aidx] = cend;
                forcing_.at(j, i, r) = forcing;
                data_.at(j, i, r) = brow.data.is_zero() ? 0.0 : cend * brow.data.eval(0.0, tau);

                auto& entries = refl_rows[aidx];
                for (const auto& term : brow.terms) {
                    if (term.weight.is_zero()) continue;
                    ReflectionEntry e;
                    e.source = term.source;
                    e.column = side_column(term.side, nx);
                    e.pos = locate(grid_, tau + term.shift);
                    e.coef = cend * term.weight.eval(0.0, tau);
                    entries.push_back(e);
                }
            }
        });

        c.refl_start.assign(anchors + 1, 0);
        for (std::size_t k = 0; k < anchors; ++k) c.refl_start[k + 1] = c.refl_start[k] + refl_rows[k].size();
        c.refl.reserve(c.refl_start[anchors]);
        for (auto& row : refl_rows) c.refl.insert(c.refl.end(), row.begin(), row.end());
    }
}

std::span<const ReflectionEntry> StripOperators::reflection_entries(int j, int i, int r) const {
    const Component& c = comp_[j];
    const std::size_t a = anchor_index(i, r);
    return {c.refl.data() + c.refl_start[a], c.refl_start[a + 1] - c.refl_start[a]};
}

void StripOperators::require_full() const {
    if (reflection_only_) throw OperatorError("operator set was built with reflection_only; D and F are unavailable");
}

double StripOperators::c_value(int j, int i, int r, const GridFunction& v) const {
    double acc = 0.0;
    for (const auto& e : reflection_entries(j, i, r)) acc += e.coef * v.sample(e.source, e.column, e.pos);
    return acc;
}

double StripOperators::d_value(int j, int i, int r, const GridFunction& u) const {
    const Component& c = comp_[j];
    if (c.coupled.empty()) return 0.0;
    const int count = node_count(j, i);
    const int step = c.boundary_col >= i ? 1 : -1;
    const std::size_t n0 = first_node(j, i, r);
    const std::size_t nk = c.coupled.size();
    double acc = 0.0;
    for (int q = 0; q < count; ++q) {
        const std::size_t node = n0 + q;
        if (c.dweight[node] == 0.0) continue;
        const RowPosition pos = locate(grid_, c.omega[node]);
        const int col = i + q * step;
        for (std::size_t kk = 0; kk < nk; ++kk) acc += c.cweight[node * nk + kk] * u.sample(c.coupled[kk], col, pos);
    }
    return acc;
}

double StripOperators::f_value(int j, int i, int r, const GridFunction& f) const {
    const Component& c = comp_[j];
    const int count = node_count(j, i);
    const int step = c.boundary_col >= i ? 1 : -1;
    const std::size_t n0 = first_node(j, i, r);
    double acc = 0.0;
    for (int q = 0; q < count; ++q) {
        const std::size_t node = n0 + q;
        if (c.dweight[node] == 0.0) continue;
        acc += c.dweight[node] * f.sample(j, i + q * step, locate(grid_, c.omega[node]));
    }
    return acc;
}

namespace {

// Columns per worker so that a thread gets a few thousand anchors at least.
int row_grain(int r0, int r1) { return std::max(1, 4096 / std::max(1, r1 - r0 + 1)); }

}  // namespace

void StripOperators::apply_C(const GridFunction& v, GridFunction& out, int r0, int r1) const {
    for (int j = 0; j < n_; ++j)
        parallel_for(0, grid_.nx + 1, [&](int i) {
            for (int r = r0; r <= r1; ++r) out.at(j, i, r) = c_value(j, i, r, v);
        }, row_grain(r0, r1));
}

void StripOperators::apply_D(const GridFunction& u, GridFunction& out, int r0, int r1) const {
    require_full();
    for (int j = 0; j < n_; ++j)
        parallel_for(0, grid_.nx + 1, [&](int i) {
            for (int r = r0; r <= r1; ++r) out.at(j, i, r) = d_value(j, i, r, u);
        }, row_grain(r0, r1));
}

GridFunction StripOperators::apply_C(const GridFunction& v) const {
    GridFunction out(n_, grid_);
    apply_C(v, out, 0, grid_.nt);
    return out;
}

GridFunction StripOperators::apply_D(const GridFunction& u) const {
    GridFunction out(n_, grid_);
    apply_D(u, out, 0, grid_.nt);
    return out;
}

GridFunction StripOperators::apply_F(const GridFunction& f) const {
    require_full();
    GridFunction out(n_, grid_);
    for (int j = 0; j < n_; ++j)
        parallel_for(0, grid_.nx + 1, [&](int i) {
            for (int r = 0; r <= grid_.nt; ++r) out.at(j, i, r) = f_value(j, i, r, f);
        });
    return out;
}

void StripOperators::apply_fixed_point(const GridFunction& u, GridFunction& out, int r0, int r1) const {
    require_full();
    for (int j = 0; j < n_; ++j)
        parallel_for(0, grid_.nx + 1, [&](int i) {
            for (int r = r0; r <= r1; ++r)
                out.at(j, i, r) = c_value(j, i, r, u) + d_value(j, i, r, u) + forcing_.at(j, i, r) + data_.at(j, i, r);
        }, row_grain(r0, r1));
}

double StripOperators::d_norm_bound() const {
    require_full();
    double bound = 0.0;
    for (int j = 0; j < n_; ++j) {
        const Component& c = comp_[j];
        const std::size_t nk = c.coupled.size();
        if (nk == 0) continue;
        for (int i = 0; i <= grid_.nx; ++i)
            for (int r = 0; r <= grid_.nt; ++r) {
                const std::size_t n0 = first_node(j, i, r);
                double row = 0.0;
                for (int q = 0; q < node_count(j, i); ++q)
                    for (std::size_t kk = 0; kk < nk; ++kk) row += std::abs(c.cweight[(n0 + q) * nk + kk]);
                bound = std::max(bound, row);
            }
    }
    return bound;
}

// ---------------------------------------------------------------------------

namespace {

struct PathNodes {
    std::vector<double> omega;
    std::vector<double> d;  // d at each node, relative to the path's anchor
};

// Traces component j from column `from` at time t to its boundary column and
// evaluates d_j along the way.
void trace_with_density(const ProblemSpec& spec, const ColumnTracer& tracer, const Grid& grid, int j, int from, double t,
                        PathNodes& out) {
    const int to = spec.anchor_side(j) == Side::left ? 0 : grid.nx;
    const int count = std::abs(to - from) + 1;
    const int step = to >= from ? 1 : -1;
    out.omega.resize(count);
    out.d.resize(count);
    tracer.trace(j, from, to, t, out.omega);
    const Expr& a = spec.speeds[j];
    const Expr& b = spec.coupling[j][j];
    double logc = 0.0;
    double prev = 0.0;
    for (int q = 0; q < count; ++q) {
        const double xi = grid.x(from + q * step);
        const double av = a.eval(xi, out.omega[q]);
        const double g = b.is_zero() ? 0.0 : b.eval(xi, out.omega[q]) / av;
        if (q > 0) logc += 0.5 * (prev + g) * (step * grid.dx());
        prev = g;
        out.d[q] = std::exp(logc) / av;
    }
}

// Trapezoid weight of column p on the ascending column range [lo, hi].
double trap(int p, int lo, int hi) {
    if (lo >= hi) return 0.0;
    return (p == lo || p == hi) ? 0.5 : 1.0;
}

}  // namespace

GridFunction apply_D2_direct(const ProblemSpec& spec, const Grid& grid, const GridFunction& u, const TraceOptions& opts) {
    spec.validate();
    const int n = spec.n;
    const int nx = grid.nx;
    const double dx = grid.dx();
    const ColumnTracer tracer(spec, nx, opts);
    GridFunction out(n, grid);

    for (int j = 0; j < n; ++j) {
        const bool j_left = spec.anchor_side(j) == Side::left;
        parallel_for(0, nx + 1, [&](int i) {
            PathNodes jp;
            PathNodes kp;
            // G[p][q]: integrand at xi = column p, eta = column q.
            std::vector<double> G(static_cast<std::size_t>(nx + 1) * (nx + 1), 0.0);
            auto at = [&](int p, int q) -> double& { return G[static_cast<std::size_t>(p) * (nx + 1) + q]; };

            for (int r = 0; r <= grid.nt; ++r) {
                trace_with_density(spec, tracer, grid, j, i, grid.t(r), jp);
                const int jstep = j_left ? -1 : 1;
                const int jcount = static_cast<int>(jp.omega.size());
                double total = 0.0;

                for (int k = 0; k < n; ++k) {
                    if (k == j || spec.coupling[j][k].is_zero()) continue;
                    const bool k_left = spec.anchor_side(k) == Side::left;
                    const int kstep = k_left ? -1 : 1;

                    for (int s = 0; s < jcount; ++s) {
                        const int p = i + s * jstep;
                        const double xi = grid.x(p);
                        const double bjk = spec.coupling[j][k].eval(xi, jp.omega[s]);
                        trace_with_density(spec, tracer, grid, k, p, jp.omega[s], kp);
                        for (int w = 0; w < static_cast<int>(kp.omega.size()); ++w) {
                            const int q = p + w * kstep;
                            const double eta = grid.x(q);
                            const RowPosition pos = locate(grid, kp.omega[w]);
                            double sum = 0.0;
                            for (int l = 0; l < n; ++l) {
                                if (l == k || spec.coupling[k][l].is_zero()) continue;
                                sum += spec.coupling[k][l].eval(eta, kp.omega[w]) * u.sample(l, q, pos);
                            }
                            at(p, q) = jp.d[s] * bjk * kp.d[w] * sum;
                        }
                    }

                    // eta outer, xi inner, over the region {xi between x_j and x, eta between x_k and xi}.
                    double acc = 0.0;
                    double sign = 1.0;
                    if (j_left && k_left) {
                        for (int q = 0; q <= i; ++q) {
                            double inner = 0.0;
                            for (int p = q; p <= i; ++p) inner += trap(p, q, i) * at(p, q);
                            acc += trap(q, 0, i) * inner;
                        }
                    } else if (!j_left && !k_left) {
                        for (int q = i; q <= nx; ++q) {
                            double inner = 0.0;
                            for (int p = i; p <= q; ++p) inner += trap(p, i, q) * at(p, q);
                            acc += trap(q, i, nx) * inner;
                        }
                    } else if (j_left) {
                        sign = -1.0;
                        for (int q = 0; q <= nx; ++q) {
                            const int hi = std::min(q, i);
                            double inner = 0.0;
                            for (int p = 0; p <= hi; ++p) inner += trap(p, 0, hi) * at(p, q);
                            acc += trap(q, 0, nx) * inner;
                        }
                    } else {
                        sign = -1.0;
                        for (int q = 0; q <= nx; ++q) {
                            const int lo = std::max(q, i);
                            double inner = 0.0;
                            for (int p = lo; p <= nx; ++p) inner += trap(p, lo, nx) * at(p, q);
                            acc += trap(q, 0, nx) * inner;
                        }
                    }
                    total += sign * acc * dx * dx;
                }
                out.at(j, i, r) = total;
            }
        });
    }
    return out;
}

}  // namespace hypstrip
