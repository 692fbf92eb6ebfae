#pragma once

// Characteristic curves xi -> omega_j(xi; x, t), the solutions of
//   d omega / d xi = 1 / a_j(xi, omega),   omega(x) = t,
// integrated with classic RK4 at a fixed number of substeps per node interval.

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hypstrip/problem.hpp"

namespace hypstrip {

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TraceOptions {
    int substeps = 4;
    double a_min = 1e-6;
    /// When set, node times must stay inside [first, second].
    std::optional<std::pair<double, double>> window;
};

struct CharacteristicPath {
    int component = 0;
    double x = 0.0;
    double t = 0.0;
    std::vector<double> xi;     // ascending, includes the anchor x
    std::vector<double> omega;  // omega(xi[i])
    std::size_t anchor = 0;     // xi[anchor] == x, omega[anchor] == t
    int direction = 1;          // sign of a_j along the path

    std::size_t size() const { return xi.size(); }
    /// Index of the node at xi, or throws std::out_of_range.
    std::size_t node_index(double at) const;
};

/// Traces component j through (x, t) over the given ascending nodes in [0, 1].
/// The anchor x is inserted when it is not already a node.
CharacteristicPath trace(const ProblemSpec& spec, int j, double x, double t, std::span<const double> xi_nodes,
                         const TraceOptions& opts = {});

/// cells + 1 equally spaced points from `from` to `to` (either orientation), sorted ascending.
std::vector<double> uniform_nodes(double from, double to, int cells);

struct DerivativeOptions {
    TraceOptions trace;
    int cells = 128;  // path nodes between xi and x
};

/// d omega_j(xi; x, t) / dx = -(1 / a_j(x, t)) exp( int_xi^x (d_t a_j / a_j^2)(eta, omega_j(eta)) d eta ).
double domega_dx(const ProblemSpec& spec, int j, double xi, double x, double t, const DerivativeOptions& opts = {});

/// d omega_j(xi; x, t) / dt = exp( int_xi^x (d_t a_j / a_j^2)(eta, omega_j(eta)) d eta ).
double domega_dt(const ProblemSpec& spec, int j, double xi, double x, double t, const DerivativeOptions& opts = {});

/// Column-aligned tracer used by the grid operators. Speeds that do not depend
/// on t are integrated once per column into a travel-time prefix; the node
/// times are then t + S(to) - S(from), identical to per-anchor RK4 up to rounding.
class ColumnTracer {
public:
    ColumnTracer(const ProblemSpec& spec, int nx, const TraceOptions& opts = {});

    /// Writes omega at columns from, from +- 1, ..., to (inclusive) into out.
    void trace(int j, int from, int to, double t, std::span<double> out) const;

    int nx() const { return nx_; }

private:
    double rk4_cell(int j, int from_col, int to_col, double omega) const;

    const ProblemSpec* spec_;
    int nx_;
    TraceOptions opts_;
    std::vector<std::optional<std::vector<double>>> travel_;  // S_j at columns
};

}  // namespace hypstrip
