#pragma once

// Grid realizations of the characteristic integral operators
//
//   (Cv)_j(x,t) = c_j(x_j; x, t) (R_lin v)_j(omega_j(x_j)),
//   (Du)_j(x,t) = -int_{x_j}^x d_j(xi) sum_{k != j} b_jk(xi, omega_j(xi)) u_k(xi, omega_j(xi)) dxi,
//   (Ff)_j(x,t) =  int_{x_j}^x d_j(xi) f_j(xi, omega_j(xi)) dxi,
//
// with x_j = 0 for j < m and x_j = 1 otherwise. Path nodes are the grid
// columns; integrals use the trapezoid rule and u is interpolated linearly in t.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hypstrip/characteristics.hpp"
#include "hypstrip/grid.hpp"

namespace hypstrip {

class OperatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OperatorOptions {
    TraceOptions trace;
    std::size_t memory_limit = std::size_t{3} << 30;  // bytes of cached path data
    /// Keep only the boundary part (C and the data term); D and apply_F are unavailable.
    bool reflection_only = false;
};

/// One entry of the linear boundary part: coef * v_k(column, pos).
struct ReflectionEntry {
    int source = 0;
    int column = 0;
    RowPosition pos;
    double coef = 0.0;
};

/// (Ru)_j(t) evaluated on a grid function; the data part is skipped when linear_only.
double apply_R(const ProblemSpec& spec, const GridFunction& u, int j, double t, bool linear_only);

/// Characteristic geometry and quadrature weights for every grid anchor,
/// computed once per (problem, grid) and reused by every operator application.
class StripOperators {
public:
    StripOperators(const ProblemSpec& spec, const Grid& grid, const OperatorOptions& opts = {});

    const Grid& grid() const { return grid_; }
    int components() const { return n_; }
    const ProblemSpec& spec() const { return spec_; }

    // Row-restricted applications write rows [r0, r1] of `out` and leave the rest untouched.
    void apply_C(const GridFunction& v, GridFunction& out, int r0, int r1) const;
    void apply_D(const GridFunction& u, GridFunction& out, int r0, int r1) const;
    GridFunction apply_C(const GridFunction& v) const;
    GridFunction apply_D(const GridFunction& u) const;
    /// F applied to a sampled forcing (interpolated in t like u).
    GridFunction apply_F(const GridFunction& f) const;

    /// F applied to the problem's forcing expressions, evaluated exactly at path nodes.
    const GridFunction& forcing_term() const { return forcing_; }
    /// c_j(x_j; x, t) * data_j(omega_j(x_j)): the affine part of R carried along characteristics.
    const GridFunction& data_term() const { return data_; }

    /// out = Cu + Du + Ff + data on rows [r0, r1].
    void apply_fixed_point(const GridFunction& u, GridFunction& out, int r0, int r1) const;

    /// Max over anchors of the absolute row sum of the discrete D.
    double d_norm_bound() const;

    /// Linear boundary entries feeding (Cv)_j at anchor (i, r).
    std::span<const ReflectionEntry> reflection_entries(int j, int i, int r) const;
    /// omega_j(x_j; x_i, t_r) and c_j(x_j; x_i, t_r).
    double boundary_time(int j, int i, int r) const { return comp_[j].tau[anchor_index(i, r)]; }
    double boundary_weight(int j, int i, int r) const { return comp_[j].c_end[anchor_index(i, r)]; }

    std::size_t cached_bytes() const { return bytes_; }

private:
    struct Component {
        int boundary_col = 0;
        std::vector<int> coupled;          // k != j with b_jk not identically zero
        std::vector<std::size_t> base;     // first node of column i's anchors
        std::vector<double> omega;         // node times
        std::vector<double> dweight;       // oriented trapezoid weight * d_j
        std::vector<double> cweight;       // node-major, |coupled| per node: -dweight * b_jk
        std::vector<double> tau;           // per anchor
        std::vector<double> c_end;         // per anchor
        std::vector<std::size_t> refl_start;  // per anchor, size anchors + 1
        std::vector<ReflectionEntry> refl;
    };

    std::size_t anchor_index(int i, int r) const {
        return static_cast<std::size_t>(i) * (grid_.nt + 1) + static_cast<std::size_t>(r);
    }
    int node_count(int j, int i) const { return std::abs(comp_[j].boundary_col - i) + 1; }
    std::size_t first_node(int j, int i, int r) const {
        return comp_[j].base[i] + static_cast<std::size_t>(r) * node_count(j, i);
    }
    double d_value(int j, int i, int r, const GridFunction& u) const;
    double f_value(int j, int i, int r, const GridFunction& f) const;
    double c_value(int j, int i, int r, const GridFunction& v) const;
    void require_full() const;

    ProblemSpec spec_;
    Grid grid_;
    int n_;
    std::vector<Component> comp_;
    GridFunction forcing_;
    GridFunction data_;
    std::size_t bytes_ = 0;
    bool reflection_only_ = false;
};

/// D^2 evaluated as the double integral over (xi, eta) with the inner
/// characteristic omega_k(eta; xi, omega_j(xi)) traced exactly (no
/// interpolation of Du), integrated in the order eta-outer, xi-inner.
GridFunction apply_D2_direct(const ProblemSpec& spec, const Grid& grid, const GridFunction& u,
                             const TraceOptions& opts = {});

}  // namespace hypstrip
