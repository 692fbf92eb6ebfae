#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypstrip/expr.hpp"

namespace hypstrip {

/// Thrown for structurally invalid problem descriptions.
class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Side { left, right };  // x = 0, x = 1

inline int side_column(Side s, int nx) { return s == Side::left ? 0 : nx; }
inline double side_x(Side s) { return s == Side::left ? 0.0 : 1.0; }

/// One reflection term w(t) * u_k(side, t + shift) of a boundary operator row.
struct ReflectionTerm {
    int source = 0;  // k, 0-based
    Expr weight;
    double shift = 0.0;
    Side side = Side::left;
};

/// (Ru)_j(t) = data_j(t) + sum_terms w_jk(t) u_k(side, t + shift).
struct BoundaryRow {
    Expr data;
    std::vector<ReflectionTerm> terms;
};

struct BoundaryOperatorSpec {
    std::vector<BoundaryRow> rows;

    double max_shift() const;
    bool is_linear_zero() const;
};

/// Symbolic description of
///   d_t u_j + a_j d_x u_j + sum_k b_jk u_k = f_j   on (0,1) x R,
///   u_j(0,t) = (Ru)_j(t), j < m;  u_j(1,t) = (Ru)_j(t), j >= m.
/// Indices are 0-based here; problem files use 1-based numbering.
struct ProblemSpec {
    int n = 0;
    int m = 0;
    std::vector<Expr> speeds;
    std::vector<std::vector<Expr>> coupling;  // n x n, zero where absent
    std::vector<std::vector<std::optional<Expr>>> factor;  // optional b~_jk
    std::vector<Expr> forcing;
    BoundaryOperatorSpec boundary;

    static ProblemSpec zeros(int n, int m);

    /// Boundary anchor x_j: 0 for j < m, 1 otherwise.
    double anchor(int j) const { return j < m ? 0.0 : 1.0; }
    Side anchor_side(int j) const { return j < m ? Side::left : Side::right; }

    /// Validates dimensions and component references; throws ProblemError.
    void validate() const;

    bool has_off_diagonal_coupling() const;
};

}  // namespace hypstrip
