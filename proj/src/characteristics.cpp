#include "hypstrip/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypstrip {

namespace {

double inverse_speed(const Expr& a, double xi, double omega, double a_min, int j) {
    const double v = a.eval(xi, omega);
    if (!(std::abs(v) >= a_min)) {
        std::ostringstream os;
        os << "hyperbolicity violated on characteristic " << j + 1 << ": |a| = " << std::abs(v) << " < " << a_min
           << " at (x, t) = (" << xi << ", " << omega << ")";
        throw TraceError(os.str());
    }
    return 1.0 / v;
}

double rk4_step(const Expr& a, double xi, double h, double omega, double a_min, int j) {
    const double k1 = inverse_speed(a, xi, omega, a_min, j);
    const double k2 = inverse_speed(a, xi + 0.5 * h, omega + 0.5 * h * k1, a_min, j);
    const double k3 = inverse_speed(a, xi + 0.5 * h, omega + 0.5 * h * k2, a_min, j);
    const double k4 = inverse_speed(a, xi + h, omega + h * k3, a_min, j);
    return omega + h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0;
}

double advance(const Expr& a, double from, double to, double omega, int substeps, double a_min, int j) {
    const double h = (to - from) / substeps;
    for (int s = 0; s < substeps; ++s) omega = rk4_step(a, from + s * h, h, omega, a_min, j);
    return omega;
}

}  // namespace

std::size_t CharacteristicPath::node_index(double at) const {
    const auto it = std::lower_bound(xi.begin(), xi.end(), at);
    if (it == xi.end() || *it != at) throw std::out_of_range("xi is not a node of the characteristic path");
    return static_cast<std::size_t>(it - xi.begin());
}

CharacteristicPath trace(const ProblemSpec& spec, int j, double x, double t, std::span<const double> xi_nodes,
                         const TraceOptions& opts) {
    if (j < 0 || j >= spec.n) throw TraceError("component index out of range");
    if (opts.substeps < 1) throw TraceError("substeps must be positive");
    if (!std::is_sorted(xi_nodes.begin(), xi_nodes.end())) throw TraceError("xi nodes must be ascending");
    for (double xi : xi_nodes)
        if (xi < 0.0 || xi > 1.0) throw TraceError("xi nodes must lie in [0, 1]");

    CharacteristicPath path;
    path.component = j;
    path.x = x;
    path.t = t;
    path.xi.assign(xi_nodes.begin(), xi_nodes.end());
    path.xi.erase(std::unique(path.xi.begin(), path.xi.end()), path.xi.end());
    auto at = std::lower_bound(path.xi.begin(), path.xi.end(), x);
    if (at == path.xi.end() || *at != x) at = path.xi.insert(at, x);
    path.anchor = static_cast<std::size_t>(at - path.xi.begin());
    path.omega.assign(path.xi.size(), 0.0);
    path.omega[path.anchor] = t;

    const Expr& a = spec.speeds[j];
    path.direction = inverse_speed(a, x, t, opts.a_min, j) > 0.0 ? 1 : -1;
    for (std::size_t i = path.anchor + 1; i < path.xi.size(); ++i)
        path.omega[i] = advance(a, path.xi[i - 1], path.xi[i], path.omega[i - 1], opts.substeps, opts.a_min, j);
    for (std::size_t i = path.anchor; i-- > 0;)
        path.omega[i] = advance(a, path.xi[i + 1], path.xi[i], path.omega[i + 1], opts.substeps, opts.a_min, j);

    if (opts.window) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (path.omega[i] < opts.window->first || path.omega[i] > opts.window->second) {
                std::ostringstream os;
                os << "characteristic " << j + 1 << " leaves the time window [" << opts.window->first << ", "
                   << opts.window->second << "] at xi = " << path.xi[i] << " (t = " << path.omega[i] << ")";
                throw TraceError(os.str());
            }
        }
    }
    return path;
}

std::vector<double> uniform_nodes(double from, double to, int cells) {
    const double lo = std::min(from, to);
    const double hi = std::max(from, to);
    std::vector<double> out(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) out[i] = lo + (hi - lo) * i / cells;
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

// exp( int_xi^x (d_t a / a^2)(eta, omega(eta)) d eta ) by trapezoid over path nodes.
double transport_factor(const ProblemSpec& spec, int j, double xi, double x, double t, const DerivativeOptions& opts) {
    if (xi == x) return 1.0;
    const Expr& a = spec.speeds[j];
    const Expr a_t = a.diff(Var::t);
    const auto nodes = uniform_nodes(xi, x, opts.cells);
    const auto path = trace(spec, j, x, t, nodes, opts.trace);
    std::vector<double> g(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double av = a.eval(path.xi[i], path.omega[i]);
        g[i] = a_t.eval(path.xi[i], path.omega[i]) / (av * av);
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) integral += 0.5 * (g[i] + g[i + 1]) * (path.xi[i + 1] - path.xi[i]);
    // Nodes are ascending, so the sum is int over [min, max]; orient it from xi to x.
    if (xi > x) integral = -integral;
    return std::exp(integral);
}

}  // namespace

double domega_dt(const ProblemSpec& spec, int j, double xi, double x, double t, const DerivativeOptions& opts) {
    return transport_factor(spec, j, xi, x, t, opts);
}

double domega_dx(const ProblemSpec& spec, int j, double xi, double x, double t, const DerivativeOptions& opts) {
    const double a = spec.speeds[j].eval(x, t);
    return -transport_factor(spec, j, xi, x, t, opts) / a;
}

// ---------------------------------------------------------------------------

ColumnTracer::ColumnTracer(const ProblemSpec& spec, int nx, const TraceOptions& opts)
    : spec_(&spec), nx_(nx), opts_(opts), travel_(spec.n) {
    for (int j = 0; j < spec.n; ++j) {
        if (spec.speeds[j].depends_on(Var::t)) continue;
        std::vector<double> s(nx + 1, 0.0);
        for (int i = 0; i < nx; ++i) s[i + 1] = rk4_cell(j, i, i + 1, s[i]);
        travel_[j] = std::move(s);
    }
}

double ColumnTracer::rk4_cell(int j, int from_col, int to_col, double omega) const {
    return advance(spec_->speeds[j], static_cast<double>(from_col) / nx_, static_cast<double>(to_col) / nx_, omega,
                   opts_.substeps, opts_.a_min, j);
}

void ColumnTracer::trace(int j, int from, int to, double t, std::span<double> out) const {
    const int step = to >= from ? 1 : -1;
    const int count = std::abs(to - from) + 1;
    if (static_cast<int>(out.size()) < count) throw TraceError("output span too small for traced columns");
    if (travel_[j]) {
        const auto& s = *travel_[j];
        for (int c = 0; c < count; ++c) out[c] = t + (s[from + c * step] - s[from]);
        return;
    }
    out[0] = t;
    for (int c = 1; c < count; ++c) {
        const int col = from + (c - 1) * step;
        out[c] = rk4_cell(j, col, col + step, out[c - 1]);
    }
}

}  // namespace hypstrip
