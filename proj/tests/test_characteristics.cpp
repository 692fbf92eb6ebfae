#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hypstrip/characteristics.hpp"

using namespace hypstrip;

namespace {

ProblemSpec scalar(const std::string& speed, int m = 1) {
    ProblemSpec p = ProblemSpec::zeros(1, m);
    p.speeds[0] = parse(speed);
    return p;
}

// Independent fine-step RK4 for d omega / d xi = 1 / a(xi, omega).
double oracle_omega(const std::function<double(double, double)>& a, double x, double t, double xi, int steps) {
    const double h = (xi - x) / steps;
    double w = t;
    for (int s = 0; s < steps; ++s) {
        const double e = x + s * h;
        const double k1 = 1.0 / a(e, w);
        const double k2 = 1.0 / a(e + h / 2, w + h / 2 * k1);
        const double k3 = 1.0 / a(e + h / 2, w + h / 2 * k2);
        const double k4 = 1.0 / a(e + h, w + h * k3);
        w += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
    }
    return w;
}

double omega_at(const ProblemSpec& p, int j, double x, double t, double xi, int cells = 64, int substeps = 4) {
    const auto nodes = uniform_nodes(std::min(x, xi), std::max(x, xi), cells);
    TraceOptions o;
    o.substeps = substeps;
    const auto path = trace(p, j, x, t, nodes, o);
    return path.omega[path.node_index(xi)];
}

}  // namespace

TEST_CASE("constant speeds give straight characteristics") {
    const ProblemSpec p = scalar("2/pi");
    const auto nodes = uniform_nodes(0.0, 1.0, 10);
    const auto path = trace(p, 0, 0.5, 0.0, nodes);
    CHECK(path.omega[path.node_index(0.5)] == 0.0);
    for (std::size_t i = 0; i < path.size(); ++i)
        CHECK(path.omega[i] == doctest::Approx(std::numbers::pi / 2 * (path.xi[i] - 0.5)).epsilon(1e-13));
    CHECK(path.omega.back() == doctest::Approx(0.7853981634).epsilon(1e-10));
    CHECK(path.direction == 1);

    const ProblemSpec unit = scalar("1");
    CHECK(omega_at(unit, 0, 0.0, 3.0, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("anchor not among the nodes is inserted") {
    const ProblemSpec p = scalar("1");
    const std::vector<double> nodes{0.0, 0.5, 1.0};
    const auto path = trace(p, 0, 0.3, 1.0, nodes);
    CHECK(path.size() == 4);
    CHECK(path.xi[path.anchor] == 0.3);
    CHECK(path.omega[path.anchor] == 1.0);
    CHECK(path.omega[0] == doctest::Approx(0.7));
}

TEST_CASE("variable speed agrees with a fine-step oracle") {
    const ProblemSpec p = scalar("2 + 0.5*sin(t)");
    const auto a = [](double, double t) { return 2 + 0.5 * std::sin(t); };
    const double ref = oracle_omega(a, 0.0, 0.0, 1.0, 1000000);
    CHECK(std::abs(omega_at(p, 0, 0.0, 0.0, 1.0) - ref) < 1e-8);

    const ProblemSpec q = scalar("-(1.5 + 0.3*cos(x + t))", 0);
    const auto b = [](double x, double t) { return -(1.5 + 0.3 * std::cos(x + t)); };
    const double ref2 = oracle_omega(b, 0.7, 1.3, 0.0, 1000000);
    CHECK(std::abs(omega_at(q, 0, 0.7, 1.3, 0.0) - ref2) < 1e-8);
}

TEST_CASE("paths are monotone in the direction of the speed sign") {
    const ProblemSpec pos = scalar("1 + 0.5*sin(x*t)");
    const ProblemSpec neg = scalar("-(1 + 0.5*sin(x*t))", 0);
    const auto nodes = uniform_nodes(0.0, 1.0, 50);
    const auto up = trace(pos, 0, 0.4, 2.0, nodes);
    const auto down = trace(neg, 0, 0.4, 2.0, nodes);
    CHECK(down.direction == -1);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        CHECK(up.omega[i] > up.omega[i - 1]);
        CHECK(down.omega[i] < down.omega[i - 1]);
    }
    // Travel time to the anchor boundary is at most 1 / inf |a| = 2.
    CHECK(std::abs(up.omega.front() - 2.0) <= 2.0);
    CHECK(std::abs(down.omega.back() - 2.0) <= 2.0);
}

TEST_CASE("semigroup property with fourth-order error in the substep") {
    const ProblemSpec p = scalar("1.2 + 0.8*sin(3*t + x)");
    const double x = 0.9, t = 0.4, xi = 0.5, zeta = 0.0;
    auto defect = [&](int substeps) {
        const double w_xi = omega_at(p, 0, x, t, xi, 1, substeps);
        const double direct = omega_at(p, 0, x, t, zeta, 1, substeps);
        const double composed = omega_at(p, 0, xi, w_xi, zeta, 1, substeps);
        return std::abs(direct - composed);
    };
    const double e2 = defect(2);
    const double e4 = defect(4);
    CHECK(e4 < 1e-4);
    const double ratio = e2 / e4;
    CHECK(ratio > 10.0);
    CHECK(ratio < 24.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng), b = u(rng), c = u(rng), s = 4 * u(rng) - 2;
        const double wb = omega_at(p, 0, a, s, b, 256);
        CHECK(std::abs(omega_at(p, 0, b, wb, c, 256) - omega_at(p, 0, a, s, c, 256)) < 1e-9);
    }
}

TEST_CASE("tracing errors") {
    const auto nodes = uniform_nodes(0.0, 1.0, 20);
    CHECK_THROWS_AS((void)trace(scalar("x - 0.5"), 0, 1.0, 0.0, nodes), TraceError);
    CHECK_THROWS_AS((void)trace(scalar("sin(t)"), 0, 0.5, 0.0, nodes), TraceError);
    TraceOptions o;
    o.window = std::make_pair(-0.25, 0.25);
    CHECK_THROWS_AS((void)trace(scalar("1"), 0, 0.5, 0.0, nodes, o), TraceError);
    o.window = std::make_pair(-1.0, 1.0);
    CHECK_NOTHROW((void)trace(scalar("1"), 0, 0.5, 0.0, nodes, o));
    const std::vector<double> unsorted{0.5, 0.2};
    CHECK_THROWS_AS((void)trace(scalar("1"), 0, 0.5, 0.0, unsorted), TraceError);
    CHECK_THROWS_AS((void)trace(scalar("1"), 1, 0.5, 0.0, nodes), TraceError);
}

TEST_CASE("derivative formulas in closed form") {
    const ProblemSpec p = scalar("2/pi");
    CHECK(domega_dx(p, 0, 0.1, 0.7, 2.0) == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-14));
    CHECK(domega_dt(p, 0, 0.1, 0.7, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    const ProblemSpec q = scalar("-1", 0);
    CHECK(domega_dx(q, 0, 0.9, 0.2, -1.0) == doctest::Approx(1.0).epsilon(1e-14));
    const ProblemSpec v = scalar("2 + 0.5*sin(t)");
    CHECK(domega_dt(v, 0, 0.3, 0.3, 1.0) == 1.0);
}

TEST_CASE("derivative formulas match differences of traced characteristics") {
    const ProblemSpec p = scalar("2 + 0.5*sin(t)");
    const double h = 1e-5;
    for (double x : {0.2, 0.6, 0.95})
        for (double t : {-1.0, 0.3, 2.0})
            for (double xi : {0.0, 0.5, 0.9}) {
                if (xi == x) continue;
                auto w = [&](double xx, double tt) {
                    TraceOptions o;
                    o.substeps = 64;
                    const std::vector<double> nodes{std::min(xi, xx), std::max(xi, xx)};
                    const auto path = trace(p, 0, xx, tt, nodes, o);
                    return path.omega[path.node_index(xi)];
                };
                const double fx = (w(x + h, t) - w(x - h, t)) / (2 * h);
                const double ft = (w(x, t + h) - w(x, t - h)) / (2 * h);
                CHECK(std::abs(domega_dx(p, 0, xi, x, t) - fx) < 1e-4 * std::abs(fx));
                CHECK(std::abs(domega_dt(p, 0, xi, x, t) - ft) < 1e-4 * std::abs(ft));
            }
}

TEST_CASE("column tracer matches per-anchor tracing") {
    for (const char* speed : {"1 + 0.25*x", "2 + 0.5*sin(t) + 0.1*x"}) {
        const ProblemSpec p = scalar(speed);
        const int nx = 16;
        const ColumnTracer tracer(p, nx);
        std::vector<double> out(nx + 1);
        tracer.trace(0, 12, 0, 0.75, out);
        std::vector<double> nodes(nx + 1);
        for (int i = 0; i <= nx; ++i) nodes[i] = static_cast<double>(i) / nx;
        const auto path = trace(p, 0, nodes[12], 0.75, nodes);
        for (int c = 0; c <= 12; ++c) CHECK(out[c] == doctest::Approx(path.omega[12 - c]).epsilon(1e-13));
    }
}
