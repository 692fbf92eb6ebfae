#include "hypstrip/cases.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace hypstrip {

std::string to_string(Behavior b) {
    switch (b) {
        case Behavior::unique_solvable: return "unique-solvable";
        case Behavior::kernel_nontrivial: return "kernel-nontrivial";
        case Behavior::divergent: return "divergent";
    }
    return "?";
}

namespace {

std::map<Condition, Status> all_pass_expected() {
    return {{Condition::smoothness, Status::pass},    {Condition::hyperbolicity, Status::pass},
            {Condition::r_regularity, Status::pass},  {Condition::factorization, Status::pass},
            {Condition::dissipativity, Status::pass}, {Condition::coupling_decay, Status::pass}};
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ReflectionTerm reflect(int source, Side side, double weight, double shift = 0.0) {
    return ReflectionTerm{source, Expr(weight), shift, side};
}

}  // namespace

CaseDescriptor counterexample(int l) {
    if (l < 1) throw std::invalid_argument("counterexample frequency must be >= 1");
    CaseDescriptor c;
    c.name = "counterexample-l" + std::to_string(l);
    c.summary = "equal speeds 2/pi with b_12 = -1, b_21 = 1 and zero boundary data; u below solves the homogeneous problem";
    c.spec = ProblemSpec::zeros(2, 1);
    c.spec.speeds = {parse("2/pi"), parse("2/pi")};
    c.spec.coupling[0][1] = Expr(-1.0);
    c.spec.coupling[1][0] = Expr(1.0);
    const std::string phase = "sin(" + std::to_string(l) + "*(t-pi*x/2))";
    c.exact = std::vector<Expr>{parse("sin(pi*x/2)*" + phase), parse("cos(pi*x/2)*" + phase)};
    c.expected = all_pass_expected();
    c.expected[Condition::hyperbolicity] = Status::fail;
    c.expected[Condition::factorization] = Status::fail;
    c.expected[Condition::coupling_decay] = Status::fail;
    c.behavior = Behavior::kernel_nontrivial;
    c.domain = {2.0 * std::numbers::pi, 200, 200, 3};
    return c;
}

CaseDescriptor decoupled_transport(int n, int m, const std::vector<double>& speeds, const std::vector<Expr>& data) {
    if (static_cast<int>(speeds.size()) != n || static_cast<int>(data.size()) != n)
        throw ProblemError("decoupled transport needs n speeds and n data functions");
    CaseDescriptor c;
    c.name = "transport";
    c.summary = "decoupled transport with constant speeds";
    c.spec = ProblemSpec::zeros(n, m);
    std::vector<Expr> exact;
    for (int j = 0; j < n; ++j) {
        const double a = speeds[j];
        if (!(j < m ? a > 0.0 : a < 0.0))
            throw ProblemError("speed of component " + std::to_string(j + 1) + " has the wrong sign for m = " +
                               std::to_string(m));
        c.spec.speeds[j] = Expr(a);
        c.spec.boundary.rows[j].data = data[j];
        const double xj = c.spec.anchor(j);
        const Expr foot = Expr::variable(Var::t) - (Expr::variable(Var::x) - Expr(xj)) / Expr(a);
        exact.push_back(data[j].substitute(Var::t, foot));
    }
    c.exact = std::move(exact);
    c.expected = all_pass_expected();
    return c;
}

CaseDescriptor manufactured(const ProblemSpec& base, const std::vector<Expr>& u_star) {
    base.validate();
    if (static_cast<int>(u_star.size()) != base.n) throw ProblemError("manufactured solution needs n components");
    CaseDescriptor c;
    c.name = "manufactured";
    c.summary = "forcing and boundary data built from a chosen exact solution";
    c.spec = base;
    for (int j = 0; j < base.n; ++j) {
        Expr f = u_star[j].diff(Var::t) + base.speeds[j] * u_star[j].diff(Var::x);
        for (int k = 0; k < base.n; ++k) f = f + base.coupling[j][k] * u_star[k];
        c.spec.forcing[j] = f;

        const auto trace = [&](int k, double x, double shift) {
            return u_star[k]
                .substitute(Var::t, Expr::variable(Var::t) + Expr(shift))
                .substitute(Var::x, Expr(x));
        };
        BoundaryRow& row = c.spec.boundary.rows[j];
        Expr data = trace(j, base.anchor(j), 0.0);
        for (const auto& term : row.terms) data = data - term.weight * trace(term.source, side_x(term.side), term.shift);
        row.data = data;
    }
    c.exact = u_star;
    c.expected = all_pass_expected();
    return c;
}

namespace {

CaseDescriptor transport_pair() {
    CaseDescriptor c = decoupled_transport(2, 1, {1.0, -1.0}, {parse("sin(t)"), parse("cos(t)")});
    c.name = "transport-pair";
    c.summary = "two decoupled components moving in opposite directions";
    return c;
}

CaseDescriptor damped() {
    CaseDescriptor c;
    c.name = "damped";
    c.summary = "scalar transport with time-dependent damping b = 1 + 0.5 sin t";
    c.spec = ProblemSpec::zeros(1, 1);
    c.spec.coupling[0][0] = parse("1 + 0.5*sin(t)");
    c.spec.boundary.rows[0].data = parse("sin(t)");
    c.exact = std::vector<Expr>{parse("sin(t-x)*exp(-x + 0.5*(cos(t) - cos(t-x)))")};
    c.expected = all_pass_expected();
    return c;
}

// u(0,t) = 0.5 u(1,t) + sin t with a = 1: u = g(t - x), g(s) - 0.5 g(s-1) = sin s.
CaseDescriptor reflection_half() {
    CaseDescriptor c;
    c.name = "reflection-half";
    c.summary = "scalar transport fed back from x = 1 with weight 0.5";
    c.spec = ProblemSpec::zeros(1, 1);
    c.spec.boundary.rows[0].data = parse("sin(t)");
    c.spec.boundary.rows[0].terms.push_back(reflect(0, Side::right, 0.5));
    const std::complex<double> z = 1.0 / (1.0 - 0.5 * std::exp(std::complex<double>(0.0, -1.0)));
    c.exact = std::vector<Expr>{parse(num(z.real()) + "*sin(t-x) + " + num(z.imag()) + "*cos(t-x)")};
    c.expected = all_pass_expected();
    c.domain.depth = 8;
    return c;
}

CaseDescriptor reflection_unstable() {
    CaseDescriptor c;
    c.name = "reflection-unstable";
    c.summary = "scalar transport fed back from x = 1 with weight 1.5";
    c.spec = ProblemSpec::zeros(1, 1);
    c.spec.boundary.rows[0].data = parse("sin(t)");
    c.spec.boundary.rows[0].terms.push_back(reflect(0, Side::right, 1.5));
    c.expected = all_pass_expected();
    c.expected[Condition::dissipativity] = Status::fail;
    c.behavior = Behavior::divergent;
    c.domain.depth = 8;
    return c;
}

// Coupled 2x2 system with factorized coupling supported near t = 0.
CaseDescriptor manufactured_pair() {
    ProblemSpec base = ProblemSpec::zeros(2, 1);
    base.speeds = {parse("1 + 0.25*x"), parse("-(1 + 0.25*cos(x))")};
    const std::string g = "bump(t,0.5,1.5)*bump(-t,0.5,1.5)";
    base.coupling[0][0] = Expr(1.0);
    base.coupling[1][1] = Expr(0.8);
    base.factor[0][1] = parse("0.1*" + g);
    base.factor[1][0] = parse("0.05*" + g);
    base.coupling[0][1] = *base.factor[0][1] * (base.speeds[1] - base.speeds[0]);
    base.coupling[1][0] = *base.factor[1][0] * (base.speeds[0] - base.speeds[1]);
    base.boundary.rows[0].terms.push_back(reflect(1, Side::left, 0.5));
    base.boundary.rows[1].terms.push_back(reflect(0, Side::right, 0.4));
    CaseDescriptor c = manufactured(base, {parse("sin(t)*cos(x)"), parse("sin(t)*cos(2*x)")});
    c.name = "manufactured";
    c.summary = "coupled 2x2 system with exact solution u_j = sin(t) cos(j x)";
    c.domain = {4.0, 100, 100, 8};
    return c;
}

// Coupling only in -12 < t < -5, reflections at both ends.
CaseDescriptor left_coupled() {
    CaseDescriptor c;
    c.name = "left-coupled";
    c.summary = "coupling supported in t in [-12, -5]; suited to the two-phase solver";
    c.spec = ProblemSpec::zeros(2, 1);
    c.spec.speeds = {parse("1 + 0.25*x"), parse("-(1 + 0.25*x)")};
    const std::string g = "bump(t,-10,-5)*bump(-t,10,12)";
    c.spec.factor[0][1] = parse("0.1*" + g);
    c.spec.factor[1][0] = parse("0.1*" + g);
    c.spec.coupling[0][1] = *c.spec.factor[0][1] * (c.spec.speeds[1] - c.spec.speeds[0]);
    c.spec.coupling[1][0] = *c.spec.factor[1][0] * (c.spec.speeds[0] - c.spec.speeds[1]);
    c.spec.boundary.rows[0].data = parse("sin(t)");
    c.spec.boundary.rows[1].data = parse("cos(t)");
    c.spec.boundary.rows[0].terms.push_back(reflect(1, Side::left, 0.3));
    c.spec.boundary.rows[1].terms.push_back(reflect(0, Side::right, 0.2));
    c.expected = all_pass_expected();
    c.domain = {24.0, 40, 640, 3};
    return c;
}

}  // namespace

std::vector<std::string> builtin_case_names() {
    return {"counterexample-l1", "counterexample-l2", "counterexample-l3", "transport",
            "transport-pair",    "damped",            "reflection-half",   "reflection-unstable",
            "manufactured",      "left-coupled"};
}

CaseDescriptor builtin_case(const std::string& name) {
    if (name.rfind("counterexample-l", 0) == 0) {
        const std::string tail = name.substr(16);
        if (tail == "1" || tail == "2" || tail == "3") return counterexample(std::stoi(tail));
    }
    if (name == "transport") {
        CaseDescriptor c = decoupled_transport(1, 1, {1.0}, {parse("sin(t)")});
        c.summary = "scalar transport u(x,t) = sin(t - x)";
        return c;
    }
    if (name == "transport-pair") return transport_pair();
    if (name == "damped") return damped();
    if (name == "reflection-half") return reflection_half();
    if (name == "reflection-unstable") return reflection_unstable();
    if (name == "manufactured") return manufactured_pair();
    if (name == "left-coupled") return left_coupled();
    throw std::out_of_range("unknown case '" + name + "'");
}

}  // namespace hypstrip
