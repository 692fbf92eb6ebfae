#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "hypstrip/problem_file.hpp"

using namespace hypstrip;

namespace {

const char* kSample = R"(# coupled pair
[system]
n = 2
m = 1

[speeds]
a_1 = 1 + 0.25*x
a_2 = -(1 + 0.25*x)

[coupling]
b_1_1 = 0.5
b_1_2 = 0.1*bump(t,-10,-5)

[factorization]
bt_1_2 = -0.05*bump(t,-10,-5)/(1 + 0.25*x)

[forcing]
f_2 = sin(t)

[boundary]
mu_1 = sin(t)
reflect_1 = k=2; weight=0.3; shift=0; side=0
reflect_1 = k=1; weight=0.1*cos(t); shift=-0.5; side=right
; second component
reflect_2 = k=1; weight=0.2; side=1

[domain]
T = 24
Nx = 40
Nt = 640
depth = 3

[solver]
tol = 1e-9
max_iters = 50
mode = two-phase
ell = 4
)";

int error_line(const std::string& text) {
    try {
        (void)parse_problem_file(text);
    } catch (const ProblemFileError& e) {
        return e.line;
    }
    return -1;
}

std::string error_section(const std::string& text) {
    try {
        (void)parse_problem_file(text);
    } catch (const ProblemFileError& e) {
        return e.section;
    }
    return "<none>";
}

bool same_expr(const Expr& a, const Expr& b) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ut(-15.0, 15.0);
    for (int s = 0; s < 50; ++s) {
        const double x = ux(rng), t = ut(rng);
        if (a.eval(x, t) != b.eval(x, t)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("parse a complete file") {
    const ProblemFile f = parse_problem_file(kSample);
    const ProblemSpec& p = f.spec;
    CHECK(p.n == 2);
    CHECK(p.m == 1);
    CHECK(p.speeds[1].eval(1.0, 0.0) == -1.25);
    CHECK(p.coupling[0][0].eval(0, 0) == 0.5);
    CHECK(p.coupling[1][0].is_zero());
    REQUIRE(p.factor[0][1]);
    CHECK_FALSE(p.factor[1][0]);
    CHECK(p.forcing[0].is_zero());
    REQUIRE(p.boundary.rows[0].terms.size() == 2);
    const ReflectionTerm& r = p.boundary.rows[0].terms[1];
    CHECK(r.source == 0);
    CHECK(r.shift == -0.5);
    CHECK(r.side == Side::right);
    CHECK(p.boundary.rows[1].terms[0].shift == 0.0);
    CHECK(f.domain.T == 24.0);
    CHECK(f.domain.nt == 640);
    CHECK(f.solver.tol == 1e-9);
    CHECK(f.solver.max_iters == 50);
    CHECK(f.solver.mode == SolveMode::two_phase);
    CHECK(f.solver.ell == 4);
    CHECK(f.initial.empty());
}

TEST_CASE("defaults for optional sections") {
    const ProblemFile f = parse_problem_file("[system]\nn = 1\nm = 1\n[initial]\nu_1 = cos(x)\n");
    CHECK(f.spec.speeds[0].eval(0, 0) == 1.0);
    CHECK(f.domain.T == 2.0);
    CHECK(f.solver.mode == SolveMode::picard);
    REQUIRE(f.initial.size() == 1);
    CHECK(f.initial[0].eval(0, 0) == 1.0);
}

TEST_CASE("format and parse round-trip") {
    ProblemFile f = parse_problem_file(kSample);
    f.initial = {parse("x"), parse("1/3")};
    const std::string text = format_problem_file(f, "first line\nsecond line");
    CHECK(text.rfind("# first line\n# second line\n", 0) == 0);
    const ProblemFile g = parse_problem_file(text);
    CHECK(format_problem_file(g, "first line\nsecond line") == text);
    for (int j = 0; j < 2; ++j) {
        CHECK(same_expr(f.spec.speeds[j], g.spec.speeds[j]));
        CHECK(same_expr(f.initial[j], g.initial[j]));
        for (int k = 0; k < 2; ++k) CHECK(same_expr(f.spec.coupling[j][k], g.spec.coupling[j][k]));
    }
    CHECK(g.spec.boundary.rows[0].terms[1].weight.eval(0, 2.0) == f.spec.boundary.rows[0].terms[1].weight.eval(0, 2.0));
    CHECK(g.solver.mode == f.solver.mode);
}

TEST_CASE("every built-in case round-trips") {
    for (const auto& name : builtin_case_names()) {
        INFO(name);
        const CaseDescriptor c = builtin_case(name);
        ProblemFile f;
        f.spec = c.spec;
        f.domain = c.domain;
        const ProblemFile g = parse_problem_file(format_problem_file(f));
        CHECK(g.domain.T == c.domain.T);
        for (int j = 0; j < c.spec.n; ++j) {
            CHECK(same_expr(g.spec.forcing[j], c.spec.forcing[j]));
            CHECK(same_expr(g.spec.boundary.rows[j].data, c.spec.boundary.rows[j].data));
            for (int k = 0; k < c.spec.n; ++k) CHECK(same_expr(g.spec.coupling[j][k], c.spec.coupling[j][k]));
        }
    }
}

TEST_CASE("errors name the section and line") {
    CHECK(error_line("[system]\nn = 2\nm = 1\n[speeds]\na_3 = 1\n") == 5);
    CHECK(error_section("[system]\nn = 2\nm = 1\n[speeds]\na_3 = 1\n") == "speeds");
    CHECK(error_line("[system]\nn = 1\nm = 1\n[coupling]\nb_1_1 = sin(\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[domain]\nNx = many\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[domain]\nwidth = 3\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[solver]\nmode = newton\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[extra]\n") == 4);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[speeds\n") == 4);
    CHECK(error_line("a_1 = 1\n") == 1);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[speeds]\na_1 = 1\na_1 = 2\n") == 6);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[speeds]\na_1\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[boundary]\nreflect_1 = k=2; weight=1\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[boundary]\nreflect_1 = k=1\n") == 5);
    CHECK(error_line("[system]\nn = 1\nm = 1\n[boundary]\nreflect_1 = k=1; weight=1; side=2\n") == 5);
    CHECK(error_line("[system]\nn = 2\nm = 1\n[factorization]\nbt_1_1 = 1\n") == 5);
    CHECK(error_section("[system]\nn = 1\n") == "system");
    CHECK(error_section("[system]\nn = 1\nm = 2\n") == "system");
    CHECK(error_section("[system]\nn = 1\nm = 1\n[boundary]\nmu_1 = x\n") == "");

    try {
        (void)parse_problem_file("[system]\nn = 2\nm = 1\n[speeds]\na_3 = 1\n");
    } catch (const ProblemFileError& e) {
        CHECK(std::string(e.what()).find("line 5 [speeds]") == 0);
    }
}

TEST_CASE("load from disk") {
    const auto path = std::filesystem::temp_directory_path() / "hypstrip_problem_file_test.txt";
    {
        std::ofstream out(path);
        out << kSample;
    }
    CHECK(load_problem_file(path).spec.n == 2);
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)load_problem_file(path), ProblemFileError);
    CHECK(parse_mode("march") == SolveMode::march);
    CHECK_THROWS_AS((void)parse_mode("fast"), std::invalid_argument);
}
