#include <cmath>

#include "doctest.h"
#include "hypstrip/cases.hpp"
#include "hypstrip/diagnostics.hpp"

using namespace hypstrip;

namespace {

ProblemSpec pair_spec() {
    ProblemSpec p = ProblemSpec::zeros(2, 1);
    p.speeds[0] = parse("1 + 0.25*x");
    p.speeds[1] = parse("-(1 + 0.25*x)");
    return p;
}

Domain small(const ProblemSpec& p, double T = 2.0, int depth = 3) { return make_domain(p, T, 16, 64, depth); }

// u_1(0,t) = w1 u_2(0,t), u_2(1,t) = w2 u_1(1,t).
ProblemSpec circular(double w1, double w2) {
    ProblemSpec p = pair_spec();
    p.boundary.rows[0].terms.push_back({1, Expr(w1), 0.0, Side::left});
    p.boundary.rows[1].terms.push_back({0, Expr(w2), 0.0, Side::right});
    return p;
}

}  // namespace

TEST_CASE("hyperbolicity") {
    const ProblemSpec ok = pair_spec();
    const HypothesisVerdict v = check_hyperbolicity(ok, small(ok));
    CHECK(v.status == Status::pass);
    CHECK(v.value == doctest::Approx(1.0));

    ProblemSpec vanishing = ProblemSpec::zeros(1, 1);
    vanishing.speeds[0] = parse("sin(t)");
    const Domain d = small(vanishing);
    const HypothesisVerdict w = check_hyperbolicity(vanishing, d);
    CHECK(w.status == Status::fail);
    REQUIRE(w.witness);
    CHECK(w.witness->j == 0);
    CHECK(std::abs(w.witness->t) <= d.grid().dt() / 2 + 1e-12);
    CHECK(std::abs(w.witness->value) <= 1e-12);

    // Equal positive speeds with one component anchored at x = 1.
    const CaseDescriptor ce = counterexample(1);
    const HypothesisVerdict c = check_hyperbolicity(ce.spec, small(ce.spec));
    CHECK(c.status == Status::fail);
    CHECK(c.witness->j == 1);
}

TEST_CASE("smoothness") {
    ProblemSpec p = pair_spec();
    CHECK(check_smoothness(p, small(p)).status == Status::pass);
    p.coupling[0][1] = parse("abs(t)");
    const HypothesisVerdict w = check_smoothness(p, small(p));
    CHECK(w.status == Status::warn);
    CHECK(w.detail.find("b_1_2") != std::string::npos);
    p.coupling[0][1] = parse("1/(x - 0.5)");
    const HypothesisVerdict f = check_smoothness(p, small(p));
    CHECK(f.status == Status::fail);
    REQUIRE(f.witness);
    CHECK(f.witness->x == doctest::Approx(0.5));
}

TEST_CASE("R regularity") {
    ProblemSpec p = circular(0.5, 0.5);
    CHECK(check_R_regularity(p).status == Status::pass);
    p.boundary.rows[0].terms[0].weight = parse("abs(t)");
    CHECK(check_R_regularity(p).status == Status::warn);
}

TEST_CASE("factorization") {
    ProblemSpec p = pair_spec();
    p.coupling[0][1] = parse("0.3*sin(t)");
    CHECK(check_factorization(p, small(p)).status == Status::pass);

    // b = bt * (a_k - a_j) with a_2 - a_1 = -2 - 0.5 x.
    p.coupling[0][1] = parse("0.1*(-2 - 0.5*x)*cos(t)");
    p.factor[0][1] = parse("0.1*cos(t)");
    CHECK(check_factorization(p, small(p)).status == Status::pass);
    p.factor[0][1] = parse("0.2*cos(t)");
    const HypothesisVerdict bad = check_factorization(p, small(p));
    CHECK(bad.status == Status::fail);
    CHECK(bad.witness->j == 0);
    CHECK(bad.witness->k == 1);

    // Equal speeds need vanishing coupling.
    const CaseDescriptor ce = counterexample(2);
    CHECK(check_factorization(ce.spec, small(ce.spec)).status == Status::fail);

    ProblemSpec near = pair_spec();
    near.speeds[1] = parse("-(1 + 0.25*x) + 2 + 0.25*x + 1e-8");
    near.coupling[0][1] = Expr(1.0);
    CHECK(check_factorization(near, small(near)).status == Status::warn);
}

TEST_CASE("coupling decay") {
    ProblemSpec p = pair_spec();
    p.coupling[0][1] = parse("bump(t,0.5,1)*bump(-t,0.5,1)");
    CHECK(check_coupling_decay(p, small(p)).status == Status::pass);
    p.coupling[0][1] = parse("0.2");
    const HypothesisVerdict v = check_coupling_decay(p, small(p));
    CHECK(v.status == Status::fail);
    CHECK(v.value == doctest::Approx(0.2));
    p.coupling[0][1] = parse("exp(-t^2)");
    CHECK(check_coupling_decay(p, small(p, 20.0)).status == Status::pass);
    CHECK(check_coupling_decay(p, small(p, 2.0)).status == Status::fail);
}

TEST_CASE("norm of powers of C for constant weights") {
    ProblemSpec half = ProblemSpec::zeros(1, 1);
    half.boundary.rows[0].terms.push_back({0, Expr(0.5), 0.0, Side::right});
    const Domain dh = dissipativity_domain(half, small(half), 4);
    const StripOperators oh(half, dh.grid());
    for (int ell = 1; ell <= 3; ++ell) {
        const NormEstimate e = estimate_C_power_norm(oh, dh.T, ell);
        CHECK(e.value == doctest::Approx(std::pow(0.5, ell)).epsilon(1e-12));
        CHECK(e.row_sum == doctest::Approx(std::pow(0.5, ell)).epsilon(1e-12));
    }

    const ProblemSpec circ = circular(2.0, 0.3);
    const Domain dc = dissipativity_domain(circ, small(circ), 4);
    const StripOperators oc(circ, dc.grid());
    CHECK(estimate_C_power_norm(oc, dc.T, 1).value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(estimate_C_power_norm(oc, dc.T, 2).value == doctest::Approx(0.6).epsilon(1e-12));

    // Several terms with mixed signs: sum of |w|.
    ProblemSpec mixed = pair_spec();
    mixed.boundary.rows[0].terms.push_back({1, Expr(0.25), 0.0, Side::left});
    mixed.boundary.rows[0].terms.push_back({0, Expr(-0.35), -0.5, Side::right});
    mixed.boundary.rows[1].terms.push_back({0, Expr(0.1), 0.0, Side::right});
    const Domain dm = dissipativity_domain(mixed, small(mixed), 2);
    const StripOperators om(mixed, dm.grid());
    CHECK(estimate_C_power_norm(om, dm.T, 1).value == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("probe sets only add lower bounds") {
    ProblemSpec p = pair_spec();
    p.boundary.rows[0].terms.push_back({1, parse("0.5 + 0.3*sin(t)"), 0.0, Side::left});
    p.boundary.rows[1].terms.push_back({0, parse("0.4*cos(2*t)"), -0.2, Side::right});
    p.coupling[0][0] = parse("0.3");
    const Domain d = dissipativity_domain(p, small(p), 3);
    const StripOperators ops(p, d.grid());
    for (int ell = 1; ell <= 3; ++ell) {
        ProbeSet none{false, false, 0, 1};
        ProbeSet few{false, false, 8, 1};
        const double a = estimate_C_power_norm(ops, d.T, ell, few).value;
        const NormEstimate full = estimate_C_power_norm(ops, d.T, ell);
        CHECK(estimate_C_power_norm(ops, d.T, ell, none).value == 0.0);
        CHECK(a <= full.value + 1e-15);
        CHECK(full.value <= full.row_sum * (1 + 1e-12));
        CHECK(full.value == doctest::Approx(full.row_sum).epsilon(1e-12));
    }
}

TEST_CASE("chains reading past the padding are rejected") {
    ProblemSpec p = ProblemSpec::zeros(1, 1);
    p.boundary.rows[0].terms.push_back({0, Expr(0.5), 0.0, Side::right});
    const Domain d = make_domain(p, 2.0, 8, 32, 1);
    const StripOperators ops(p, d.grid());
    CHECK_NOTHROW((void)estimate_C_power_norm(ops, d.T, 1));
    CHECK_THROWS_AS((void)estimate_C_power_norm(ops, d.T, 3), OperatorError);
}

TEST_CASE("dissipativity verdicts") {
    const ProblemSpec good = circular(2.0, 0.3);
    std::vector<NormEstimate> est;
    const HypothesisVerdict v = check_dissipativity(good, small(good), 8, &est);
    CHECK(v.status == Status::pass);
    CHECK(est.size() == 2);
    CHECK(v.value == doctest::Approx(0.6).epsilon(1e-12));

    std::vector<NormEstimate> all;
    CHECK(check_dissipativity(good, small(good), 4, &all, true).status == Status::pass);
    CHECK(all.size() == 4);

    const ProblemSpec bad = circular(1.5, 1.0);
    const HypothesisVerdict f = check_dissipativity(bad, small(bad), 4);
    CHECK(f.status == Status::fail);
    CHECK(f.value >= 1.0);

    const ProblemSpec none = pair_spec();
    const HypothesisVerdict z = check_dissipativity(none, small(none));
    CHECK(z.status == Status::pass);
    CHECK(z.value == 0.0);
}

TEST_CASE("run_all_checks order and all_pass") {
    const ProblemSpec p = circular(0.5, 0.5);
    const auto verdicts = run_all_checks(p, small(p));
    REQUIRE(verdicts.size() == 6);
    CHECK(verdicts[0].condition == Condition::smoothness);
    CHECK(verdicts[1].condition == Condition::hyperbolicity);
    CHECK(verdicts[2].condition == Condition::r_regularity);
    CHECK(verdicts[3].condition == Condition::factorization);
    CHECK(verdicts[4].condition == Condition::dissipativity);
    CHECK(verdicts[5].condition == Condition::coupling_decay);
    CHECK(all_pass(verdicts));
    CHECK(to_string(Condition::coupling_decay) == "coupling-decay");
    CHECK(to_string(Status::warn) == "warn");
}

TEST_CASE("residuals") {
    ProblemSpec p = ProblemSpec::zeros(1, 1);
    p.forcing[0] = parse("2 + cos(t)");
    const Domain d = small(p);
    const StripOperators ops(p, d.grid());
    const GridFunction zero(1, d.grid());
    const Residuals r = residuals(ops, zero, d.T);
    CHECK(r.pde == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(r.bc == 0.0);
    CHECK(r.integral == doctest::Approx(ops.forcing_term().sup_norm(d.grid().rows_within(d.T).first,
                                                                    d.grid().rows_within(d.T).second)));

    const CaseDescriptor c = builtin_case("transport-pair");
    const Domain dc = make_domain(c.spec, c.domain.T, 32, 64, c.domain.depth);
    const StripOperators oc(c.spec, dc.grid());
    const Residuals e = residuals(oc, sample_expressions(*c.exact, dc.grid()), dc.T);
    const double h = std::max(dc.grid().dx(), dc.grid().dt());
    CHECK(e.pde < h * h);
    CHECK(e.bc < 1e-14);
    CHECK(e.integral < h * h);
}
