#include "hypstrip/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hypstrip/output.hpp"
#include "hypstrip/parallel.hpp"
#include "hypstrip/solver.hpp"

namespace hypstrip {

namespace {

struct Loaded {
    ProblemFile file;
    Domain domain;
};

Loaded load(const std::filesystem::path& problem, const CliFlags& flags) {
    Loaded l{load_problem_file(problem), {}};
    if (flags.tol) l.file.solver.tol = *flags.tol;
    if (flags.max_iters) l.file.solver.max_iters = *flags.max_iters;
    if (flags.mode) l.file.solver.mode = *flags.mode;
    if (flags.ell) l.file.solver.ell = *flags.ell;
    if (l.file.solver.ell < 1) throw ProblemFileError("solver", 0, "ell must be >= 1");
    const auto& d = l.file.domain;
    l.domain = make_domain(l.file.spec, d.T, d.nx, d.nt, d.depth);
    return l;
}

std::vector<HypothesisVerdict> checks(const Loaded& l, std::vector<NormEstimate>* estimates, bool scan_all) {
    DiagnosticOptions opts;
    opts.ell_max = l.file.solver.ell;
    opts.scan_all = scan_all;
    return run_all_checks(l.file.spec, l.domain, opts, estimates);
}

bool any_fail(const std::vector<HypothesisVerdict>& verdicts) {
    return std::any_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.status == Status::fail; });
}

// Maps library exceptions to exit codes; `body` returns the code on success.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_divergence;
    } catch (const SolveError& e) {
        err << "error: " << e.what() << '\n';
        return exit_divergence;
    } catch (const ProblemFileError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
}

}  // namespace

int cmd_solve(const std::filesystem::path& problem, const std::filesystem::path& out_dir, const CliFlags& flags,
              std::ostream& out, std::ostream& err) {
    set_max_workers(flags.threads);
    return guarded(err, [&] {
        const Loaded l = load(problem, flags);
        std::vector<NormEstimate> estimates;
        const auto verdicts = checks(l, &estimates, false);
        SolveReport failed;
        failed.mode = to_string(l.file.solver.mode);
        failed.verdicts = verdicts;
        if (any_fail(verdicts) && !flags.skip_checks) {
            err << format_verdicts(verdicts);
            err << "error: hypotheses failed; rerun with --skip-checks to solve anyway\n";
            std::filesystem::create_directories(out_dir);
            write_text(out_dir / "report.txt", format_report(failed, estimates));
            return int(exit_hypothesis);
        }

        const StripOperators ops(l.file.spec, l.domain.grid());
        SolverOptions so;
        so.tol = l.file.solver.tol;
        so.max_iters = l.file.solver.max_iters;
        Solution sol;
        try {
            switch (l.file.solver.mode) {
                case SolveMode::picard: sol = picard_solve(ops, so); break;
                case SolveMode::two_phase: sol = two_phase_solve(ops, l.domain.T, so); break;
                case SolveMode::march: {
                    const Grid g = ops.grid();
                    const int rs = split_row(g, l.domain.T);
                    std::vector<std::vector<double>> initial(l.file.spec.n, std::vector<double>(g.nx + 1, 0.0));
                    if (!l.file.initial.empty())
                        for (int j = 0; j < l.file.spec.n; ++j)
                            for (int i = 0; i <= g.nx; ++i) initial[j][i] = l.file.initial[j].eval(g.x(i), g.t(rs));
                    sol = forward_march(ops, initial, rs, so);
                    break;
                }
            }
        } catch (const SolveError&) {
            std::filesystem::create_directories(out_dir);
            write_text(out_dir / "report.txt", format_report(failed, estimates));
            throw;
        }
        sol.report.verdicts = verdicts;
        sol.report.residuals = residuals(ops, sol.u, l.domain.T);
        write_tables(out_dir, sol.u, l.domain.T);
        const std::string report = format_report(sol.report, estimates);
        write_text(out_dir / "report.txt", report);
        if (flags.gnuplot) write_text(out_dir / "plot.gp", gnuplot_script(l.file.spec.n, ops.grid()));
        out << report;
        return int(exit_ok);
    });
}

int cmd_diagnose(const std::filesystem::path& problem, const CliFlags& flags, std::ostream& out, std::ostream& err) {
    set_max_workers(flags.threads);
    return guarded(err, [&] {
        const Loaded l = load(problem, flags);
        std::vector<NormEstimate> estimates;
        const auto verdicts = checks(l, &estimates, true);
        out << format_verdicts(verdicts) << format_estimates(estimates);
        return int(all_pass(verdicts) ? exit_ok : exit_hypothesis);
    });
}

int cmd_verify(const std::filesystem::path& problem, const std::filesystem::path& solution_dir, const CliFlags& flags,
               std::ostream& out, std::ostream& err) {
    set_max_workers(flags.threads);
    return guarded(err, [&] {
        CliFlags f = flags;
        f.tol.reset();
        const Loaded l = load(problem, f);
        const Grid g = l.domain.grid();
        const GridFunction u = read_tables(solution_dir, l.file.spec.n, g);
        const StripOperators ops(l.file.spec, g);
        const Residuals res = residuals(ops, u, l.domain.T);
        const double h = std::max(g.dx(), g.dt());
        const double tol = flags.tol ? *flags.tol : 10.0 * h * h;
        std::ostringstream os;
        os.precision(6);
        os << "pde_residual: " << res.pde << '\n'
           << "bc_residual: " << res.bc << '\n'
           << "integral_residual: " << res.integral << '\n'
           << "tol: " << tol << '\n';
        const bool ok = res.pde < tol && res.bc < tol && res.integral < tol;
        os << "result: " << (ok ? "pass" : "fail") << '\n';
        out << os.str();
        return int(ok ? exit_ok : exit_verification);
    });
}

int cmd_cases_list(std::ostream& out) {
    for (const auto& name : builtin_case_names()) {
        const CaseDescriptor c = builtin_case(name);
        out << name << "  [" << to_string(c.behavior) << "]  " << c.summary << '\n';
    }
    return exit_ok;
}

int cmd_cases_export(const std::string& name, const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream& err) {
    return guarded(err, [&] {
        CaseDescriptor c;
        try {
            c = builtin_case(name);
        } catch (const std::out_of_range& e) {
            err << "error: " << e.what() << "; see 'hypstrip cases list'\n";
            return int(exit_input);
        }
        ProblemFile file;
        file.spec = c.spec;
        file.domain = c.domain;
        std::filesystem::create_directories(out_dir);
        std::string comment = c.name + ": " + c.summary + "\nexpected behavior: " + to_string(c.behavior);
        if (c.exact) {
            comment += "\nexact solution:";
            for (std::size_t j = 0; j < c.exact->size(); ++j)
                comment += "\n  u_" + std::to_string(j + 1) + " = " + (*c.exact)[j].str();
        }
        write_text(out_dir / "problem.txt", format_problem_file(file, comment));
        out << "wrote " << (out_dir / "problem.txt").string() << '\n';
        if (c.exact) {
            const Domain d = make_domain(c.spec, c.domain.T, c.domain.nx, c.domain.nt, c.domain.depth);
            write_tables(out_dir, sample_expressions(*c.exact, d.grid()), d.T);
            out << "wrote exact solution table" << (c.exact->size() > 1 ? "s u_1.csv .. u_" : " u_")
                << c.exact->size() << ".csv\n";
        }
        return int(exit_ok);
    });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"hypstrip: bounded solutions of linear hyperbolic systems on a strip"};
    app.require_subcommand(1);

    CliFlags flags;
    std::string config;
    std::string out_dir = "out";
    std::string solution_dir;
    std::string mode;
    std::string case_name;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("config,--config", config, "problem file")->required();
        sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--ell", flags.ell, "largest power l for the ||C^l|| scan")->check(CLI::PositiveNumber);
    };

    auto* solve = app.add_subcommand("solve", "solve a problem file and write u_j.csv tables and report.txt");
    common(solve);
    solve->add_option("--out", out_dir, "output directory")->capture_default_str();
    solve->add_option("--tol", flags.tol, "sup-norm increment tolerance");
    solve->add_option("--max-iters", flags.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    solve->add_option("--mode", mode, "picard, two-phase or march")
        ->check(CLI::IsMember({"picard", "two-phase", "march"}));
    solve->add_flag("--skip-checks", flags.skip_checks, "solve even when hypothesis checks fail");
    solve->add_flag("--gnuplot", flags.gnuplot, "also write plot.gp");

    auto* diagnose = app.add_subcommand("diagnose", "check the hypotheses and estimate ||C^l||");
    common(diagnose);

    auto* verify = app.add_subcommand("verify", "residuals of stored tables against a problem file");
    common(verify);
    verify->add_option("solution,--solution", solution_dir, "directory holding u_j.csv")->required();
    verify->add_option("--tol", flags.tol, "residual tolerance (default 10 h^2)");

    auto* cases = app.add_subcommand("cases", "built-in problems");
    cases->require_subcommand(1);
    auto* list = cases->add_subcommand("list", "list built-in cases");
    auto* exp = cases->add_subcommand("export", "write a case as a problem file plus exact tables");
    exp->add_option("name", case_name, "case name")->required();
    exp->add_option("--out", out_dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? int(exit_ok) : int(exit_input);
    }
    if (!mode.empty()) flags.mode = parse_mode(mode);

    if (*solve) return cmd_solve(config, out_dir, flags, out, err);
    if (*diagnose) return cmd_diagnose(config, flags, out, err);
    if (*verify) return cmd_verify(config, solution_dir, flags, out, err);
    if (*list) return cmd_cases_list(out);
    if (*exp) return cmd_cases_export(case_name, out_dir, out, err);
    return exit_input;
}

}  // namespace hypstrip
