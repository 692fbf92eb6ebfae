#include "hypstrip/output.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hypstrip {

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

std::filesystem::path table_path(const std::filesystem::path& dir, int j) {
    return dir / ("u_" + std::to_string(j + 1) + ".csv");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write " + path.string());
    out << text;
    if (!out) throw OutputError("write failed for " + path.string());
}

void write_tables(const std::filesystem::path& dir, const GridFunction& u, double T) {
    std::filesystem::create_directories(dir);
    const Grid& g = u.grid();
    for (int j = 0; j < u.components(); ++j) {
        std::string text = "# component " + std::to_string(j + 1) + ", Nx " + std::to_string(g.nx) + ", Nt " +
                           std::to_string(g.nt) + ", T ";
        append_number(text, T);
        text += ", T_pad ";
        append_number(text, g.t_pad);
        text += '\n';
        for (int r = 0; r <= g.nt; ++r) {
            for (int i = 0; i <= g.nx; ++i) {
                if (i) text += ',';
                append_number(text, u.at(j, i, r));
            }
            text += '\n';
        }
        write_text(table_path(dir, j), text);
    }
}

GridFunction read_tables(const std::filesystem::path& dir, int n, const Grid& grid) {
    GridFunction u(n, grid);
    for (int j = 0; j < n; ++j) {
        const auto path = table_path(dir, j);
        std::ifstream in(path);
        if (!in) throw OutputError("missing table " + path.string());
        std::string line;
        int r = -1;
        while (std::getline(in, line)) {
            if (line.empty() || line.front() == '#') continue;
            if (++r > grid.nt) throw OutputError(path.string() + ": more than Nt + 1 = " + std::to_string(grid.nt + 1) + " rows");
            int i = 0;
            const char* p = line.data();
            const char* end = p + line.size();
            while (p < end) {
                if (i > grid.nx) throw OutputError(path.string() + ": row " + std::to_string(r + 1) + " has more than Nx + 1 values");
                double v = 0.0;
                const auto [q, ec] = std::from_chars(p, end, v);
                if (ec != std::errc()) throw OutputError(path.string() + ": bad number in row " + std::to_string(r + 1));
                u.at(j, i++, r) = v;
                p = q;
                if (p < end && *p == ',') ++p;
            }
            if (i != grid.nx + 1)
                throw OutputError(path.string() + ": row " + std::to_string(r + 1) + " has " + std::to_string(i) +
                                  " values, expected Nx + 1 = " + std::to_string(grid.nx + 1));
        }
        if (r != grid.nt)
            throw OutputError(path.string() + ": " + std::to_string(r + 1) + " rows, expected Nt + 1 = " +
                              std::to_string(grid.nt + 1));
    }
    return u;
}

std::string format_verdicts(const std::vector<HypothesisVerdict>& verdicts) {
    std::ostringstream os;
    os.precision(6);
    for (const auto& v : verdicts) {
        os << "verdict." << to_string(v.condition) << ": " << to_string(v.status) << " | value " << v.value;
        if (v.witness) {
            os << " | witness";
            if (v.witness->j >= 0) os << " j=" << v.witness->j + 1;
            if (v.witness->k >= 0) os << " k=" << v.witness->k + 1;
            os << " x=" << v.witness->x << " t=" << v.witness->t;
        }
        os << " | " << v.detail << '\n';
    }
    return os.str();
}

std::string format_estimates(const std::vector<NormEstimate>& estimates) {
    std::ostringstream os;
    os.precision(12);
    for (const auto& e : estimates)
        os << "norm.C^" << e.ell << ": " << e.value << " (max row sum " << e.row_sum << ")\n";
    return os.str();
}

std::string format_report(const SolveReport& report, const std::vector<NormEstimate>& estimates) {
    std::ostringstream os;
    os.precision(12);
    os << "mode: " << report.mode << '\n';
    os << "converged: " << (report.converged ? "true" : "false") << '\n';
    os << "iterations: " << report.iterations << '\n';
    if (report.mode == "two-phase") {
        os << "phase1_iterations: " << report.phase1_iterations << '\n';
        os << "phase1_ratio: " << report.phase1_ratio << '\n';
    }
    if (report.march_rows) {
        os << "march_rows: " << report.march_rows << '\n';
        os << "max_row_sweeps: " << report.max_row_sweeps << '\n';
    }
    os << "contraction_ratio: " << report.contraction_ratio << '\n';
    os << "fixed_point_residual: " << report.fixed_point_residual << '\n';
    if (report.residuals) {
        os << "pde_residual: " << report.residuals->pde << '\n';
        os << "bc_residual: " << report.residuals->bc << '\n';
        os << "integral_residual: " << report.residuals->integral << '\n';
    }
    os << "increments:";
    for (std::size_t i = 0; i < report.increments.size(); ++i) os << (i ? ", " : " ") << report.increments[i];
    os << '\n';
    os << "wall_seconds: " << report.wall_seconds << '\n';
    os << format_verdicts(report.verdicts);
    os << format_estimates(estimates);
    return os.str();
}

std::string gnuplot_script(int n, const Grid& grid) {
    std::ostringstream os;
    os << "# gnuplot -p plot.gp\n";
    os << "set datafile separator ','\n";
    os << "set xlabel 'x'\nset ylabel 't'\nset view map\n";
    for (int j = 0; j < n; ++j) {
        os << "set title 'u_" << j + 1 << "'\n";
        os << "splot 'u_" << j + 1 << ".csv' matrix using ($1/" << grid.nx << ".0):(-" << grid.t_pad << " + $2*"
           << grid.dt() << "):3 with image notitle\n";
        if (j + 1 < n) os << "pause -1\n";
    }
    return os.str();
}

}  // namespace hypstrip
