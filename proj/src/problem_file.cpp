#include "hypstrip/problem_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace hypstrip {

ProblemFileError::ProblemFileError(const std::string& sec, int ln, const std::string& message)
    : std::runtime_error("line " + std::to_string(ln) + (sec.empty() ? "" : " [" + sec + "]") + ": " + message),
      section(sec),
      line(ln) {}

std::string to_string(SolveMode m) {
    switch (m) {
        case SolveMode::picard: return "picard";
        case SolveMode::two_phase: return "two-phase";
        case SolveMode::march: return "march";
    }
    return "?";
}

SolveMode parse_mode(std::string_view s) {
    if (s == "picard") return SolveMode::picard;
    if (s == "two-phase") return SolveMode::two_phase;
    if (s == "march") return SolveMode::march;
    throw std::invalid_argument("mode must be picard, two-phase or march");
}

namespace {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::set<std::string> kSections = {"system",  "speeds",  "coupling", "factorization", "forcing",
                                         "boundary", "initial", "domain",   "solver"};

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> out;
    std::string section;
    int line = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line;
        const std::string_view s = trim(raw);
        if (s.empty() || s.front() == '#' || s.front() == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ProblemFileError(section, line, "unterminated section header");
            section = std::string(trim(s.substr(1, s.size() - 2)));
            if (!kSections.count(section)) throw ProblemFileError(section, line, "unknown section");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ProblemFileError(section, line, "expected key = value");
        if (section.empty()) throw ProblemFileError(section, line, "key outside any section");
        Entry e{section, std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))), line};
        if (e.key.empty()) throw ProblemFileError(section, line, "empty key");
        out.push_back(std::move(e));
    }
    return out;
}

template <class T>
T number(const Entry& e, std::string_view text) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end)
        throw ProblemFileError(e.section, e.line, "'" + std::string(text) + "' is not a valid number for " + e.key);
    return v;
}

Expr expression(const Entry& e, const std::string& text) {
    try {
        return parse(text);
    } catch (const ParseError& err) {
        throw ProblemFileError(e.section, e.line, e.key + ": " + err.what());
    }
}

// "prefix_i" or "prefix_i_k" with 1-based indices in 1..n.
std::vector<int> indices(const Entry& e, const std::string& prefix, int count, int n) {
    const std::string bad = "unknown key '" + e.key + "'";
    if (e.key.rfind(prefix + "_", 0) != 0) throw ProblemFileError(e.section, e.line, bad);
    std::vector<int> out;
    std::string_view rest = std::string_view(e.key).substr(prefix.size() + 1);
    while (!rest.empty()) {
        const auto us = rest.find('_');
        const std::string_view part = rest.substr(0, us);
        int v = 0;
        const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || p != part.data() + part.size()) throw ProblemFileError(e.section, e.line, bad);
        if (v < 1 || v > n)
            throw ProblemFileError(e.section, e.line,
                                   "index " + std::to_string(v) + " in '" + e.key + "' outside 1.." + std::to_string(n));
        out.push_back(v - 1);
        rest = us == std::string_view::npos ? std::string_view{} : rest.substr(us + 1);
    }
    if (static_cast<int>(out.size()) != count) throw ProblemFileError(e.section, e.line, bad);
    return out;
}

ReflectionTerm reflection(const Entry& e, int n) {
    ReflectionTerm term;
    bool have_k = false;
    bool have_w = false;
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto semi = rest.find(';');
        const std::string_view item = trim(rest.substr(0, semi));
        rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ProblemFileError(e.section, e.line, "reflection item needs name=value");
        const std::string_view name = trim(item.substr(0, eq));
        const std::string_view value = trim(item.substr(eq + 1));
        if (name == "k") {
            const int k = number<int>(e, value);
            if (k < 1 || k > n)
                throw ProblemFileError(e.section, e.line, "reflection source " + std::to_string(k) + " outside 1.." +
                                                              std::to_string(n));
            term.source = k - 1;
            have_k = true;
        } else if (name == "weight") {
            term.weight = expression(e, std::string(value));
            have_w = true;
        } else if (name == "shift") {
            term.shift = number<double>(e, value);
        } else if (name == "side") {
            if (value == "0" || value == "left") term.side = Side::left;
            else if (value == "1" || value == "right") term.side = Side::right;
            else throw ProblemFileError(e.section, e.line, "side must be 0 (x = 0) or 1 (x = 1)");
        } else {
            throw ProblemFileError(e.section, e.line, "unknown reflection item '" + std::string(name) + "'");
        }
    }
    if (!have_k || !have_w) throw ProblemFileError(e.section, e.line, "reflection needs k and weight");
    return term;
}

}  // namespace

ProblemFile parse_problem_file(std::string_view text) {
    const std::vector<Entry> entries = tokenize(text);
    ProblemFile file;

    std::optional<int> n;
    std::optional<int> m;
    for (const auto& e : entries) {
        if (e.section != "system") continue;
        if (e.key == "n") n = number<int>(e, e.value);
        else if (e.key == "m") m = number<int>(e, e.value);
        else throw ProblemFileError(e.section, e.line, "unknown key '" + e.key + "'");
    }
    if (!n) throw ProblemFileError("system", 0, "missing n");
    if (!m) throw ProblemFileError("system", 0, "missing m");
    if (*n < 1) throw ProblemFileError("system", 0, "n must be >= 1");
    if (*m < 0 || *m > *n) throw ProblemFileError("system", 0, "m must satisfy 0 <= m <= n");
    file.spec = ProblemSpec::zeros(*n, *m);
    ProblemSpec& spec = file.spec;

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : entries) {
        if (e.section == "system") continue;
        if (e.key.rfind("reflect_", 0) != 0 && !seen.insert({e.section, e.key}).second)
            throw ProblemFileError(e.section, e.line, "duplicate key '" + e.key + "'");
        if (e.section == "speeds") {
            spec.speeds[indices(e, "a", 1, *n)[0]] = expression(e, e.value);
        } else if (e.section == "coupling") {
            const auto jk = indices(e, "b", 2, *n);
            spec.coupling[jk[0]][jk[1]] = expression(e, e.value);
        } else if (e.section == "factorization") {
            const auto jk = indices(e, "bt", 2, *n);
            if (jk[0] == jk[1]) throw ProblemFileError(e.section, e.line, "factorization applies to j != k only");
            spec.factor[jk[0]][jk[1]] = expression(e, e.value);
        } else if (e.section == "forcing") {
            spec.forcing[indices(e, "f", 1, *n)[0]] = expression(e, e.value);
        } else if (e.section == "boundary") {
            if (e.key.rfind("mu_", 0) == 0) {
                spec.boundary.rows[indices(e, "mu", 1, *n)[0]].data = expression(e, e.value);
            } else {
                const int j = indices(e, "reflect", 1, *n)[0];
                spec.boundary.rows[j].terms.push_back(reflection(e, *n));
            }
        } else if (e.section == "initial") {
            if (file.initial.empty()) file.initial.assign(*n, Expr(0.0));
            file.initial[indices(e, "u", 1, *n)[0]] = expression(e, e.value);
        } else if (e.section == "domain") {
            if (e.key == "T") file.domain.T = number<double>(e, e.value);
            else if (e.key == "Nx") file.domain.nx = number<int>(e, e.value);
            else if (e.key == "Nt") file.domain.nt = number<int>(e, e.value);
            else if (e.key == "depth") file.domain.depth = number<int>(e, e.value);
            else throw ProblemFileError(e.section, e.line, "unknown key '" + e.key + "'");
        } else if (e.section == "solver") {
            if (e.key == "tol") file.solver.tol = number<double>(e, e.value);
            else if (e.key == "max_iters") file.solver.max_iters = number<int>(e, e.value);
            else if (e.key == "ell") file.solver.ell = number<int>(e, e.value);
            else if (e.key == "mode") {
                try {
                    file.solver.mode = parse_mode(e.value);
                } catch (const std::invalid_argument& err) {
                    throw ProblemFileError(e.section, e.line, err.what());
                }
            } else {
                throw ProblemFileError(e.section, e.line, "unknown key '" + e.key + "'");
            }
        }
    }
    try {
        spec.validate();
    } catch (const ProblemError& err) {
        throw ProblemFileError("", 0, err.what());
    }
    return file;
}

ProblemFile load_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProblemFileError("", 0, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_file(buf.str());
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_problem_file(const ProblemFile& file, const std::string& comment) {
    const ProblemSpec& spec = file.spec;
    std::ostringstream os;
    if (!comment.empty()) {
        std::istringstream lines(comment);
        for (std::string l; std::getline(lines, l);) os << "# " << l << '\n';
        os << '\n';
    }
    os << "[system]\nn = " << spec.n << "\nm = " << spec.m << "\n\n[speeds]\n";
    for (int j = 0; j < spec.n; ++j) os << "a_" << j + 1 << " = " << spec.speeds[j].str() << '\n';
    os << "\n[coupling]\n";
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k)
            if (!spec.coupling[j][k].is_zero())
                os << "b_" << j + 1 << '_' << k + 1 << " = " << spec.coupling[j][k].str() << '\n';
    bool any_factor = false;
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k)
            if (spec.factor[j][k]) {
                if (!any_factor) os << "\n[factorization]\n";
                any_factor = true;
                os << "bt_" << j + 1 << '_' << k + 1 << " = " << spec.factor[j][k]->str() << '\n';
            }
    os << "\n[forcing]\n";
    for (int j = 0; j < spec.n; ++j)
        if (!spec.forcing[j].is_zero()) os << "f_" << j + 1 << " = " << spec.forcing[j].str() << '\n';
    os << "\n[boundary]\n";
    for (int j = 0; j < spec.n; ++j) {
        const BoundaryRow& row = spec.boundary.rows[j];
        if (!row.data.is_zero()) os << "mu_" << j + 1 << " = " << row.data.str() << '\n';
        for (const auto& term : row.terms)
            os << "reflect_" << j + 1 << " = k=" << term.source + 1 << "; weight=" << term.weight.str()
               << "; shift=" << num(term.shift) << "; side=" << (term.side == Side::left ? 0 : 1) << '\n';
    }
    if (!file.initial.empty()) {
        os << "\n[initial]\n";
        for (int j = 0; j < spec.n; ++j) os << "u_" << j + 1 << " = " << file.initial[j].str() << '\n';
    }
    os << "\n[domain]\nT = " << num(file.domain.T) << "\nNx = " << file.domain.nx << "\nNt = " << file.domain.nt
       << "\ndepth = " << file.domain.depth << '\n';
    os << "\n[solver]\ntol = " << num(file.solver.tol) << "\nmax_iters = " << file.solver.max_iters
       << "\nmode = " << to_string(file.solver.mode) << "\nell = " << file.solver.ell << '\n';
    return os.str();
}

}  // namespace hypstrip
