#include "hypstrip/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "hypstrip/parallel.hpp"

namespace hypstrip {

std::string to_string(Condition c) {
    switch (c) {
        case Condition::smoothness: return "smoothness";
        case Condition::hyperbolicity: return "hyperbolicity";
        case Condition::r_regularity: return "R-regularity";
        case Condition::factorization: return "factorization";
        case Condition::dissipativity: return "dissipativity";
        case Condition::coupling_decay: return "coupling-decay";
    }
    return "?";
}

std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::warn: return "warn";
        case Status::fail: return "fail";
    }
    return "?";
}

namespace {

// Grid nodes and midpoints of the padded domain. t-independent expressions
// are sampled on a single row.
template <class F>
void for_samples(const Domain& dom, bool t_dependent, F&& f) {
    const int sx = 2 * dom.nx;
    const int st = t_dependent ? 2 * dom.nt : 0;
    for (int p = 0; p <= sx; ++p) {
        const double x = static_cast<double>(p) / sx;
        for (int q = 0; q <= st; ++q) {
            const double t = st ? -dom.t_pad + 2.0 * dom.t_pad * q / st : 0.0;
            f(x, t);
        }
    }
}

std::string where(const Witness& w) {
    std::ostringstream os;
    os << "(x, t) = (" << w.x << ", " << w.t << ")";
    return os.str();
}

}  // namespace

HypothesisVerdict check_hyperbolicity(const ProblemSpec& spec, const Domain& dom, double a_min) {
    HypothesisVerdict v;
    v.condition = Condition::hyperbolicity;
    double margin = std::numeric_limits<double>::infinity();
    Witness worst;
    std::optional<Witness> breach;  // violating sample with the smallest |a_j|, then smallest |t|
    for (int j = 0; j < spec.n; ++j) {
        const double sign = j < spec.m ? 1.0 : -1.0;
        const Expr& a = spec.speeds[j];
        for_samples(dom, a.depends_on(Var::t), [&](double x, double t) {
            const double value = a.eval(x, t);
            if (sign * value < margin) {
                margin = sign * value;
                worst = {j, -1, x, t, value};
            }
            if (sign * value < a_min) {
                const bool better = !breach || std::abs(value) < std::abs(breach->value) ||
                                    (std::abs(value) == std::abs(breach->value) && std::abs(t) < std::abs(breach->t));
                if (better) breach = Witness{j, -1, x, t, value};
            }
        });
    }
    v.value = margin;
    std::ostringstream os;
    if (breach) {
        v.status = Status::fail;
        v.witness = breach;
        os << "a_" << breach->j + 1 << " = " << breach->value << " at " << where(*breach) << " but component "
           << breach->j + 1 << (breach->j < spec.m ? " needs a >= " : " needs a <= -") << a_min;
    } else {
        v.witness = worst;
        os << "min signed speed " << margin << " >= " << a_min;
    }
    v.detail = os.str();
    return v;
}

HypothesisVerdict check_smoothness(const ProblemSpec& spec, const Domain& dom) {
    HypothesisVerdict v;
    v.condition = Condition::smoothness;
    std::vector<std::pair<std::string, Expr>> fields;
    for (int j = 0; j < spec.n; ++j) {
        const std::string s = std::to_string(j + 1);
        fields.emplace_back("a_" + s, spec.speeds[j]);
        fields.emplace_back("f_" + s, spec.forcing[j]);
        for (int k = 0; k < spec.n; ++k) {
            const std::string jk = s + "_" + std::to_string(k + 1);
            fields.emplace_back("b_" + jk, spec.coupling[j][k]);
            if (spec.factor[j][k]) fields.emplace_back("bt_" + jk, *spec.factor[j][k]);
        }
    }
    std::vector<std::string> rough;
    double sup = 0.0;
    for (const auto& [name, e] : fields) {
        if (e.is_constant()) continue;
        std::vector<Expr> probes{e};
        try {
            probes.push_back(e.diff(Var::x));
            probes.push_back(e.diff(Var::t));
        } catch (const DiffError&) {
            rough.push_back(name);
        }
        const bool tdep = e.depends_on(Var::t);
        for (const auto& p : probes) {
            for_samples(dom, tdep, [&](double x, double t) {
                double value = 0.0;
                try {
                    value = p.eval(x, t);
                } catch (const EvalError&) {
                    value = std::numeric_limits<double>::infinity();
                }
                if (!std::isfinite(value) && !v.witness) v.witness = Witness{-1, -1, x, t, value};
                if (std::isfinite(value)) sup = std::max(sup, std::abs(value));
            });
        }
        if (v.witness && v.status != Status::fail) {
            v.status = Status::fail;
            v.detail = name + " or its derivative is not finite at " + where(*v.witness);
        }
    }
    v.value = sup;
    if (v.status == Status::fail) return v;
    std::ostringstream os;
    if (!rough.empty()) {
        v.status = Status::warn;
        os << "not differentiable symbolically:";
        for (const auto& r : rough) os << ' ' << r;
        os << "; ";
    }
    os << "sampled sup of coefficients and first derivatives " << sup;
    v.detail = os.str();
    return v;
}

HypothesisVerdict check_R_regularity(const ProblemSpec& spec) {
    HypothesisVerdict v;
    v.condition = Condition::r_regularity;
    std::vector<std::string> rough;
    for (int j = 0; j < spec.n; ++j) {
        const auto& row = spec.boundary.rows[j];
        std::vector<Expr> parts{row.data};
        for (const auto& term : row.terms) parts.push_back(term.weight);
        for (const auto& e : parts) {
            try {
                (void)e.diff(Var::t);
            } catch (const DiffError&) {
                rough.push_back("row " + std::to_string(j + 1));
                break;
            }
        }
    }
    if (rough.empty()) {
        v.detail = "reflection-type R with differentiable weights and shifts: holds by construction";
    } else {
        v.status = Status::warn;
        std::ostringstream os;
        os << "boundary operator has non-differentiable weights or data in";
        for (const auto& r : rough) os << ' ' << r;
        v.detail = os.str();
    }
    return v;
}

HypothesisVerdict check_factorization(const ProblemSpec& spec, const Domain& dom, double tol, double ratio_bound) {
    HypothesisVerdict v;
    v.condition = Condition::factorization;
    double mismatch = 0.0;
    double ratio = 0.0;
    std::optional<Witness> bad;
    Witness worst_ratio;
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k) {
            if (j == k) continue;
            const Expr& b = spec.coupling[j][k];
            const auto& bt = spec.factor[j][k];
            if (b.is_zero() && (!bt || bt->is_zero())) continue;
            const Expr& aj = spec.speeds[j];
            const Expr& ak = spec.speeds[k];
            const bool tdep = b.depends_on(Var::t) || aj.depends_on(Var::t) || ak.depends_on(Var::t) ||
                              (bt && bt->depends_on(Var::t));
            for_samples(dom, tdep, [&](double x, double t) {
                const double bv = b.eval(x, t);
                const double gap = ak.eval(x, t) - aj.eval(x, t);
                if (bt) {
                    const double e = std::abs(bv - bt->eval(x, t) * gap);
                    if (e > mismatch) {
                        mismatch = e;
                        if (e > tol) bad = Witness{j, k, x, t, e};
                    }
                } else if (std::abs(gap) < tol) {
                    if (std::abs(bv) >= tol && (!bad || std::abs(bv) > bad->value)) bad = Witness{j, k, x, t, std::abs(bv)};
                } else {
                    const double r = std::abs(bv) / std::abs(gap);
                    if (r > ratio) {
                        ratio = r;
                        worst_ratio = {j, k, x, t, r};
                    }
                }
            });
        }
    std::ostringstream os;
    if (bad) {
        v.status = Status::fail;
        v.witness = bad;
        v.value = bad->value;
        os << "b_" << bad->j + 1 << "_" << bad->k + 1 << " is not a multiple of a_" << bad->k + 1 << " - a_"
           << bad->j + 1 << " at " << where(*bad) << " (mismatch " << bad->value << ")";
    } else if (ratio > ratio_bound) {
        v.status = Status::warn;
        v.witness = worst_ratio;
        v.value = ratio;
        os << "sup |b_jk| / |a_k - a_j| = " << ratio << " exceeds " << ratio_bound;
    } else {
        v.value = std::max(mismatch, ratio);
        os << "max supplied-factor mismatch " << mismatch << ", sup |b_jk| / |a_k - a_j| = " << ratio;
    }
    v.detail = os.str();
    return v;
}

HypothesisVerdict check_coupling_decay(const ProblemSpec& spec, const Domain& dom, double eps) {
    HypothesisVerdict v;
    v.condition = Condition::coupling_decay;
    Witness worst;
    double sup = 0.0;
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k) {
            if (j == k || spec.coupling[j][k].is_zero()) continue;
            const Expr& b = spec.coupling[j][k];
            // Always scan in t: a t-independent b is evaluated at the far rows too.
            for_samples(dom, true, [&](double x, double t) {
                if (std::abs(t) <= 0.5 * dom.T) return;
                const double value = std::abs(b.eval(x, t));
                if (value > sup) {
                    sup = value;
                    worst = {j, k, x, t, value};
                }
            });
        }
    v.value = sup;
    std::ostringstream os;
    os << "sup |b_jk| for |t| in (T/2, T_pad] is " << sup << " (eps " << eps << ", at truncation scale)";
    if (sup >= eps) {
        v.status = Status::fail;
        v.witness = worst;
        os << "; worst b_" << worst.j + 1 << "_" << worst.k + 1 << " at " << where(worst);
    }
    v.detail = os.str();
    return v;
}

// ---------------------------------------------------------------------------

namespace {

// Sparse linear functional over the side-column grid values, keyed by
// (component * 2 + side) * (nt + 1) + row.
struct Functional {
    std::vector<std::pair<long long, double>> terms;
    bool clamped = false;
};

class ChainTable {
public:
    ChainTable(const StripOperators& ops) : ops_(ops), g_(ops.grid()), rows_(g_.nt + 1) {}

    long long key(int k, int column, int row) const {
        return (static_cast<long long>(k) * 2 + (column == 0 ? 0 : 1)) * rows_ + row;
    }

    // Row of C applied to a functional table `prev` (nullptr: identity) at anchor (j, i, r).
    Functional compose(int j, int i, int r, const std::vector<Functional>* prev) const {
        std::map<long long, double> acc;
        Functional out;
        for (const auto& e : ops_.reflection_entries(j, i, r)) {
            if (e.pos.clamped) out.clamped = true;
            const auto add = [&](int row, double w) {
                if (w == 0.0) return;
                const long long kk = key(e.source, e.column, row);
                if (!prev) {
                    acc[kk] += e.coef * w;
                    return;
                }
                const Functional& f = (*prev)[kk];
                if (f.clamped) out.clamped = true;
                for (const auto& [k2, c] : f.terms) acc[k2] += e.coef * w * c;
            };
            add(e.pos.row, 1.0 - e.pos.frac);
            if (e.pos.frac != 0.0) add(e.pos.row + 1, e.pos.frac);
        }
        out.terms.assign(acc.begin(), acc.end());
        return out;
    }

    // Functionals of C^level at every side point, level >= 1.
    std::vector<Functional> side_level(int level) const {
        std::vector<Functional> cur;
        for (int l = 1; l <= level; ++l) {
            std::vector<Functional> next(static_cast<std::size_t>(ops_.components()) * 2 * rows_);
            parallel_for(0, ops_.components() * 2, [&](int block) {
                const int k = block / 2;
                const int column = block % 2 == 0 ? 0 : g_.nx;
                for (int r = 0; r < rows_; ++r) next[key(k, column, r)] = compose(k, column, r, l == 1 ? nullptr : &cur);
            });
            cur = std::move(next);
        }
        return cur;
    }

    void unpack(long long kk, int& k, int& column, int& row) const {
        row = static_cast<int>(kk % rows_);
        const long long ks = kk / rows_;
        k = static_cast<int>(ks / 2);
        column = ks % 2 == 0 ? 0 : g_.nx;
    }

private:
    const StripOperators& ops_;
    const Grid& g_;
    int rows_;
};

double window_ratio(const StripOperators& ops, GridFunction v, int ell, int w0, int w1) {
    const double norm = v.sup_norm();
    if (norm == 0.0) return 0.0;
    for (int l = 0; l < ell; ++l) v = ops.apply_C(v);
    return v.sup_norm(w0, w1) / norm;
}

}  // namespace

NormEstimate estimate_C_power_norm(const StripOperators& ops, double T, int ell, const ProbeSet& probes) {
    if (ell < 1) throw OperatorError("composition power must be >= 1");
    const Grid& g = ops.grid();
    const int n = ops.components();
    const auto [w0, w1] = g.rows_within(T);
    if (w0 > w1) throw OperatorError("no grid rows inside |t| <= T");

    NormEstimate est;
    est.ell = ell;

    const ChainTable table(ops);
    const std::vector<Functional> side = ell > 1 ? table.side_level(ell - 1) : std::vector<Functional>{};
    const std::vector<Functional>* prev = ell > 1 ? &side : nullptr;

    // Exact absolute row sums of C^ell on the window; one best anchor per column block.
    struct Best {
        double sum = -1.0;
        int j = 0, i = 0, r = 0;
        bool clamped = false;
    };
    std::vector<Best> best(static_cast<std::size_t>(n) * (g.nx + 1));
    parallel_for(0, n * (g.nx + 1), [&](int b) {
        const int j = b / (g.nx + 1);
        const int i = b % (g.nx + 1);
        Best& out = best[b];
        for (int r = w0; r <= w1; ++r) {
            const Functional f = table.compose(j, i, r, prev);
            if (f.clamped) out.clamped = true;
            double s = 0.0;
            for (const auto& term : f.terms) s += std::abs(term.second);
            if (s > out.sum) out = {s, j, i, r, out.clamped};
        }
    });
    Best top;
    for (const auto& b : best) {
        if (b.clamped) {
            std::ostringstream os;
            os << "C^" << ell << " reads beyond the padded domain from the window; increase depth";
            throw OperatorError(os.str());
        }
        if (b.sum > top.sum) top = b;
    }
    est.row_sum = std::max(0.0, top.sum);
    est.witness = {top.j, -1, g.x(top.i), g.t(top.r), est.row_sum};

    double value = 0.0;
    if (probes.adversarial && est.row_sum > 0.0) {
        GridFunction v(n, g);
        for (const auto& [kk, c] : table.compose(top.j, top.i, top.r, prev).terms) {
            int k, column, row;
            table.unpack(kk, k, column, row);
            v.at(k, column, row) = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
        }
        value = std::max(value, window_ratio(ops, std::move(v), ell, w0, w1));
    }
    if (probes.sign_patterns) {
        const int patterns = n <= 10 ? (1 << n) : 2;
        for (int p = 0; p < patterns; ++p) {
            GridFunction v(n, g);
            for (int k = 0; k < n; ++k) {
                const double s = n <= 10 ? ((p >> k) & 1 ? -1.0 : 1.0) : (p == 1 && k % 2 ? -1.0 : 1.0);
                for (int i = 0; i <= g.nx; ++i)
                    for (int r = 0; r <= g.nt; ++r) v.at(k, i, r) = s;
            }
            value = std::max(value, window_ratio(ops, std::move(v), ell, w0, w1));
        }
    }
    std::mt19937_64 rng(probes.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int p = 0; p < probes.random; ++p) {
        GridFunction v(n, g);
        for (double& x : v.values()) x = uni(rng);
        value = std::max(value, window_ratio(ops, std::move(v), ell, w0, w1));
    }
    est.value = value;
    return est;
}

Domain dissipativity_domain(const ProblemSpec& spec, const Domain& dom, int ell_max) {
    const int depth = std::max(dom.depth, ell_max);
    Domain probe = make_domain(spec, dom.T, dom.nx, dom.nt, depth);
    // Keep the row spacing of the caller's grid.
    const double dt = 2.0 * dom.t_pad / dom.nt;
    // Linear interpolation lets each composition reach one row further back.
    const double reach = probe.t_pad + ell_max * dt;
    const int nt = std::max(dom.nt, static_cast<int>(std::ceil(2.0 * reach / dt - 1e-9)));
    probe.nt = nt;
    probe.t_pad = 0.5 * nt * dt;
    return probe;
}

HypothesisVerdict check_dissipativity(const ProblemSpec& spec, const Domain& dom, int ell_max,
                                      std::vector<NormEstimate>* estimates, bool scan_all) {
    HypothesisVerdict v;
    v.condition = Condition::dissipativity;
    if (spec.boundary.is_linear_zero()) {
        v.detail = "linear part of R vanishes, so C = 0 (l = 1)";
        if (estimates)
            for (int ell = 1; ell <= (scan_all ? ell_max : 1); ++ell) estimates->push_back(NormEstimate{ell, 0.0, 0.0, {}});
        return v;
    }
    const Domain probe = dissipativity_domain(spec, dom, ell_max);
    try {
        OperatorOptions oo;
        oo.reflection_only = true;
        const StripOperators ops(spec, probe.grid(), oo);
        NormEstimate last;
        bool found = false;
        for (int ell = 1; ell <= ell_max; ++ell) {
            last = estimate_C_power_norm(ops, dom.T, ell);
            if (estimates) estimates->push_back(last);
            const double value = std::max(last.value, last.row_sum);
            if (value < 1.0 && !found) {
                found = true;
                v.value = value;
                std::ostringstream os;
                os << "||C^" << ell << "|| ~ " << value << " < 1 (lower-bound estimate; exact for reflection-type R)";
                v.detail = os.str();
            }
            if (found && !scan_all) break;
        }
        if (found) return v;
        v.status = Status::fail;
        v.value = std::max(last.value, last.row_sum);
        v.witness = last.witness;
        std::ostringstream os;
        os << "||C^l|| >= 1 for l = 1.." << ell_max << "; ||C^" << ell_max << "|| ~ " << v.value << " at "
           << where(last.witness);
        v.detail = os.str();
    } catch (const TraceError& e) {
        v.status = Status::warn;
        v.detail = std::string("not estimated: ") + e.what();
    } catch (const OperatorError& e) {
        v.status = Status::warn;
        v.detail = std::string("not estimated: ") + e.what();
    }
    return v;
}

std::vector<HypothesisVerdict> run_all_checks(const ProblemSpec& spec, const Domain& dom,
                                              const DiagnosticOptions& opts, std::vector<NormEstimate>* estimates) {
    std::vector<HypothesisVerdict> out;
    out.push_back(check_smoothness(spec, dom));
    out.push_back(check_hyperbolicity(spec, dom, opts.a_min));
    out.push_back(check_R_regularity(spec));
    out.push_back(check_factorization(spec, dom, opts.factorization_tol, opts.factor_ratio_bound));
    out.push_back(check_dissipativity(spec, dom, opts.ell_max, estimates, opts.scan_all));
    out.push_back(check_coupling_decay(spec, dom, opts.decay_eps));
    return out;
}

bool all_pass(const std::vector<HypothesisVerdict>& verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.status == Status::pass; });
}

// ---------------------------------------------------------------------------

Residuals residuals(const StripOperators& ops, const GridFunction& u, double T) {
    const ProblemSpec& spec = ops.spec();
    const Grid& g = ops.grid();
    if (u.components() != spec.n || !(u.grid() == g)) throw OperatorError("grid function does not match the operators");
    const auto [w0, w1] = g.rows_within(T);
    Residuals res;
    if (w0 > w1) return res;

    const double dx = g.dx();
    const double dt = g.dt();
    const int r0 = std::max(w0, 1);
    const int r1 = std::min(w1, g.nt - 1);
    std::vector<double> pde(spec.n, 0.0);
    parallel_for(0, spec.n, [&](int j) {
        for (int i = 1; i < g.nx; ++i) {
            const double x = g.x(i);
            for (int r = r0; r <= r1; ++r) {
                const double t = g.t(r);
                double v = (u.at(j, i, r + 1) - u.at(j, i, r - 1)) / (2.0 * dt) +
                           spec.speeds[j].eval(x, t) * (u.at(j, i + 1, r) - u.at(j, i - 1, r)) / (2.0 * dx) -
                           spec.forcing[j].eval(x, t);
                for (int k = 0; k < spec.n; ++k)
                    if (!spec.coupling[j][k].is_zero()) v += spec.coupling[j][k].eval(x, t) * u.at(k, i, r);
                pde[j] = std::max(pde[j], std::abs(v));
            }
        }
    });
    for (double p : pde) res.pde = std::max(res.pde, p);

    for (int j = 0; j < spec.n; ++j) {
        const int col = side_column(spec.anchor_side(j), g.nx);
        for (int r = w0; r <= w1; ++r)
            res.bc = std::max(res.bc, std::abs(u.at(j, col, r) - apply_R(spec, u, j, g.t(r), false)));
    }

    GridFunction image = u;
    ops.apply_fixed_point(u, image, w0, w1);
    res.integral = sup_distance(image, u, w0, w1);
    return res;
}

}  // namespace hypstrip
