#pragma once

// Sampled checks of the standing hypotheses on a ProblemSpec, the ||C^l||
// estimator, and residuals of a grid function against the PDE, the boundary
// conditions and the integral form.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypstrip/grid.hpp"
#include "hypstrip/operators.hpp"

namespace hypstrip {

enum class Condition { smoothness, hyperbolicity, r_regularity, factorization, dissipativity, coupling_decay };
enum class Status { pass, warn, fail };

std::string to_string(Condition c);
std::string to_string(Status s);

struct Witness {
    int j = -1;
    int k = -1;
    double x = 0.0;
    double t = 0.0;
    double value = 0.0;
};

struct HypothesisVerdict {
    Condition condition = Condition::smoothness;
    Status status = Status::pass;
    double value = 0.0;  // the measured quantity the status is based on
    std::optional<Witness> witness;
    std::string detail;
};

struct DiagnosticOptions {
    double a_min = 1e-6;
    double factorization_tol = 1e-9;
    double factor_ratio_bound = 1e6;  // warn when sup |b_jk| / |a_k - a_j| exceeds this
    double decay_eps = 1e-9;
    int ell_max = 8;
    bool scan_all = false;  // estimate every l up to ell_max, not just up to the first below 1
};

HypothesisVerdict check_hyperbolicity(const ProblemSpec& spec, const Domain& dom, double a_min = 1e-6);
HypothesisVerdict check_smoothness(const ProblemSpec& spec, const Domain& dom);
HypothesisVerdict check_R_regularity(const ProblemSpec& spec);
HypothesisVerdict check_factorization(const ProblemSpec& spec, const Domain& dom, double tol = 1e-9,
                                      double ratio_bound = 1e6);
/// Sup of off-diagonal |b_jk| over the padded domain outside [-T/2, T/2].
HypothesisVerdict check_coupling_decay(const ProblemSpec& spec, const Domain& dom, double eps = 1e-9);

struct ProbeSet {
    bool adversarial = true;
    bool sign_patterns = true;
    int random = 64;
    std::uint64_t seed = 0x5eed5eedULL;
};

struct NormEstimate {
    int ell = 1;
    double value = 0.0;          // max over probes of ||C^l v|| / ||v|| on |t| <= T
    double row_sum = 0.0;        // max absolute row sum of the discrete C^l over the same rows
    Witness witness;             // anchor attaining row_sum
};

/// Lower bound for ||C^l|| on the window |t| <= T of `ops`' grid. Throws
/// OperatorError when a composition chain from the window reads beyond +-t_pad.
NormEstimate estimate_C_power_norm(const StripOperators& ops, double T, int ell, const ProbeSet& probes = {});

/// Domain for the dissipativity check: same T and spacing as `dom`, with depth >= ell_max
/// plus one row of slack per composition.
Domain dissipativity_domain(const ProblemSpec& spec, const Domain& dom, int ell_max);

/// Scans l = 1..ell_max and passes at the first l with estimate < 1.
HypothesisVerdict check_dissipativity(const ProblemSpec& spec, const Domain& dom, int ell_max = 8,
                                      std::vector<NormEstimate>* estimates = nullptr, bool scan_all = false);

std::vector<HypothesisVerdict> run_all_checks(const ProblemSpec& spec, const Domain& dom,
                                              const DiagnosticOptions& opts = {},
                                              std::vector<NormEstimate>* estimates = nullptr);

bool all_pass(const std::vector<HypothesisVerdict>& verdicts);

struct Residuals {
    double pde = 0.0;
    double bc = 0.0;
    double integral = 0.0;
};

/// Residuals on rows |t| <= T. The PDE residual uses centered differences at
/// interior nodes; the integral residual uses `ops` (which carries f and the data).
Residuals residuals(const StripOperators& ops, const GridFunction& u, double T);

}  // namespace hypstrip
