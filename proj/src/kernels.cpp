#include "hypstrip/kernels.hpp"

#include <cmath>

namespace hypstrip {

double kernel_c(const ProblemSpec& spec, const CharacteristicPath& path, double xi) {
    const int j = path.component;
    const Expr& a = spec.speeds[j];
    const Expr& b = spec.coupling[j][j];
    const std::size_t target = path.node_index(xi);
    if (b.is_zero()) return 1.0;

    auto integrand = [&](std::size_t i) { return b.eval(path.xi[i], path.omega[i]) / a.eval(path.xi[i], path.omega[i]); };
    double sum = 0.0;
    if (target > path.anchor) {
        for (std::size_t i = path.anchor; i < target; ++i)
            sum += 0.5 * (integrand(i) + integrand(i + 1)) * (path.xi[i + 1] - path.xi[i]);
    } else {
        for (std::size_t i = path.anchor; i > target; --i)
            sum -= 0.5 * (integrand(i) + integrand(i - 1)) * (path.xi[i] - path.xi[i - 1]);
    }
    return std::exp(sum);
}

double kernel_d(const ProblemSpec& spec, const CharacteristicPath& path, double xi) {
    return kernel_at(spec, path, xi).d;
}

KernelSample kernel_at(const ProblemSpec& spec, const CharacteristicPath& path, double xi) {
    const std::size_t i = path.node_index(xi);
    KernelSample s;
    s.c = kernel_c(spec, path, xi);
    s.d = s.c / spec.speeds[path.component].eval(path.xi[i], path.omega[i]);
    return s;
}

}  // namespace hypstrip
