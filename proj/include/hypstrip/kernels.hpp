#pragma once

// Weights along a traced characteristic:
//   c_j(xi; x, t) = exp( int_x^xi (b_jj / a_j)(eta, omega_j(eta)) d eta ),
//   d_j(xi; x, t) = c_j(xi; x, t) / a_j(xi, omega_j(xi)).
// The integral is the composite trapezoid rule on the path nodes.

#include "hypstrip/characteristics.hpp"

namespace hypstrip {

struct KernelSample {
    double c = 1.0;
    double d = 0.0;
};

double kernel_c(const ProblemSpec& spec, const CharacteristicPath& path, double xi);
double kernel_d(const ProblemSpec& spec, const CharacteristicPath& path, double xi);
KernelSample kernel_at(const ProblemSpec& spec, const CharacteristicPath& path, double xi);

}  // namespace hypstrip
