#pragma once
// Gauss-Hermite rules for expectations over standard normals:
//   E_z[g(z)] ~= (1/sqrt(pi)) * sum_i w_i g(sqrt(2) x_i).

#include <cstddef>
#include <vector>

namespace sparc {

struct GaussHermite {
    std::vector<double> x; // nodes of the physicists' rule (weight e^{-x^2})
    std::vector<double> w;
};

// Nodes and weights by Newton iteration on the Hermite recurrence.
const GaussHermite& gauss_hermite(std::size_t n);

double normal_cdf(double x);

} // namespace sparc
