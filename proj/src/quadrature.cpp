#include "sparc/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sparc {

namespace {

GaussHermite compute_gauss_hermite(std::size_t n) {
    if (n < 2 || n > 512) throw std::invalid_argument("gauss_hermite: bad order");
    GaussHermite gh;
    gh.x.resize(n);
    gh.w.resize(n);
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    const std::size_t m = (n + 1) / 2;
    double z = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * gh.x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * gh.x[1];
        else
            z = 2.0 * z - gh.x[i - 2];
        double pp = 0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        gh.x[i] = z;
        gh.x[n - 1 - i] = -z;
        gh.w[i] = 2.0 / (pp * pp);
        gh.w[n - 1 - i] = gh.w[i];
    }
    return gh;
}

} // namespace

const GaussHermite& gauss_hermite(std::size_t n) {
    static std::map<std::size_t, GaussHermite> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_hermite(n)).first;
    return it->second;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

} // namespace sparc
