#include "sparc/replica.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparc/quadrature.hpp"
#include "sparc/rng.hpp"

namespace sparc {

double capacity(double snr) {
    if (snr <= 0) throw std::invalid_argument("capacity: snr must be > 0");
    return 0.5 * std::log2(1.0 + snr);
}

double r_bp_infinity(double snr) {
    if (snr <= 0) throw std::invalid_argument("r_bp_infinity: snr must be > 0");
    return 1.0 / ((1.0 / snr + 1.0) * 2.0 * std::log(2.0));
}

double potential_large_B(double E, double R, double snr) {
    if (E < 0) throw std::invalid_argument("potential_large_B: E must be >= 0");
    const double nvar = 1.0 / snr;
    const double sigma2 = R * std::log(2.0) * (nvar + E);
    const double t1 = -(std::log(nvar + E) + (1.0 - E) / (nvar + E)) / (2.0 * R * std::log(2.0));
    return t1 + std::max(1.0, 1.0 / (2.0 * sigma2));
}

namespace {

constexpr std::size_t kQuadNodes = 160;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrtPi = 0.5641895835477563;

double first_term(double E, int B, double R, double snr) {
    const double nvar = 1.0 / snr;
    return -std::log(static_cast<double>(B))
           * (std::log(nvar + E) + (1.0 - E) / (nvar + E))
           / (2.0 * R * std::log(2.0));
}

// E_z[ln(Z1 + Z2)] for B = 2, reduced to one dimension.
double integral_b2(double sigma2) {
    const double lnB = std::log(2.0);
    const double a = lnB / (2.0 * sigma2);
    const double b = std::sqrt(lnB / sigma2);
    const auto& gh = gauss_hermite(kQuadNodes);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
        const double d = kSqrt2 * gh.x[i];
        const double u1 = a;
        const double u2 = -a + b * kSqrt2 * d;
        const double m = std::max(u1, u2);
        acc += gh.w[i] * (m + std::log(std::exp(u1 - m) + std::exp(u2 - m)));
    }
    return acc * kInvSqrtPi;
}

// Per-sample ln(Z1+Z2) minus the mean-zero control variate b*z1.
double sample_lse(const double* z, int B, double a, double b) {
    const double u1 = a + b * z[0];
    double m = u1;
    for (int k = 1; k < B; ++k) m = std::max(m, -a + b * z[k]);
    double s = std::exp(u1 - m);
    for (int k = 1; k < B; ++k) s += std::exp(-a + b * z[k] - m);
    return m + std::log(s) - b * z[0];
}

} // namespace

PotentialValue potential(double E, int B, double R, double snr, std::size_t mc_samples,
                         std::uint64_t seed) {
    if (E < 0) throw std::invalid_argument("potential: E must be >= 0");
    const double nvar = 1.0 / snr;
    const double sigma2 = R * std::log(2.0) * (nvar + E);
    PotentialValue out;
    if (B == 2) {
        out.value = first_term(E, B, R, snr) + integral_b2(sigma2);
        return out;
    }
    const double lnB = std::log(static_cast<double>(B));
    const double a = lnB / (2.0 * sigma2);
    const double b = std::sqrt(lnB / sigma2);
    const std::size_t batch = std::max<std::size_t>(1, 8192 / static_cast<std::size_t>(B));
    std::vector<double> z(batch * static_cast<std::size_t>(B));
    Xoshiro256 gen(seed);
    double sum = 0.0, sum2 = 0.0;
    std::size_t done = 0;
    while (done < mc_samples) {
        const std::size_t nb = std::min(batch, mc_samples - done);
        fill_normal(gen, z.data(), nb * static_cast<std::size_t>(B));
        for (std::size_t s = 0; s < nb; ++s) {
            const double v = sample_lse(z.data() + s * static_cast<std::size_t>(B), B, a, b);
            sum += v;
            sum2 += v * v;
        }
        done += nb;
    }
    const double n = static_cast<double>(mc_samples);
    const double mean = sum / n;
    out.value = first_term(E, B, R, snr) + mean;
    out.std_err = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    return out;
}

PotentialValue potential_diff(double E, double h, int B, double R, double snr,
                              std::size_t mc_samples, std::uint64_t seed) {
    if (E - h < 0) throw std::invalid_argument("potential_diff: E - h must be >= 0");
    const double nvar = 1.0 / snr;
    const double lnB = std::log(static_cast<double>(B));
    const double s2p = R * std::log(2.0) * (nvar + E + h);
    const double s2m = R * std::log(2.0) * (nvar + E - h);
    const double t1 = first_term(E + h, B, R, snr) - first_term(E - h, B, R, snr);
    PotentialValue out;
    if (B == 2) {
        out.value = (t1 + integral_b2(s2p) - integral_b2(s2m)) / (2.0 * h);
        return out;
    }
    const double ap = lnB / (2.0 * s2p), bp = std::sqrt(lnB / s2p);
    const double am = lnB / (2.0 * s2m), bm = std::sqrt(lnB / s2m);
    const std::size_t batch = std::max<std::size_t>(1, 8192 / static_cast<std::size_t>(B));
    std::vector<double> z(batch * static_cast<std::size_t>(B));
    Xoshiro256 gen(seed);
    double sum = 0.0, sum2 = 0.0;
    std::size_t done = 0;
    while (done < mc_samples) {
        const std::size_t nb = std::min(batch, mc_samples - done);
        fill_normal(gen, z.data(), nb * static_cast<std::size_t>(B));
        for (std::size_t s = 0; s < nb; ++s) {
            const double* zs = z.data() + s * static_cast<std::size_t>(B);
            const double v = sample_lse(zs, B, ap, bp) - sample_lse(zs, B, am, bm);
            sum += v;
            sum2 += v * v;
        }
        done += nb;
    }
    const double n = static_cast<double>(mc_samples);
    const double mean = sum / n;
    out.value = (t1 + mean) / (2.0 * h);
    out.std_err = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n) / (2.0 * h);
    return out;
}

namespace {

std::vector<double> make_grid() {
    std::vector<double> g;
    const std::size_t n_log = 200, n_lin = 200;
    for (std::size_t i = 0; i < n_log; ++i)
        g.push_back(1e-8 * std::pow(1e6, static_cast<double>(i) / (n_log - 1)));
    for (std::size_t i = 1; i <= n_lin; ++i)
        g.push_back(1e-2 + (1.2 - 1e-2) * static_cast<double>(i) / n_lin);
    return g;
}

// A maximum counts when it beats the adjacent valleys by two combined
// standard errors; returns false when the verdict is within noise.
bool locate_maxima(const std::vector<double>& E, const std::vector<double>& phi,
                   const std::vector<double>& se,
                   std::vector<std::pair<double, double>>& maxima) {
    maxima.clear();
    const std::size_t n = phi.size();
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || phi[i] >= phi[i - 1];
        const bool right_ok = (i + 1 == n) || phi[i] > phi[i + 1];
        if (left_ok && right_ok) cand.push_back(i);
    }
    bool confident = true;
    for (std::size_t idx : cand) {
        // Walk toward the nearest higher point on each side, tracking the
        // saddle. A side that reaches the grid boundary without meeting a
        // higher point does not bound the prominence.
        double lmin = phi[idx], rmin = phi[idx];
        double lse = se[idx], rse = se[idx];
        bool left_blocked = false, right_blocked = false;
        for (std::size_t j = idx; j-- > 0;) {
            if (phi[j] > phi[idx]) {
                left_blocked = true;
                break;
            }
            if (phi[j] < lmin) {
                lmin = phi[j];
                lse = se[j];
            }
        }
        for (std::size_t j = idx + 1; j < n; ++j) {
            if (phi[j] > phi[idx]) {
                right_blocked = true;
                break;
            }
            if (phi[j] < rmin) {
                rmin = phi[j];
                rse = se[j];
            }
        }
        if (!left_blocked && !right_blocked) {
            maxima.emplace_back(E[idx], phi[idx]); // global maximum
            continue;
        }
        const double prom = phi[idx] - std::max(left_blocked ? lmin : -1e300,
                                                right_blocked ? rmin : -1e300);
        const double tol = 2.0 * (se[idx] + std::max(lse, rse));
        if (prom > tol) {
            maxima.emplace_back(E[idx], phi[idx]);
        } else if (prom > 0 && tol > 0 && prom > 0.25 * tol) {
            confident = false; // borderline: ask for more samples
        }
    }
    return confident;
}

} // namespace

PotentialCurve potential_curve(int B, double R, double snr, std::size_t mc_samples,
                               std::uint64_t seed, std::size_t max_samples) {
    PotentialCurve curve;
    curve.E_grid = make_grid();
    curve.seed = seed;
    std::size_t samples = mc_samples;
    while (true) {
        curve.mc_samples = samples;
        curve.phi.assign(curve.E_grid.size(), 0.0);
        curve.std_err.assign(curve.E_grid.size(), 0.0);
        // One shared noise stream for every grid point: differences along the
        // curve then cancel most of the Monte Carlo error, so maxima are
        // located reliably with far fewer samples than independent draws
        // would need.
        for (std::size_t i = 0; i < curve.E_grid.size(); ++i) {
            const auto pv = potential(curve.E_grid[i], B, R, snr, samples, seed);
            curve.phi[i] = pv.value;
            curve.std_err[i] = pv.std_err;
        }
        const bool ok = locate_maxima(curve.E_grid, curve.phi, curve.std_err, curve.maxima);
        if (ok || B == 2 || samples >= max_samples) break;
        samples = std::min(max_samples, samples * 2);
    }
    return curve;
}

namespace {

// Maxima split into the low-error branch and the high-error branch.
struct BranchMaxima {
    bool has_low = false, has_high = false;
    double phi_low = 0, phi_high = 0;
    double E_high = 0;
};

BranchMaxima split_maxima(const PotentialCurve& curve) {
    BranchMaxima bm;
    for (const auto& [E, phi] : curve.maxima) {
        if (E < 0.1) {
            if (!bm.has_low || phi > bm.phi_low) {
                bm.has_low = true;
                bm.phi_low = phi;
            }
        } else {
            if (!bm.has_high || phi > bm.phi_high) {
                bm.has_high = true;
                bm.phi_high = phi;
                bm.E_high = E;
            }
        }
    }
    return bm;
}

} // namespace

ThresholdResult find_r_bp(int B, double snr, double r_tol, std::size_t mc_samples,
                          std::uint64_t seed) {
    auto branches = [&](double R) {
        return split_maxima(potential_curve(B, R, snr, mc_samples, seed, 4 * mc_samples));
    };
    auto has_high = [&](double R) { return branches(R).has_high; };
    double lo = 0.02, hi = 1.5 * capacity(snr);
    ThresholdResult res;
    if (!has_high(hi)) return res; // no high-error state in range
    if (has_high(lo)) {
        hi = lo;
    } else {
        while (hi - lo > r_tol) {
            const double mid = 0.5 * (lo + hi);
            if (has_high(mid)) hi = mid;
            else lo = mid;
        }
    }
    // A genuine transition has both states coexisting just above the onset;
    // a unique maximum drifting to large E (high-noise regime) does not.
    const auto bm = branches(std::min(hi + 5.0 * r_tol, 1.5 * capacity(snr)));
    if (!(bm.has_high && bm.has_low)) return res;
    res.found = true;
    res.R = 0.5 * (lo + hi);
    return res;
}

ThresholdResult find_r_opt(int B, double snr, double r_tol, std::size_t mc_samples,
                           std::uint64_t seed) {
    const auto rbp = find_r_bp(B, snr, r_tol, mc_samples, seed);
    ThresholdResult res;
    if (!rbp.found) return res;
    auto high_wins = [&](double R) {
        const auto bm =
            split_maxima(potential_curve(B, R, snr, mc_samples, seed, 4 * mc_samples));
        if (!bm.has_high) return false;
        if (!bm.has_low) return true;
        return bm.phi_high > bm.phi_low;
    };
    double lo = rbp.R, hi = 1.5 * capacity(snr);
    if (!high_wins(hi)) return res; // the high-error state never takes over
    while (hi - lo > r_tol) {
        const double mid = 0.5 * (lo + hi);
        if (high_wins(mid)) hi = mid;
        else lo = mid;
    }
    res.found = true;
    res.R = 0.5 * (lo + hi);
    return res;
}

double optimal_ser(int B, double R, double snr, std::size_t mc_samples, std::uint64_t seed) {
    SEParams p{B, R, snr, mc_samples, seed};
    SEMode mode;
    const std::vector<double> E0{0.0};
    const auto traj = se_run(p, mode, 500, 1e-10, &E0);
    const double Efix = traj.E.back()[0];
    return ser_from_sigma2(sigma2_homogeneous(Efix, p), B);
}

PhaseDiagramPoint phase_diagram_point(int B, double snr, std::size_t mc_samples,
                                      std::uint64_t seed) {
    PhaseDiagramPoint pt;
    pt.B = B;
    pt.snr = snr;
    pt.capacity = capacity(snr);
    pt.r_bp = find_r_bp(B, snr, 1e-3, mc_samples, seed);
    pt.r_opt = find_r_opt(B, snr, 1e-3, mc_samples, seed);
    if (pt.r_bp.found)
        pt.ser_at_low_maximum = optimal_ser(B, pt.r_bp.R, snr, mc_samples, seed);
    return pt;
}

} // namespace sparc
