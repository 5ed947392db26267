#pragma once
// Replica-symmetric potential of the MSE, its large-B limit, threshold
// finders and phase-diagram helpers.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparc/state_evolution.hpp"

namespace sparc {

struct PotentialValue {
    double value = 0;
    double std_err = 0;
};

// Phi_B(E); Monte Carlo with a control variate for B > 2, deterministic
// quadrature for B = 2 (stderr 0).
PotentialValue potential(double E, int B, double R, double snr,
                         std::size_t mc_samples = 1'000'000, std::uint64_t seed = 1);

// Centered finite difference (Phi(E+h) - Phi(E-h)) / 2h with common random
// numbers across the two evaluations.
PotentialValue potential_diff(double E, double h, int B, double R, double snr,
                              std::size_t mc_samples = 1'000'000, std::uint64_t seed = 1);

// Large-B closed form.
double potential_large_B(double E, double R, double snr);

double capacity(double snr);
double r_bp_infinity(double snr);

struct PotentialCurve {
    std::vector<double> E_grid;
    std::vector<double> phi;
    std::vector<double> std_err;
    std::size_t mc_samples = 0;
    std::uint64_t seed = 0;
    // Located local maxima as (E*, Phi*), sorted by E; grid boundaries count
    // when the curve falls away from them.
    std::vector<std::pair<double, double>> maxima;
};

// 400-point scan: log-spaced on [1e-8, 1e-2], linear up to 1.2. Maxima must
// clear their neighbourhood by two combined standard errors; ambiguous
// curves are re-sampled with doubled sample counts up to max_samples.
PotentialCurve potential_curve(int B, double R, double snr,
                               std::size_t mc_samples = 1'000'000, std::uint64_t seed = 1,
                               std::size_t max_samples = 10'000'000);

// Smallest R at which a second, high-MSE local maximum of Phi_B appears
// (bisection to r_tol); found = false when no transition exists in the
// scanned range.
ThresholdResult find_r_bp(int B, double snr, double r_tol = 1e-3,
                          std::size_t mc_samples = 1'000'000, std::uint64_t seed = 1);

// Rate at which the two maxima exchange heights.
ThresholdResult find_r_opt(int B, double snr, double r_tol = 1e-3,
                           std::size_t mc_samples = 1'000'000, std::uint64_t seed = 1);

// SER of the low-MSE state: state evolution from E = 0 to its fixed point,
// mapped through the deterministic SER integral.
double optimal_ser(int B, double R, double snr, std::size_t mc_samples = 1'000'000,
                   std::uint64_t seed = 1);

struct PhaseDiagramPoint {
    int B = 0;
    double snr = 0;
    ThresholdResult r_bp;
    ThresholdResult r_opt;
    double capacity = 0;
    double ser_at_low_maximum = 0;
};

PhaseDiagramPoint phase_diagram_point(int B, double snr, std::size_t mc_samples = 1'000'000,
                                      std::uint64_t seed = 1);

} // namespace sparc
