#pragma once
// State evolution: the asymptotic per-section MSE recursion tracked by the
// AMP decoder, in homogeneous, spatially coupled and power-allocated forms,
// plus the MSE -> SER map.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparc/operators.hpp"

namespace sparc {

struct SEParams {
    int B = 2;
    double R = 1.0;
    double snr = 1.0;
    std::size_t mc_samples = 1'000'000;
    std::uint64_t seed = 1;
};

// Posterior weight of the true component (f_correct) and of one wrong
// component (f_wrong) for a section observed through the effective scalar
// channel with noise variance sigma2; z holds the B standard normals.
double f_correct(double sigma2, const std::vector<double>& z);
double f_wrong(double sigma2, const std::vector<double>& z);

double sigma2_homogeneous(double E, const SEParams& p);

// One Gaussian-expectation update at fixed sigma2. E is the full-sum form,
// E_overlap the equivalent 1 - E[f_correct] form; ser is the deterministic
// quadrature value, ser_mc the literal Monte Carlo indicator. B = 2 is
// evaluated by quadrature (stderr 0).
struct SEUpdate {
    double E = 0;
    double E_overlap = 0;
    double stderr_E = 0;
    double ser = 0;
    double ser_mc = 0;
};

SEUpdate se_gaussian_update(double sigma2, int B, std::size_t samples, std::uint64_t seed);

// Deterministic SER map: P[some wrong component beats the true one].
double ser_from_sigma2(double sigma2, int B);

// Homogeneous step: returns (E', ser').
SEUpdate se_step(double E, const SEParams& p);

// Effective noise per column block of the coupled recursion.
std::vector<double> coupled_sigma2(const std::vector<double>& E,
                                   const VarianceProfile& profile, const SEParams& p);

// Coupled step; E has one entry per column block, profile supplies J and the
// per-block-row measurement rates.
std::vector<SEUpdate> se_step_coupled(const std::vector<double>& E,
                                      const VarianceProfile& profile, const SEParams& p);

// Power-allocation step over G groups with amplitudes c_g.
std::vector<SEUpdate> se_step_powalloc(const std::vector<double>& E,
                                       const std::vector<double>& c_g, const SEParams& p);

struct SEMode {
    enum Kind { Homogeneous, Coupled, Powalloc } kind = Homogeneous;
    VarianceProfile profile; // Coupled
    std::vector<double> c_g; // Powalloc
};

struct SETrajectory {
    // One row per iteration; row width is 1, Lc or G depending on the mode.
    std::vector<std::vector<double>> E;
    std::vector<std::vector<double>> sigma2;
    std::vector<std::vector<double>> ser;
    std::size_t iterations = 0;
    bool converged = false;
};

// Iterates from E0 (all ones by default) until max |dE| < tol or t_max.
// Sub-streams are derived per (iteration, block), so the coupled run with a
// trivial 1x1 profile replays the homogeneous run bit for bit.
SETrajectory se_run(const SEParams& p, const SEMode& mode, std::size_t t_max = 500,
                    double tol = 1e-9, const std::vector<double>* E0 = nullptr);

// Largest R at which the recursion started from E0 = 1 reaches a low-error
// fixed point; bisection to r_tol. found = false when even the lower edge of
// the scan fails.
struct ThresholdResult {
    bool found = false;
    double R = 0;
};

ThresholdResult find_r_bp_se(int B, double snr, std::size_t mc_samples = 100'000,
                             std::uint64_t seed = 1, double r_tol = 1e-3,
                             std::size_t t_max = 2000);

} // namespace sparc
