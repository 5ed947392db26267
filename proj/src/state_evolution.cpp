#include "sparc/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparc/quadrature.hpp"
#include "sparc/rng.hpp"

namespace sparc {

namespace {
constexpr std::size_t kQuadNodes = 160;

// Softmax weight of component `idx` given the effective-channel exponents
// u_0 = lnB/sigma2 + b z_0 (true component), u_k = b z_k.
double section_weight(double sigma2, const std::vector<double>& z, std::size_t idx) {
    if (!(sigma2 > 0)) throw std::invalid_argument("section weight: sigma2 must be > 0");
    const std::size_t B = z.size();
    if (B < 2) throw std::invalid_argument("section weight: need B >= 2");
    const double lnB = std::log(static_cast<double>(B));
    const double b = std::sqrt(lnB) / std::sqrt(sigma2);
    double m = -1e300;
    for (std::size_t k = 0; k < B; ++k) {
        const double u = b * z[k] + (k == 0 ? lnB / sigma2 : 0.0);
        if (u > m) m = u;
    }
    double s = 0.0, target = 0.0;
    for (std::size_t k = 0; k < B; ++k) {
        const double u = b * z[k] + (k == 0 ? lnB / sigma2 : 0.0);
        const double e = std::exp(u - m);
        s += e;
        if (k == idx) target = e;
    }
    return target / s;
}

} // namespace

double f_correct(double sigma2, const std::vector<double>& z) {
    return section_weight(sigma2, z, 0);
}

double f_wrong(double sigma2, const std::vector<double>& z) {
    return section_weight(sigma2, z, 1);
}

double sigma2_homogeneous(double E, const SEParams& p) {
    if (E < 0) throw std::invalid_argument("state evolution: E must be >= 0");
    return p.R * std::log(2.0) * (1.0 / p.snr + E);
}

double ser_from_sigma2(double sigma2, int B) {
    if (!(sigma2 > 0)) throw std::invalid_argument("ser_from_sigma2: sigma2 must be > 0");
    const double lnB = std::log(static_cast<double>(B));
    const double shift = std::sqrt(lnB / sigma2);
    const auto& gh = gauss_hermite(kQuadNodes);
    const double invsqrtpi = 0.5641895835477563;
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
        const double z = 1.4142135623730951 * gh.x[i];
        const double phi = normal_cdf(z + shift);
        acc += gh.w[i] * std::exp((B - 1) * std::log(phi));
    }
    return 1.0 - acc * invsqrtpi;
}

SEUpdate se_gaussian_update(double sigma2, int B, std::size_t samples, std::uint64_t seed) {
    if (!(sigma2 > 0)) throw std::invalid_argument("se update: sigma2 must be > 0");
    if (B < 2) throw std::invalid_argument("se update: need B >= 2");
    const double lnB = std::log(static_cast<double>(B));
    const double b = std::sqrt(lnB / sigma2);
    const double shift = lnB / sigma2;
    SEUpdate out;
    out.ser = ser_from_sigma2(sigma2, B);

    if (B == 2) {
        // One-dimensional quadrature over d = (z_2 - z_1)/sqrt(2).
        const auto& gh = gauss_hermite(kQuadNodes);
        const double invsqrtpi = 0.5641895835477563;
        double accE = 0.0, accF = 0.0;
        for (std::size_t i = 0; i < gh.x.size(); ++i) {
            const double d = 1.4142135623730951 * gh.x[i];
            const double arg = -shift + b * 1.4142135623730951 * d;
            const double f1 = 1.0 / (1.0 + std::exp(arg));
            accE += gh.w[i] * 2.0 * (1.0 - f1) * (1.0 - f1);
            accF += gh.w[i] * f1;
        }
        out.E = accE * invsqrtpi;
        out.E_overlap = 1.0 - accF * invsqrtpi;
        out.stderr_E = 0.0;
        out.ser_mc = out.ser;
        return out;
    }

    const std::size_t pairs = (samples + 1) / 2;
    const std::size_t batch = std::max<std::size_t>(1, 8192 / static_cast<std::size_t>(B));
    std::vector<double> z(batch * static_cast<std::size_t>(B));
    Xoshiro256 gen(seed);
    double sumE = 0.0, sumE2 = 0.0, sumF = 0.0;
    std::size_t ser_hits = 0;

    auto eval = [&](const double* zs, double z0, double& Eval, double& f1val, bool& err) {
        const double u0 = shift + b * z0;
        double zmax = zs[1];
        for (int k = 2; k < B; ++k) zmax = std::max(zmax, zs[k]);
        err = b * zmax > u0;
        if (u0 - b * zmax > 36.0) { // section decided; wrong weights below 1e-15
            Eval = 0.0;
            f1val = 1.0;
            return;
        }
        const double m = std::max(u0, b * zmax);
        double s = std::exp(u0 - m), sq = 0.0;
        const double e1 = s;
        for (int k = 1; k < B; ++k) {
            const double e = std::exp(b * zs[k] - m);
            s += e;
            sq += e * e;
        }
        const double f1 = e1 / s;
        Eval = (f1 - 1.0) * (f1 - 1.0) + sq / (s * s);
        f1val = f1;
    };

    std::size_t done = 0;
    while (done < pairs) {
        const std::size_t nb = std::min(batch, pairs - done);
        fill_normal(gen, z.data(), nb * static_cast<std::size_t>(B));
        for (std::size_t s = 0; s < nb; ++s) {
            const double* zs = z.data() + s * static_cast<std::size_t>(B);
            double E1, E2, f1, f2;
            bool err1, err2;
            eval(zs, zs[0], E1, f1, err1);
            eval(zs, -zs[0], E2, f2, err2); // antithetic in the true component
            const double Ep = 0.5 * (E1 + E2);
            sumE += Ep;
            sumE2 += Ep * Ep;
            sumF += 0.5 * (f1 + f2);
            ser_hits += err1;
            ser_hits += err2;
        }
        done += nb;
    }
    const double P = static_cast<double>(pairs);
    out.E = sumE / P;
    out.E_overlap = 1.0 - sumF / P;
    const double var = std::max(0.0, sumE2 / P - out.E * out.E);
    out.stderr_E = std::sqrt(var / P);
    out.ser_mc = static_cast<double>(ser_hits) / (2.0 * P);
    return out;
}

SEUpdate se_step(double E, const SEParams& p) {
    return se_gaussian_update(sigma2_homogeneous(E, p), p.B, p.mc_samples, p.seed);
}

std::vector<double> coupled_sigma2(const std::vector<double>& E,
                                   const VarianceProfile& prof, const SEParams& p) {
    if (E.size() != prof.Lc)
        throw std::invalid_argument("coupled state evolution: profile/E length mismatch");
    if (prof.alpha_r.size() != prof.Lr)
        throw std::invalid_argument("coupled state evolution: profile missing alpha_r");
    const double lnB = std::log(static_cast<double>(p.B));
    const double Lc = static_cast<double>(prof.Lc);
    std::vector<double> sig2(prof.Lc);
    for (std::size_t c = 0; c < prof.Lc; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < prof.Lr; ++r) {
            double denom = Lc / p.snr;
            for (std::size_t cc = 0; cc < prof.Lc; ++cc)
                denom += prof.at(r, cc) * E[cc];
            acc += prof.alpha_r[r] * prof.at(r, c) / denom;
        }
        if (acc <= 0)
            throw std::invalid_argument("coupled state evolution: block decoupled from all rows");
        sig2[c] = lnB / (static_cast<double>(p.B) * acc);
    }
    return sig2;
}

namespace {

std::vector<SEUpdate> coupled_step_seeded(const std::vector<double>& E,
                                          const VarianceProfile& prof, const SEParams& p,
                                          std::uint64_t base_seed) {
    const auto sig2 = coupled_sigma2(E, prof, p);
    std::vector<SEUpdate> out(prof.Lc);
    for (std::size_t c = 0; c < prof.Lc; ++c)
        out[c] = se_gaussian_update(sig2[c], p.B, p.mc_samples, derive_seed(base_seed, c));
    return out;
}

VarianceProfile trivial_profile(const SEParams& p) {
    VarianceProfile prof;
    prof.Lr = prof.Lc = 1;
    prof.J = {1.0};
    prof.alpha_r = {std::log2(static_cast<double>(p.B)) / (p.R * p.B)};
    return prof;
}

VarianceProfile powalloc_profile(const std::vector<double>& c_g, const SEParams& p) {
    for (double c : c_g)
        if (!(c > 0))
            throw std::invalid_argument("powalloc state evolution: amplitudes must be > 0");
    VarianceProfile prof;
    prof.Lr = 1;
    prof.Lc = c_g.size();
    prof.J.resize(c_g.size());
    for (std::size_t g = 0; g < c_g.size(); ++g) prof.J[g] = c_g[g] * c_g[g];
    const double alpha = std::log2(static_cast<double>(p.B)) / (p.R * p.B);
    prof.alpha_r = {static_cast<double>(c_g.size()) * alpha};
    return prof;
}

} // namespace

std::vector<SEUpdate> se_step_coupled(const std::vector<double>& E,
                                      const VarianceProfile& profile, const SEParams& p) {
    return coupled_step_seeded(E, profile, p, p.seed);
}

std::vector<SEUpdate> se_step_powalloc(const std::vector<double>& E,
                                       const std::vector<double>& c_g, const SEParams& p) {
    return coupled_step_seeded(E, powalloc_profile(c_g, p), p, p.seed);
}

SETrajectory se_run(const SEParams& p, const SEMode& mode, std::size_t t_max, double tol,
                    const std::vector<double>* E0) {
    VarianceProfile prof;
    switch (mode.kind) {
    case SEMode::Homogeneous: prof = trivial_profile(p); break;
    case SEMode::Coupled: prof = mode.profile; break;
    case SEMode::Powalloc: prof = powalloc_profile(mode.c_g, p); break;
    }
    std::vector<double> E(prof.Lc, 1.0);
    if (E0 != nullptr) {
        if (E0->size() != prof.Lc)
            throw std::invalid_argument("se_run: initial state length mismatch");
        E = *E0;
    }
    SETrajectory traj;
    for (std::size_t t = 0; t < t_max; ++t) {
        const auto sig2 = coupled_sigma2(E, prof, p);
        const auto upd = coupled_step_seeded(E, prof, p, derive_seed(p.seed, t));
        double dmax = 0.0;
        std::vector<double> Enew(prof.Lc), ser(prof.Lc);
        for (std::size_t c = 0; c < prof.Lc; ++c) {
            Enew[c] = upd[c].E;
            ser[c] = upd[c].ser;
            dmax = std::max(dmax, std::abs(Enew[c] - E[c]));
        }
        E = Enew;
        traj.E.push_back(E);
        traj.sigma2.push_back(sig2);
        traj.ser.push_back(ser);
        traj.iterations = t + 1;
        if (dmax < tol) {
            traj.converged = true;
            break;
        }
    }
    return traj;
}

ThresholdResult find_r_bp_se(int B, double snr, std::size_t mc_samples, std::uint64_t seed,
                             double r_tol, std::size_t t_max) {
    (void)t_max;
    // Decodable at rate R iff the update map has no fixed point above the
    // error floor, i.e. E'(E) < E on the whole high-MSE range. Crossings must
    // clear two standard errors so one noisy grid point cannot flip the
    // verdict. A cheap coarse scan flags candidate crossings; only those get
    // the full sample budget.
    const std::size_t grid = 32;
    auto grid_E = [&](std::size_t i) {
        return 0.03 * std::pow(1.0 / 0.03,
                               static_cast<double>(i) / static_cast<double>(grid - 1));
    };
    auto decodable = [&](double R) {
        SEParams p{B, R, snr, mc_samples, seed};
        std::vector<std::size_t> flagged;
        const std::size_t mc_coarse = std::max<std::size_t>(2000, mc_samples / 8);
        for (std::size_t i = 0; i < grid; ++i) {
            const double E = grid_E(i);
            const auto u = se_gaussian_update(sigma2_homogeneous(E, p), B, mc_coarse,
                                              derive_seed(seed, i));
            if (u.E - E + 2.0 * u.stderr_E >= 0) flagged.push_back(i);
        }
        for (std::size_t i : flagged) {
            const double E = grid_E(i);
            const auto u = se_gaussian_update(sigma2_homogeneous(E, p), B, mc_samples,
                                              derive_seed(seed, i + 1000));
            if (u.E - E >= 2.0 * u.stderr_E) return false;
        }
        return true;
    };
    double lo = 0.05, hi = 0.5 * std::log2(1.0 + snr) * 1.05;
    ThresholdResult res;
    if (!decodable(lo)) return res;
    if (decodable(hi)) {
        res.found = true;
        res.R = hi;
        return res;
    }
    while (hi - lo > r_tol) {
        const double mid = 0.5 * (lo + hi);
        if (decodable(mid)) lo = mid;
        else hi = mid;
    }
    res.found = true;
    res.R = 0.5 * (lo + hi);
    return res;
}

} // namespace sparc
