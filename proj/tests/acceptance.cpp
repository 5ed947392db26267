// Acceptance suite: end-to-end checks of thresholds, state evolution, the
// decoders and the operator implementations. Each criterion prints one
// PASS/FAIL line with its pinned tolerances and wall time; the binary exits
// nonzero if any criterion fails. Optional argv: criterion numbers to run.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sparc/amp.hpp"
#include "sparc/core.hpp"
#include "sparc/operators.hpp"
#include "sparc/replica.hpp"
#include "sparc/rng.hpp"
#include "sparc/state_evolution.hpp"

using namespace sparc;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void note(Outcome& o, bool cond, const std::string& msg) {
    if (!cond) {
        o.ok = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += msg;
    }
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void run(int idx, const char* name, double budget_s, const std::set<int>& only,
         const std::function<Outcome()>& fn) {
    if (!only.empty() && !only.count(idx)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (el > budget_s) {
        o.ok = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += "over time budget";
    }
    if (!o.ok) ++failures;
    std::printf("[%s] %2d %-52s %7.1fs / %.0fs%s%s\n", o.ok ? "PASS" : "FAIL", idx, name, el,
                budget_s, o.detail.empty() ? "" : "  -- ", o.detail.c_str());
    std::fflush(stdout);
}

// ---- criterion 1: B = 2 phase boundaries at snr = 100 --------------------

Outcome crit1() {
    Outcome o;
    const auto rbp = find_r_bp(2, 100.0);
    note(o, rbp.found, "no algorithmic threshold found");
    if (rbp.found)
        note(o, std::abs(rbp.R - 1.955) <= 0.03, "r_bp=" + fmt("%.4f", rbp.R) + " vs 1.955+-0.03");
    const auto ropt = find_r_opt(2, 100.0);
    note(o, ropt.found, "no optimal threshold found");
    if (ropt.found)
        note(o, std::abs(ropt.R - 2.68) <= 0.03, "r_opt=" + fmt("%.4f", ropt.R) + " vs 2.68+-0.03");
    const double cap = capacity(100.0);
    note(o, std::abs(cap - 3.3291) <= 1e-4, "capacity=" + fmt("%.5f", cap) + " vs 3.3291+-1e-4");
    return o;
}

// ---- criterion 2: large-B potential identities and threshold -------------

Outcome crit2() {
    Outcome o;
    for (double snr : {1.0, 10.0, 15.0, 100.0}) {
        const double C = capacity(snr);
        const double rb = r_bp_infinity(snr);
        // the E = 1 value needs the high-error entropy branch, active above
        // the large-B algorithmic threshold; the E = 0 value needs
        // R < snr / (2 ln 2), satisfied throughout this range
        const double r_lo = std::max(0.6 * C, 1.05 * rb);
        for (double R : {r_lo, C, 1.3 * C}) {
            const double p0 = potential_large_B(0.0, R, snr);
            const double p1 = potential_large_B(1.0, R, snr);
            note(o, std::abs(p0 - std::log2(snr) / (2.0 * R)) <= 1e-12,
                 "phi(0) identity off at snr=" + fmt("%.0f", snr));
            note(o, std::abs(p1 - (1.0 - std::log2(1.0 / snr + 1.0) / (2.0 * R))) <= 1e-12,
                 "phi(1) identity off at snr=" + fmt("%.0f", snr));
        }
        note(o,
             std::abs(potential_large_B(0.0, C, snr) - potential_large_B(1.0, C, snr)) <= 1e-12,
             "phi(0) != phi(1) at capacity, snr=" + fmt("%.0f", snr));

        // numeric onset of the high-error maximum: sign change of the slope
        // at E = 1, bisected in R, against the closed form. Backward
        // difference: the entropy branch switch crosses E = 1 exactly at the
        // threshold, so a window reaching past 1 would straddle the kink.
        // Above threshold the smooth part is stationary at E = 1, so the
        // difference is O(h^2); h is sized to keep that above roundoff while
        // the kink sweeps through the window over an R-range below 1e-6.
        const double h = 3e-7;
        auto slope_at_one = [&](double R) {
            return (potential_large_B(1.0, R, snr) - potential_large_B(1.0 - h, R, snr)) / h;
        };
        double lo = 0.5 * rb, hi = 1.5 * rb;
        note(o, slope_at_one(lo) < 0.0 && slope_at_one(hi) > 0.0, "slope bracket invalid");
        for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (slope_at_one(mid) > 0.0 ? hi : lo) = mid;
        }
        const double numeric = 0.5 * (lo + hi);
        note(o, std::abs(numeric - rb) <= 1e-6,
             "numeric onset " + fmt("%.8f", numeric) + " vs closed form " + fmt("%.8f", rb) +
                 " at snr=" + fmt("%.0f", snr));
    }
    return o;
}

// ---- criterion 3: SE fixed points are stationary points of the potential -

Outcome crit3() {
    Outcome o;
    Xoshiro256 rng(2024);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
        const int B = 2 + static_cast<int>(rng() % 7);
        const double snr = 1.5 * std::pow(20.0, rng.uniform()); // 1.5 .. 30
        const double C = capacity(snr);
        // rates near or above capacity keep the fixed point of the
        // all-ones start at an interior high-error maximum, where a finite
        // difference of the sampled potential is meaningful
        const double R = (0.9 + 0.25 * rng.uniform()) * C;
        SEParams p{B, R, snr, 300'000, derive_seed(31, static_cast<std::uint64_t>(k))};
        SEMode mode;
        // with sampled updates the tolerance never fires for B > 2, so the
        // iteration cap is what bounds the run; 300 steps is ample to
        // equilibrate at these rates
        const auto traj = se_run(p, mode, 300, 1e-8);
        const double Efix = traj.E.back()[0];
        if (Efix < 5e-3) {
            note(o, false, "fixed point collapsed at case " + std::to_string(k));
            continue;
        }
        const double h = std::min(5e-3, Efix / 2.0);
        const auto d = potential_diff(Efix, h, B, R, snr, 1'000'000, p.seed + 1);
        // curvature estimate to propagate the fixed-point sampling error
        const auto d2 = potential_diff(std::min(Efix + 3.0 * h, 1.15), h, B, R, snr, 1'000'000,
                                       p.seed + 2);
        const double curv = std::abs(d2.value - d.value) / (3.0 * h);
        const double err_fix = se_step(Efix, p).stderr_E;
        const double tol = 3.0 * (d.std_err + d2.std_err) + 3.0 * curv * err_fix + 1e-4;
        worst = std::max(worst, std::abs(d.value) / tol);
        note(o, std::abs(d.value) <= tol,
             "case " + std::to_string(k) + ": |dPhi/dE|=" + fmt("%.2e", std::abs(d.value)) +
                 " > tol " + fmt("%.2e", tol));
    }
    o.detail = "worst |dPhi/dE|/tol = " + fmt("%.2f", worst) + (o.detail.empty() ? "" : "; ") +
               o.detail;
    return o;
}

// ---- criterion 4: AMP tracks state evolution at B = 64 -------------------

// Mean per-iteration MSE of ten decoding trials on one streamed Gaussian
// operator against the SE trajectory, at a rate on each side of the
// algorithmic threshold (about 1.386 for B = 64, snr = 10).
Outcome crit4_one(double R, double max_rel_tol) {
    Outcome o;
    const int B = 64;
    const std::size_t L = 4096, K = 10, Kp = 16, T = 20;
    const double snr = 10.0;
    const auto params = derive_dimensions(B, L, R, snr);
    const auto alloc = constant_allocation(L);
    StreamedGaussianOperator op(params, 77);
    std::vector<SparseMessage> truths(K);
    std::vector<double> X(params.N * Kp, 0.0), W(params.M * Kp, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        Xoshiro256 mrng(derive_seed(1000, k));
        truths[k] = random_message(params, alloc, mrng);
        for (std::size_t i = 0; i < params.N; ++i) X[i * Kp + k] = truths[k].dense[i];
    }
    op.forward_multi(X.data(), W.data(), Kp);
    std::vector<std::vector<double>> received(K);
    for (std::size_t k = 0; k < K; ++k) {
        Xoshiro256 nrng(derive_seed(2000, k));
        std::vector<double> cw(params.M);
        for (std::size_t mu = 0; mu < params.M; ++mu) cw[mu] = W[mu * Kp + k];
        received[k] = transmit(cw, snr, nrng).received;
    }
    DecodeOptions opts;
    opts.t_max = T;
    opts.eps = 1e-300; // force all iterations
    const auto reps = amp_decode_batch(received, op, params, alloc, opts, &truths);

    SEParams p{B, R, snr, 400'000, 7};
    SEMode mode;
    const auto traj = se_run(p, mode, T, 0.0);

    double worst = 0;
    for (std::size_t t = 0; t < T; ++t) {
        double emp = 0;
        for (const auto& r : reps) emp += r.mse_trace[t];
        emp /= static_cast<double>(K);
        worst = std::max(worst, std::abs(emp - traj.E[t][0]) / traj.E[t][0]);
    }
    o.detail = "R=" + fmt("%.3f", R) + " worst rel dev " + fmt("%.3f", worst);
    note(o, worst <= max_rel_tol, "exceeds " + fmt("%.2f", max_rel_tol));
    return o;
}

Outcome crit4() {
    Outcome below = crit4_one(1.37, 0.10);  // just under the threshold
    Outcome above = crit4_one(1.525, 0.10); // 10% over the threshold
    Outcome o;
    o.ok = below.ok && above.ok;
    o.detail = below.detail + " | " + above.detail;
    return o;
}

// ---- criterion 5: Hadamard decoding at 80% of the threshold --------------

Outcome crit5() {
    Outcome o;
    const int B = 64;
    const std::size_t L = 1024;
    const double snr = 15.0;
    const auto rbp = find_r_bp_se(B, snr, 50'000, 3, 2e-3);
    note(o, rbp.found, "SE threshold not found");
    if (!rbp.found) return o;
    const double R = 0.8 * rbp.R;
    const auto params = derive_dimensions(B, L, R, snr);
    const auto alloc = constant_allocation(L);
    int perfect = 0;
    for (int t = 0; t < 100; ++t) {
        const auto op = build_coupled_hadamard({}, params, derive_seed(9000, t));
        Xoshiro256 rng(derive_seed(9500, t));
        const auto msg = random_message(params, alloc, rng);
        const auto y = apply_forward(*op, msg.dense);
        const auto rx = transmit(y, snr, rng).received;
        const auto rep = amp_decode_simplified(rx, *op, params, alloc);
        if (section_error_rate(msg, rep.estimate) == 0.0) ++perfect;
    }
    o.detail = "R=" + fmt("%.4f", R) + ", " + std::to_string(perfect) + "/100 error-free";
    note(o, perfect >= 95, "need >= 95");
    return o;
}

// ---- criterion 6: spatial coupling decodes past the homogeneous wall -----

Outcome crit6() {
    Outcome o;
    const int B = 512;
    const std::size_t L = 1024;
    const double snr = 15.0;
    const auto rbp = find_r_bp_se(B, snr, 50'000, 3, 2e-3);
    note(o, rbp.found, "SE threshold not found");
    if (!rbp.found) return o;
    const double R = 1.1 * rbp.R;
    const auto params = derive_dimensions(B, L, R, snr);
    const auto alloc = constant_allocation(L);
    const CoupledEnsembleParams ens{16, 17, 2, 0.4, 1.4};

    auto trial_perfect = [&](bool coupled, int t) {
        const auto op = coupled ? build_coupled_hadamard(ens, params, derive_seed(7000, t))
                                : build_coupled_hadamard({}, params, derive_seed(8000, t));
        Xoshiro256 rng(derive_seed(coupled ? 7500 : 8500, t));
        const auto msg = random_message(params, alloc, rng);
        const auto y = apply_forward(*op, msg.dense);
        const auto rx = transmit(y, snr, rng).received;
        DecodeOptions opts;
        opts.t_max = coupled ? 800 : 200; // the wave needs time to sweep the blocks
        const auto rep = amp_decode_simplified(rx, *op, params, alloc, opts);
        return section_error_rate(msg, rep.estimate) == 0.0;
    };

    int coupled_ok = 0, homog_ok = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        if (trial_perfect(true, t)) ++coupled_ok;
        if (trial_perfect(false, t)) ++homog_ok;
    }
    o.detail = "R=" + fmt("%.4f", R) + ", coupled " + std::to_string(coupled_ok) + "/" +
               std::to_string(trials) + ", homogeneous " + std::to_string(homog_ok) + "/" +
               std::to_string(trials);
    note(o, coupled_ok >= (trials * 4) / 5, "coupled success < 80%");
    note(o, homog_ok <= trials / 5, "homogeneous failure < 80%");
    return o;
}

// ---- criterion 7: sequential decodability of the power allocation --------

Outcome crit7() {
    Outcome o;
    for (double snr : {7.0, 15.0, 100.0}) {
        const double C = capacity(snr);
        const auto c = exponential_group_amplitudes(200, snr);
        const auto below = decodability_condition(c, 0.9 * C, snr);
        const auto above = decodability_condition(c, 1.1 * C, snr);
        note(o, std::all_of(below.begin(), below.end(), [](bool b) { return b; }),
             "decodability fails at 0.9C, snr=" + fmt("%.0f", snr));
        note(o, !std::all_of(above.begin(), above.end(), [](bool b) { return b; }),
             "decodability holds at 1.1C, snr=" + fmt("%.0f", snr));
    }
    return o;
}

// ---- criterion 8: cross-validation of equivalent implementations ---------

std::vector<double> densify(const Operator& op) {
    std::vector<double> mat(op.rows() * op.cols());
    std::vector<double> e(op.cols(), 0.0), col(op.rows());
    for (std::size_t j = 0; j < op.cols(); ++j) {
        e[j] = 1.0;
        op.forward(e.data(), col.data());
        e[j] = 0.0;
        for (std::size_t i = 0; i < op.rows(); ++i) mat[i * op.cols() + j] = col[i];
    }
    return mat;
}

double hadamard_vs_dense_dev(const Operator& op, std::uint64_t seed) {
    const auto mat = densify(op);
    const std::size_t M = op.rows(), N = op.cols();
    std::vector<double> x(N), g(M);
    Xoshiro256 rng(seed);
    fill_normal(rng, x.data(), N);
    fill_normal(rng, g.data(), M);
    double dev = 0;
    const auto y = apply_forward(op, x);
    for (std::size_t i = 0; i < M; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < N; ++j) acc += mat[i * N + j] * x[j];
        dev = std::max(dev, std::abs(y[i] - acc));
    }
    const auto at = apply_adjoint(op, g);
    const auto sf = apply_sq_forward(op, x);
    const auto sa = apply_sq_adjoint(op, g);
    for (std::size_t j = 0; j < N; ++j) {
        double acc = 0, sq = 0;
        for (std::size_t i = 0; i < M; ++i) {
            acc += mat[i * N + j] * g[i];
            sq += mat[i * N + j] * mat[i * N + j] * g[i];
        }
        dev = std::max(dev, std::abs(at[j] - acc));
        dev = std::max(dev, std::abs(sa[j] - sq));
    }
    for (std::size_t i = 0; i < M; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < N; ++j) acc += mat[i * N + j] * mat[i * N + j] * x[j];
        dev = std::max(dev, std::abs(sf[i] - acc));
    }
    return dev;
}

struct Instance {
    CodeParams p;
    PowerAllocation alloc;
    SparseMessage msg;
    std::vector<double> received;
};

Instance make_instance(int B, std::size_t L, double R, double snr, std::uint64_t seed,
                       const Operator& op) {
    Instance ins;
    ins.p = derive_dimensions(B, L, R, snr);
    ins.alloc = constant_allocation(L);
    Xoshiro256 rng(seed);
    ins.msg = random_message(ins.p, ins.alloc, rng);
    const auto y = apply_forward(op, ins.msg.dense);
    ins.received = transmit(y, snr, rng).received;
    return ins;
}

Outcome crit8() {
    Outcome o;
    // (a) fast-Hadamard operators against their densified matrices
    {
        const auto ph = derive_dimensions(4, 64, 0.7, 10.0); // N = 256
        const auto oph = build_coupled_hadamard({}, ph, 11);
        const double d1 = hadamard_vs_dense_dev(*oph, 101);
        const auto pc = derive_dimensions(4, 256, 0.7, 10.0); // N = 1024
        const CoupledEnsembleParams ens{4, 5, 2, 0.4, 1.3};
        const auto opc = build_coupled_hadamard(ens, pc, 13);
        const double d2 = hadamard_vs_dense_dev(*opc, 202);
        note(o, std::max(d1, d2) <= 1e-10,
             "(a) hadamard vs dense dev " + fmt("%.1e", std::max(d1, d2)));
    }
    // (b) residual against simplified AMP, per-iteration estimates
    {
        const auto p = derive_dimensions(4, 64, 0.8, 15.0);
        const auto op = build_coupled_hadamard({}, p, 5);
        const Instance ins = make_instance(4, 64, 0.8, 15.0, 10, *op);
        double dmax = 0;
        for (std::size_t T = 1; T <= 20; ++T) {
            DecodeOptions opts;
            opts.t_max = T;
            opts.eps = 1e-300;
            const auto rs = amp_decode_simplified(ins.received, *op, ins.p, ins.alloc, opts);
            const auto rr = amp_decode_residual(ins.received, *op, ins.p, ins.alloc, opts);
            for (std::size_t i = 0; i < rs.a.size(); ++i)
                dmax = std::max(dmax, std::abs(rs.a[i] - rr.a[i]));
        }
        note(o, dmax <= 1e-8, "(b) residual vs simplified dev " + fmt("%.1e", dmax));
    }
    // (c) coupled SE with the trivial profile replays the homogeneous run
    {
        SEParams p{8, 1.2, 15.0, 30'000, 42};
        SEMode homog;
        const auto th = se_run(p, homog, 60, 1e-9);
        SEMode coupled;
        coupled.kind = SEMode::Coupled;
        coupled.profile.Lr = coupled.profile.Lc = 1;
        coupled.profile.J = {1.0};
        coupled.profile.alpha_r = {std::log2(8.0) / (p.R * 8.0)};
        const auto tc = se_run(p, coupled, 60, 1e-9);
        bool same = th.E.size() == tc.E.size();
        for (std::size_t t = 0; same && t < th.E.size(); ++t)
            same = th.E[t][0] == tc.E[t][0] && th.sigma2[t][0] == tc.sigma2[t][0] &&
                   th.ser[t][0] == tc.ser[t][0];
        note(o, same, "(c) trivial coupled SE differs from homogeneous");
    }
    // (d) relaxed BP against AMP on small dense instances
    {
        const auto rbp4 = find_r_bp_se(4, 15.0, 50'000, 3, 2e-3);
        note(o, rbp4.found, "(d) SE threshold not found");
        if (rbp4.found) {
            const double R = 0.5 * rbp4.R;
            const auto p = derive_dimensions(4, 64, R, 15.0);
            std::size_t agree = 0, total = 0;
            for (std::uint64_t s = 0; s < 20; ++s) {
                const auto op = build_dense_gaussian(p, derive_seed(600, s));
                const Instance ins = make_instance(4, 64, R, 15.0, 700 + s, *op);
                const auto bp = relaxed_bp_decode(ins.received, *op, ins.p, ins.alloc);
                const auto amp = amp_decode(ins.received, *op, ins.p, ins.alloc);
                for (std::size_t l = 0; l < p.L; ++l) {
                    ++total;
                    agree += bp.estimate.symbols[l] == amp.estimate.symbols[l];
                }
            }
            note(o, agree * 100 >= total * 95,
                 "(d) section agreement " + std::to_string(agree) + "/" + std::to_string(total));
        }
    }
    return o;
}

// ---- criterion 9: structural invariants ----------------------------------

Outcome crit9() {
    Outcome o;
    // denoiser normalization and variance identity on 10^4 random fields
    {
        Xoshiro256 rng(1);
        const std::vector<int> Bs{2, 3, 4, 8, 16};
        double dev = 0;
        for (int f = 0; f < 10'000; ++f) {
            const int B = Bs[static_cast<std::size_t>(f) % Bs.size()];
            const double c = 0.25 + 3.0 * rng.uniform();
            std::vector<double> s2(B), r(B), a(B), v(B);
            fill_normal(rng, r.data(), B);
            for (int j = 0; j < B; ++j) {
                r[j] *= 2.0;
                s2[j] = 0.05 + 2.0 * rng.uniform();
            }
            denoise_section(B, s2.data(), r.data(), c, a.data(), v.data());
            double sum = 0;
            for (int j = 0; j < B; ++j) {
                sum += a[j];
                dev = std::max(dev, std::abs(v[j] - a[j] * (c - a[j])));
            }
            dev = std::max(dev, std::abs(sum - c));
        }
        note(o, dev <= 1e-11, "denoiser identity dev " + fmt("%.1e", dev));
    }
    // derivative identity sigma_i^2 da_i/dR_i = v_i
    {
        Xoshiro256 rng(2);
        double worst = 0;
        for (int rep = 0; rep < 200; ++rep) {
            const int B = 2 + static_cast<int>(rng() % 7);
            const double c = 0.5 + 2.0 * rng.uniform();
            std::vector<double> s2(B), r(B), a(B), v(B), ap(B), am(B), tmp(B);
            fill_normal(rng, r.data(), B);
            for (int j = 0; j < B; ++j) s2[j] = 0.2 + rng.uniform();
            denoise_section(B, s2.data(), r.data(), c, a.data(), v.data());
            const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(B));
            const double h = 1e-6;
            r[i] += h;
            denoise_section(B, s2.data(), r.data(), c, ap.data(), tmp.data());
            r[i] -= 2 * h;
            denoise_section(B, s2.data(), r.data(), c, am.data(), tmp.data());
            const double deriv = s2[i] * (ap[i] - am[i]) / (2 * h);
            worst = std::max(worst, std::abs(deriv - v[i]) / std::max(1.0, std::abs(v[i])));
        }
        note(o, worst <= 1e-5, "derivative identity dev " + fmt("%.1e", worst));
    }
    // full-sum and overlap forms of the SE update over a 50-point grid
    {
        Xoshiro256 rng(9);
        for (int k = 0; k < 50; ++k) {
            const int Bs[] = {2, 4, 8, 16, 64};
            const int B = Bs[k % 5];
            const double E = 0.02 + 0.96 * rng.uniform();
            const double R = 0.4 + 1.5 * rng.uniform();
            const double snr = 2.0 + 90.0 * rng.uniform();
            SEParams p{B, R, snr, 40'000, derive_seed(77, static_cast<std::uint64_t>(k))};
            const auto u = se_gaussian_update(sigma2_homogeneous(E, p), B, p.mc_samples, p.seed);
            const double tol = B == 2 ? 5e-8 : 3.0 * u.stderr_E + 0.01 * std::abs(u.E) + 1e-9;
            note(o, std::abs(u.E - u.E_overlap) <= tol,
                 "SE forms differ at grid point " + std::to_string(k));
        }
    }
    return o;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    run(1, "B=2 snr=100 thresholds and capacity", 300, only, crit1);
    run(2, "large-B potential identities and threshold", 60, only, crit2);
    run(3, "SE fixed points stationary in the potential", 600, only, crit3);
    run(4, "AMP tracks SE at B=64, dense Gaussian", 900, only, crit4);
    run(5, "Hadamard decoding at 80% of threshold", 600, only, crit5);
    run(6, "spatial coupling beats the homogeneous wall", 1800, only, crit6);
    run(7, "power allocation decodable below capacity", 60, only, crit7);
    run(8, "equivalent implementations cross-validate", 300, only, crit8);
    run(9, "denoiser and SE invariants", 300, only, crit9);

    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all criteria passed\n");
    return failures ? 1 : 0;
}
