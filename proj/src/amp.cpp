#include "sparc/amp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparc {

void denoise_section(int B, const double* sigma2, const double* r_field, double c,
                     double* a, double* v) {
    double emax = -1e300;
    for (int j = 0; j < B; ++j) {
        if (!(sigma2[j] > 0))
            throw std::invalid_argument("denoise_section: sigma2 must be positive");
        const double e = c * (2.0 * r_field[j] - c) / (2.0 * sigma2[j]);
        a[j] = e;
        if (e > emax) emax = e;
    }
    double z = 0.0;
    for (int j = 0; j < B; ++j) {
        a[j] = std::exp(a[j] - emax);
        z += a[j];
    }
    const double scale = c / z;
    for (int j = 0; j < B; ++j) {
        a[j] *= scale;
        v[j] = a[j] * (c - a[j]);
    }
}

SparseMessage hard_decision(const std::vector<double>& a, const CodeParams& params,
                            const PowerAllocation& alloc) {
    if (a.size() != params.N)
        throw std::invalid_argument("hard_decision: length mismatch");
    std::vector<std::uint32_t> symbols(params.L);
    for (std::size_t l = 0; l < params.L; ++l) {
        const double* sec = a.data() + l * params.B;
        std::uint32_t best = 0;
        for (int j = 1; j < params.B; ++j)
            if (sec[j] > sec[best]) best = static_cast<std::uint32_t>(j);
        symbols[l] = best;
    }
    return message_from_symbols(params, alloc, symbols);
}

namespace {

std::vector<double> prior_variance(const CodeParams& params, const PowerAllocation& alloc) {
    std::vector<double> v(params.N);
    const double B = params.B;
    for (std::size_t l = 0; l < params.L; ++l) {
        const double c = alloc.c[l];
        const double val = c * c * (B - 1.0) / (B * B);
        std::fill(v.begin() + l * params.B, v.begin() + (l + 1) * params.B, val);
    }
    return v;
}

void check_inputs(const std::vector<double>& received, const Operator& op,
                  const CodeParams& params, const PowerAllocation& alloc) {
    if (received.size() != params.M || op.rows() != params.M || op.cols() != params.N)
        throw std::invalid_argument("amp: operator/params/received dimension mismatch");
    if (alloc.c.size() != params.L)
        throw std::invalid_argument("amp: allocation length mismatch");
}

void record_iteration(DecodeReport& rep, const std::vector<double>& a, double delta,
                      const CodeParams& params, const PowerAllocation& alloc,
                      const SparseMessage* truth) {
    rep.delta_trace.push_back(delta);
    if (truth != nullptr) {
        rep.mse_trace.push_back(mse_per_section(truth->dense, a, params.L));
        rep.ser_trace.push_back(section_error_rate(*truth, hard_decision(a, params, alloc)));
    }
}

void require_finite(double delta, std::size_t t) {
    if (!std::isfinite(delta))
        throw std::runtime_error("amp: non-finite state at iteration " + std::to_string(t));
}

void finish(DecodeReport& rep, std::vector<double>&& a, std::vector<double>&& v,
            const CodeParams& params, const PowerAllocation& alloc) {
    rep.estimate = hard_decision(a, params, alloc);
    rep.a = std::move(a);
    rep.v = std::move(v);
}

} // namespace

DecodeReport amp_decode(const std::vector<double>& received, const Operator& op,
                        const CodeParams& params, const PowerAllocation& alloc,
                        const DecodeOptions& opts, const SparseMessage* truth) {
    check_inputs(received, op, params, alloc);
    if (opts.eps <= 0) throw std::invalid_argument("amp: eps must be > 0");
    const std::size_t M = params.M, N = params.N;
    const double nvar = 1.0 / params.snr;

    std::vector<double> a(N, 0.0), v = prior_variance(params, alloc);
    std::vector<double> w = received, theta(M), theta_new(M);
    std::vector<double> fa(M), g(M), h(M), sig2(N), corr(N), r_field(N);
    std::vector<double> a_new(N), v_new(N);
    op.sq_forward(v.data(), theta.data());

    DecodeReport rep;
    for (std::size_t t = 0; t < opts.t_max; ++t) {
        op.sq_forward(v.data(), theta_new.data());
        op.forward(a.data(), fa.data());
        for (std::size_t mu = 0; mu < M; ++mu) {
            const double wn = fa[mu]
                - theta_new[mu] * (received[mu] - w[mu]) / (nvar + theta[mu]);
            w[mu] = wn;
            g[mu] = (received[mu] - wn) / (nvar + theta_new[mu]);
            h[mu] = 1.0 / (nvar + theta_new[mu]);
        }
        op.sq_adjoint(h.data(), sig2.data());
        op.adjoint(g.data(), corr.data());
        for (std::size_t i = 0; i < N; ++i) {
            sig2[i] = 1.0 / sig2[i];
            r_field[i] = a[i] + sig2[i] * corr[i];
        }
        for (std::size_t l = 0; l < params.L; ++l)
            denoise_section(params.B, sig2.data() + l * params.B,
                            r_field.data() + l * params.B, alloc.c[l],
                            a_new.data() + l * params.B, v_new.data() + l * params.B);
        double delta = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = a_new[i] - a[i];
            delta += d * d;
        }
        delta /= static_cast<double>(N);
        require_finite(delta, t);
        a.swap(a_new);
        v.swap(v_new);
        theta.swap(theta_new);
        rep.iterations = t + 1;
        record_iteration(rep, a, delta, params, alloc, truth);
        if (delta <= opts.eps) {
            rep.converged = true;
            break;
        }
    }
    finish(rep, std::move(a), std::move(v), params, alloc);
    return rep;
}

DecodeReport amp_decode_simplified(const std::vector<double>& received, const Operator& op,
                                   const CodeParams& params, const PowerAllocation& alloc,
                                   const DecodeOptions& opts, const SparseMessage* truth) {
    check_inputs(received, op, params, alloc);
    if (opts.eps <= 0) throw std::invalid_argument("amp: eps must be > 0");
    const std::size_t M = params.M, N = params.N;
    const double nvar = 1.0 / params.snr;
    const auto& geom = op.geometry();
    const auto& bvar = op.block_variance();
    const std::size_t Lr = geom.Lr, Lc = geom.Lc;
    const std::size_t cpb = geom.cols_per_block;

    std::vector<double> a(N, 0.0), v = prior_variance(params, alloc);
    std::vector<double> w = received, fa(M), g(M), corr(N), r_field(N);
    std::vector<double> a_new(N), v_new(N);
    std::vector<double> theta(Lr), theta_new(Lr), colsum(Lc), sig2c(Lc), sig2(N);

    auto block_theta = [&](const std::vector<double>& vv, std::vector<double>& th) {
        for (std::size_t c = 0; c < Lc; ++c) {
            double acc = 0.0;
            const double* seg = vv.data() + c * cpb;
            for (std::size_t j = 0; j < cpb; ++j) acc += seg[j];
            colsum[c] = acc;
        }
        for (std::size_t r = 0; r < Lr; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < Lc; ++c) acc += bvar[r * Lc + c] * colsum[c];
            th[r] = acc;
        }
    };
    block_theta(v, theta);

    DecodeReport rep;
    for (std::size_t t = 0; t < opts.t_max; ++t) {
        block_theta(v, theta_new);
        op.forward(a.data(), fa.data());
        for (std::size_t r = 0; r < Lr; ++r) {
            const double ratio = theta_new[r] / (nvar + theta[r]);
            const double hn = 1.0 / (nvar + theta_new[r]);
            for (std::size_t mu = geom.row_start[r]; mu < geom.row_start[r + 1]; ++mu) {
                const double wn = fa[mu] - ratio * (received[mu] - w[mu]);
                w[mu] = wn;
                g[mu] = (received[mu] - wn) * hn;
            }
        }
        for (std::size_t c = 0; c < Lc; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < Lr; ++r) {
                const std::size_t m_r = geom.row_start[r + 1] - geom.row_start[r];
                acc += bvar[r * Lc + c] * static_cast<double>(m_r) / (nvar + theta_new[r]);
            }
            sig2c[c] = 1.0 / acc;
            std::fill(sig2.begin() + c * cpb, sig2.begin() + (c + 1) * cpb, sig2c[c]);
        }
        op.adjoint(g.data(), corr.data());
        for (std::size_t i = 0; i < N; ++i)
            r_field[i] = a[i] + sig2[i] * corr[i];
        for (std::size_t l = 0; l < params.L; ++l)
            denoise_section(params.B, sig2.data() + l * params.B,
                            r_field.data() + l * params.B, alloc.c[l],
                            a_new.data() + l * params.B, v_new.data() + l * params.B);
        double delta = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = a_new[i] - a[i];
            delta += d * d;
        }
        delta /= static_cast<double>(N);
        require_finite(delta, t);
        a.swap(a_new);
        v.swap(v_new);
        theta.swap(theta_new);
        rep.iterations = t + 1;
        record_iteration(rep, a, delta, params, alloc, truth);
        if (delta <= opts.eps) {
            rep.converged = true;
            break;
        }
    }
    finish(rep, std::move(a), std::move(v), params, alloc);
    return rep;
}

DecodeReport amp_decode_residual(const std::vector<double>& received, const Operator& op,
                                 const CodeParams& params, const PowerAllocation& alloc,
                                 const DecodeOptions& opts, const SparseMessage* truth) {
    check_inputs(received, op, params, alloc);
    if (opts.eps <= 0) throw std::invalid_argument("amp: eps must be > 0");
    if (op.geometry().Lr != 1 || op.geometry().Lc != 1)
        throw std::invalid_argument("amp_decode_residual: homogeneous operators only");
    const std::size_t M = params.M, N = params.N;
    const double nvar = 1.0 / params.snr;
    const double var = op.block_variance()[0];

    std::vector<double> a(N, 0.0), v = prior_variance(params, alloc);
    std::vector<double> tau(M, 0.0), fa(M, 0.0), g(M), corr(N), r_field(N), sig2(N);
    std::vector<double> a_new(N), v_new(N);
    auto sumv = [&]() {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc;
    };
    double theta = var * sumv();

    DecodeReport rep;
    for (std::size_t t = 0; t < opts.t_max; ++t) {
        const double theta_new = var * sumv();
        if (t > 0) op.forward(a.data(), fa.data());
        const double ratio = theta_new / (nvar + theta);
        for (std::size_t mu = 0; mu < M; ++mu)
            tau[mu] = received[mu] - fa[mu] + tau[mu] * ratio;
        const double s2 = (nvar + theta_new) / (var * static_cast<double>(M));
        const double hn = 1.0 / (nvar + theta_new);
        for (std::size_t mu = 0; mu < M; ++mu) g[mu] = tau[mu] * hn;
        op.adjoint(g.data(), corr.data());
        std::fill(sig2.begin(), sig2.end(), s2);
        for (std::size_t i = 0; i < N; ++i) r_field[i] = a[i] + s2 * corr[i];
        for (std::size_t l = 0; l < params.L; ++l)
            denoise_section(params.B, sig2.data() + l * params.B,
                            r_field.data() + l * params.B, alloc.c[l],
                            a_new.data() + l * params.B, v_new.data() + l * params.B);
        double delta = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = a_new[i] - a[i];
            delta += d * d;
        }
        delta /= static_cast<double>(N);
        require_finite(delta, t);
        a.swap(a_new);
        v.swap(v_new);
        theta = theta_new;
        rep.iterations = t + 1;
        record_iteration(rep, a, delta, params, alloc, truth);
        if (delta <= opts.eps) {
            rep.converged = true;
            break;
        }
    }
    finish(rep, std::move(a), std::move(v), params, alloc);
    return rep;
}

DecodeReport relaxed_bp_decode(const std::vector<double>& received, const Operator& op,
                               const CodeParams& params, const PowerAllocation& alloc,
                               const DecodeOptions& opts, const SparseMessage* truth) {
    check_inputs(received, op, params, alloc);
    if (opts.eps <= 0) throw std::invalid_argument("amp: eps must be > 0");
    const double* F = op.dense_data();
    if (F == nullptr)
        throw std::invalid_argument("relaxed_bp_decode: needs a materialized dense operator");
    if (params.N > 4096)
        throw std::invalid_argument("relaxed_bp_decode: instance too large (N > 4096)");
    const std::size_t M = params.M, N = params.N;
    const int B = params.B;
    const double nvar = 1.0 / params.snr;

    // Edge messages, M x N row-major.
    std::vector<double> ae(M * N, 0.0), ve(M * N);
    {
        const auto pv = prior_variance(params, alloc);
        for (std::size_t mu = 0; mu < M; ++mu)
            std::copy(pv.begin(), pv.end(), ve.begin() + mu * N);
    }
    std::vector<double> Ae(M * N), Be(M * N);
    std::vector<double> w(M), theta(M), colA(N), colB(N);
    std::vector<double> a(N, 0.0), v(N), a_new(N);
    std::vector<double> sig2(N), r_field(N);
    std::vector<double> es(B), ea(B);

    DecodeReport rep;
    for (std::size_t t = 0; t < opts.t_max; ++t) {
        for (std::size_t mu = 0; mu < M; ++mu) {
            const double* Frow = F + mu * N;
            const double* arow = ae.data() + mu * N;
            const double* vrow = ve.data() + mu * N;
            double ws = 0.0, ts = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                ws += Frow[i] * arow[i];
                ts += Frow[i] * Frow[i] * vrow[i];
            }
            w[mu] = ws;
            theta[mu] = ts;
        }
        for (std::size_t mu = 0; mu < M; ++mu) {
            const double* Frow = F + mu * N;
            const double* arow = ae.data() + mu * N;
            const double* vrow = ve.data() + mu * N;
            double* Arow = Ae.data() + mu * N;
            double* Brow = Be.data() + mu * N;
            for (std::size_t l = 0; l < params.L; ++l) {
                const std::size_t base = l * B;
                double secF2v = 0.0, secFa = 0.0;
                for (int j = 0; j < B; ++j) {
                    const double f = Frow[base + j];
                    secF2v += f * f * vrow[base + j];
                    secFa += f * arow[base + j];
                }
                const double denom = nvar + theta[mu] - secF2v;
                const double num = received[mu] - w[mu] + secFa;
                for (int j = 0; j < B; ++j) {
                    const double f = Frow[base + j];
                    Arow[base + j] = f * f / denom;
                    Brow[base + j] = f * num / denom;
                }
            }
        }
        std::fill(colA.begin(), colA.end(), 0.0);
        std::fill(colB.begin(), colB.end(), 0.0);
        for (std::size_t mu = 0; mu < M; ++mu) {
            const double* Arow = Ae.data() + mu * N;
            const double* Brow = Be.data() + mu * N;
            for (std::size_t i = 0; i < N; ++i) {
                colA[i] += Arow[i];
                colB[i] += Brow[i];
            }
        }
        // Cavity fields and new edge messages.
        for (std::size_t mu = 0; mu < M; ++mu) {
            const double* Arow = Ae.data() + mu * N;
            const double* Brow = Be.data() + mu * N;
            double* arow = ae.data() + mu * N;
            double* vrow = ve.data() + mu * N;
            for (std::size_t l = 0; l < params.L; ++l) {
                const std::size_t base = l * B;
                for (int j = 0; j < B; ++j) {
                    const double d = colA[base + j] - Arow[base + j];
                    if (d > 1e-300) {
                        es[j] = 1.0 / d;
                        ea[j] = (colB[base + j] - Brow[base + j]) * es[j];
                    } else {
                        es[j] = 1e300; // lone factor: prior-only message
                        ea[j] = 0.0;
                    }
                }
                denoise_section(B, es.data(), ea.data(), alloc.c[l],
                                arow + base, vrow + base);
            }
        }
        // Marginals.
        for (std::size_t i = 0; i < N; ++i) {
            sig2[i] = 1.0 / colA[i];
            r_field[i] = colB[i] * sig2[i];
        }
        for (std::size_t l = 0; l < params.L; ++l)
            denoise_section(B, sig2.data() + l * B, r_field.data() + l * B, alloc.c[l],
                            a_new.data() + l * B, v.data() + l * B);
        double delta = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = a_new[i] - a[i];
            delta += d * d;
        }
        delta /= static_cast<double>(N);
        require_finite(delta, t);
        a.swap(a_new);
        rep.iterations = t + 1;
        record_iteration(rep, a, delta, params, alloc, truth);
        if (delta <= opts.eps) {
            rep.converged = true;
            break;
        }
    }
    finish(rep, std::move(a), std::move(v), params, alloc);
    return rep;
}

std::vector<DecodeReport> amp_decode_batch(const std::vector<std::vector<double>>& received,
                                           const StreamedGaussianOperator& op,
                                           const CodeParams& params,
                                           const PowerAllocation& alloc,
                                           const DecodeOptions& opts,
                                           const std::vector<SparseMessage>* truths) {
    const std::size_t K = received.size();
    if (K == 0) throw std::invalid_argument("amp_decode_batch: no trials");
    for (const auto& y : received)
        if (y.size() != params.M)
            throw std::invalid_argument("amp_decode_batch: received length mismatch");
    if (truths != nullptr && truths->size() != K)
        throw std::invalid_argument("amp_decode_batch: truths length mismatch");
    if (opts.eps <= 0) throw std::invalid_argument("amp: eps must be > 0");
    const std::size_t Kp = K <= 16 ? 16 : K; // padded width for the simd kernels
    const std::size_t M = params.M, N = params.N;
    const int B = params.B;
    const double nvar = 1.0 / params.snr;
    const double var = op.block_variance()[0];

    std::vector<double> Y(M * Kp, 0.0), A(N * Kp, 0.0), tau(M * Kp, 0.0);
    std::vector<double> FA(M * Kp, 0.0), corr(N * Kp, 0.0);
    for (std::size_t t = 0; t < K; ++t)
        for (std::size_t mu = 0; mu < M; ++mu) Y[mu * Kp + t] = received[t][mu];

    std::vector<double> theta(K), theta_new(K), sumv(K), delta(K), s2(K);
    std::vector<double> mse(K), ser(K);
    {
        const auto pv = prior_variance(params, alloc);
        double acc = 0.0;
        for (double x : pv) acc += x;
        std::fill(sumv.begin(), sumv.end(), acc);
    }
    for (std::size_t t = 0; t < K; ++t) theta[t] = var * sumv[t];

    std::vector<DecodeReport> reps(K);
    std::vector<double> e(B), av(B), vv(B);
    bool any_nonzero_a = false;

    std::vector<double> ratio(K);
    for (std::size_t it = 0; it < opts.t_max; ++it) {
        for (std::size_t t = 0; t < K; ++t) theta_new[t] = var * sumv[t];
        for (std::size_t t = 0; t < K; ++t) {
            ratio[t] = theta_new[t] / (nvar + theta[t]);
            s2[t] = (nvar + theta_new[t]) / (var * static_cast<double>(M));
        }
        auto update_tau_rows = [&](std::size_t mu0, std::size_t nrows) {
            for (std::size_t t = 0; t < K; ++t)
                for (std::size_t mu = mu0; mu < mu0 + nrows; ++mu) {
                    const std::size_t k = mu * Kp + t;
                    tau[k] = Y[k] - FA[k] + tau[k] * ratio[t];
                }
        };
        std::fill(corr.begin(), corr.end(), 0.0);
        if (any_nonzero_a) {
            // single regeneration pass per iteration: each row tile's forward
            // product feeds its residual, which the same tile then projects back
            std::fill(FA.begin(), FA.end(), 0.0);
            op.fused_multi(A.data(), FA.data(), tau.data(), corr.data(), Kp,
                           update_tau_rows);
        } else {
            update_tau_rows(0, M);
            op.adjoint_multi(tau.data(), corr.data(), Kp);
        }

        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(sumv.begin(), sumv.end(), 0.0);
        std::fill(mse.begin(), mse.end(), 0.0);
        std::fill(ser.begin(), ser.end(), 0.0);
        for (std::size_t t = 0; t < K; ++t) {
            const double gain = s2[t] / (nvar + theta_new[t]);
            for (std::size_t l = 0; l < params.L; ++l) {
                const double c = alloc.c[l];
                const std::size_t base = l * B;
                double emax = -1e300;
                for (int j = 0; j < B; ++j) {
                    const std::size_t k = (base + j) * Kp + t;
                    const double r = A[k] + gain * corr[k];
                    const double ex = c * (2.0 * r - c) / (2.0 * s2[t]);
                    e[j] = ex;
                    if (ex > emax) emax = ex;
                }
                double z = 0.0;
                for (int j = 0; j < B; ++j) {
                    e[j] = std::exp(e[j] - emax);
                    z += e[j];
                }
                const double scale = c / z;
                for (int j = 0; j < B; ++j) {
                    const double aj = e[j] * scale;
                    const std::size_t k = (base + j) * Kp + t;
                    const double d = aj - A[k];
                    delta[t] += d * d;
                    sumv[t] += aj * (c - aj);
                    A[k] = aj;
                }
                int best = 0;
                double abest = A[base * Kp + t];
                for (int j = 1; j < B; ++j) {
                    const double aj = A[(base + j) * Kp + t];
                    if (aj > abest) {
                        abest = aj;
                        best = j;
                    }
                }
                if (truths != nullptr) {
                    const auto& x = (*truths)[t];
                    const double cl = alloc.c[l];
                    for (int j = 0; j < B; ++j) {
                        const double xj = (x.symbols[l] == static_cast<std::uint32_t>(j)) ? cl : 0.0;
                        const double d = xj - A[(base + j) * Kp + t];
                        mse[t] += d * d;
                    }
                    if (static_cast<std::uint32_t>(best) != x.symbols[l]) ser[t] += 1.0;
                }
            }
            delta[t] /= static_cast<double>(N);
            require_finite(delta[t], it);
        }
        any_nonzero_a = true;
        bool all_done = true;
        for (std::size_t t = 0; t < K; ++t) {
            auto& rep = reps[t];
            if (!rep.converged) rep.iterations = it + 1;
            rep.delta_trace.push_back(delta[t]);
            if (truths != nullptr) {
                rep.mse_trace.push_back(mse[t] / static_cast<double>(params.L));
                rep.ser_trace.push_back(ser[t] / static_cast<double>(params.L));
            }
            if (delta[t] <= opts.eps) rep.converged = true;
            if (!rep.converged) all_done = false;
            theta[t] = theta_new[t];
        }
        if (all_done) break;
    }

    for (std::size_t t = 0; t < K; ++t) {
        auto& rep = reps[t];
        rep.a.resize(N);
        rep.v.resize(N);
        for (std::size_t l = 0; l < params.L; ++l) {
            const double c = alloc.c[l];
            for (int j = 0; j < B; ++j) {
                const std::size_t i = l * B + j;
                rep.a[i] = A[i * Kp + t];
                rep.v[i] = rep.a[i] * (c - rep.a[i]);
            }
        }
        rep.estimate = hard_decision(rep.a, params, alloc);
    }
    return reps;
}

} // namespace sparc
