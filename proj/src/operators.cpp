#include "sparc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace sparc {

void fht(double* v, std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = v[j];
                const double b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

std::vector<double> fht(std::vector<double> v) {
    fht(v.data(), v.size());
    return v;
}

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void validate_ensemble(const CoupledEnsembleParams& ens) {
    if (ens.Lc == 1 && ens.Lr == 1) return; // degenerate homogeneous case
    if (ens.Lc < 2 || ens.Lr < 2)
        throw std::invalid_argument("ensemble: need Lc,Lr >= 2 (or both 1)");
    if (ens.w < 1 || ens.w >= ens.Lc)
        throw std::invalid_argument("ensemble: need 1 <= w < Lc");
    if (ens.beta_seed < 1.0)
        throw std::invalid_argument("ensemble: beta_seed must be >= 1");
    if (ens.beta_seed >= static_cast<double>(ens.Lc))
        throw std::invalid_argument("ensemble: beta_seed >= Lc leaves alpha_rest <= 0");
    if (ens.sqrtJ < 0)
        throw std::invalid_argument("ensemble: sqrtJ must be >= 0");
}

// Sum of c_l^2 over the sections of each column block.
std::vector<double> block_power(const CodeParams& params, std::size_t Lc,
                                const PowerAllocation* alloc) {
    std::vector<double> p(Lc, 0.0);
    const std::size_t sections_per_block = params.L / Lc;
    if (alloc == nullptr) {
        std::fill(p.begin(), p.end(), static_cast<double>(sections_per_block));
        return p;
    }
    if (alloc->c.size() != params.L)
        throw std::invalid_argument("operator build: allocation length mismatch");
    for (std::size_t l = 0; l < params.L; ++l)
        p[l / sections_per_block] += alloc->c[l] * alloc->c[l];
    return p;
}

// Global scale s making the expected codeword power exactly one:
// entry variance in block (r,c) is s*J_{r,c}/L.
double power_scale(const CodeParams& params, const VarianceProfile& prof,
                   const std::vector<std::size_t>& heights,
                   const std::vector<double>& blk_power) {
    double denom = 0.0;
    for (std::size_t r = 0; r < prof.Lr; ++r) {
        double rowsum = 0.0;
        for (std::size_t c = 0; c < prof.Lc; ++c)
            rowsum += prof.at(r, c) * blk_power[c];
        denom += static_cast<double>(heights[r]) * rowsum;
    }
    if (denom <= 0)
        throw std::invalid_argument("operator build: degenerate variance profile");
    return static_cast<double>(params.M) * static_cast<double>(params.L) / denom;
}

BlockGeometry make_geometry(const CodeParams& params,
                            const std::vector<std::size_t>& heights, std::size_t Lc) {
    BlockGeometry g;
    g.Lr = heights.size();
    g.Lc = Lc;
    g.cols_per_block = params.N / Lc;
    g.row_start.resize(g.Lr + 1);
    g.row_start[0] = 0;
    for (std::size_t r = 0; r < g.Lr; ++r)
        g.row_start[r + 1] = g.row_start[r] + heights[r];
    return g;
}

} // namespace

std::vector<std::size_t> block_row_heights(const CoupledEnsembleParams& ens,
                                           const CodeParams& params) {
    validate_ensemble(ens);
    if (ens.Lc == 1 && ens.Lr == 1) return {params.M};
    const double cols = static_cast<double>(params.N) / static_cast<double>(ens.Lc);
    const double alpha_rest = params.alpha
        * (static_cast<double>(ens.Lc) - ens.beta_seed)
        / static_cast<double>(ens.Lr - 1);
    const auto m_rest = static_cast<std::size_t>(std::floor(alpha_rest * cols));
    if (m_rest < 1)
        throw std::invalid_argument("ensemble: alpha_rest rounds to an empty block row");
    const std::size_t rest_total = m_rest * (ens.Lr - 1);
    if (rest_total >= params.M)
        throw std::invalid_argument("ensemble: no rows left for the seed block");
    std::vector<std::size_t> h(ens.Lr, m_rest);
    h[0] = params.M - rest_total; // seed row takes the rounding remainder
    return h;
}

VarianceProfile make_banded_profile(const CoupledEnsembleParams& ens,
                                    const CodeParams& params) {
    validate_ensemble(ens);
    VarianceProfile prof;
    prof.Lr = ens.Lr;
    prof.Lc = ens.Lc;
    prof.J.assign(ens.Lr * ens.Lc, 0.0);
    if (ens.Lc == 1 && ens.Lr == 1) {
        prof.J[0] = 1.0;
    } else {
        const double J = ens.sqrtJ * ens.sqrtJ;
        for (std::size_t r = 0; r < ens.Lr; ++r) {
            for (std::size_t c = 0; c < ens.Lc; ++c) {
                if (r >= c && r - c <= ens.w)
                    prof.J[r * ens.Lc + c] = 1.0;
                else if (c == r + 1)
                    prof.J[r * ens.Lc + c] = J;
            }
        }
    }
    const auto heights = block_row_heights(ens, params);
    const double cols = static_cast<double>(params.N) / static_cast<double>(ens.Lc);
    prof.alpha_r.resize(ens.Lr);
    for (std::size_t r = 0; r < ens.Lr; ++r)
        prof.alpha_r[r] = static_cast<double>(heights[r]) / cols;
    // Fold in the scale that pins the codeword power to one, so the profile
    // describes the variances of the operator that is actually applied. The
    // degenerate 1x1 profile keeps J = 1 exactly.
    const double s = power_scale(params, prof, heights, block_power(params, ens.Lc, nullptr));
    for (double& j : prof.J) j *= s;
    return prof;
}

std::vector<double> apply_forward(const Operator& op, const std::vector<double>& x) {
    if (x.size() != op.cols()) throw std::invalid_argument("apply_forward: dim mismatch");
    std::vector<double> out(op.rows());
    op.forward(x.data(), out.data());
    return out;
}

std::vector<double> apply_adjoint(const Operator& op, const std::vector<double>& f) {
    if (f.size() != op.rows()) throw std::invalid_argument("apply_adjoint: dim mismatch");
    std::vector<double> out(op.cols());
    op.adjoint(f.data(), out.data());
    return out;
}

std::vector<double> apply_sq_forward(const Operator& op, const std::vector<double>& v) {
    if (v.size() != op.cols()) throw std::invalid_argument("apply_sq_forward: dim mismatch");
    std::vector<double> out(op.rows());
    op.sq_forward(v.data(), out.data());
    return out;
}

std::vector<double> apply_sq_adjoint(const Operator& op, const std::vector<double>& f) {
    if (f.size() != op.rows()) throw std::invalid_argument("apply_sq_adjoint: dim mismatch");
    std::vector<double> out(op.cols());
    op.sq_adjoint(f.data(), out.data());
    return out;
}

// ---------------------------------------------------------------------------
// Dense Gaussian

namespace {

class DenseGaussianOperator final : public Operator {
public:
    DenseGaussianOperator(const CodeParams& params, std::uint64_t seed,
                          const CoupledEnsembleParams& ens,
                          const PowerAllocation* alloc, std::size_t max_entries) {
        if (params.L % ens.Lc != 0)
            throw std::invalid_argument("dense build: Lc must divide L");
        ens_ = ens;
        seed_ = seed;
        rows_ = params.M;
        cols_ = params.N;
        if (rows_ * cols_ > max_entries)
            throw std::invalid_argument(
                "dense build: " + std::to_string(rows_ * cols_)
                + " entries exceed the memory budget of " + std::to_string(max_entries)
                + " (raise the budget to override)");
        const auto heights = block_row_heights(ens, params);
        const auto prof = make_banded_profile(ens, params);
        const auto blk_power = block_power(params, ens.Lc, alloc);
        const double s = power_scale(params, prof, heights, blk_power);
        geom_ = make_geometry(params, heights, ens.Lc);
        block_var_.resize(prof.J.size());
        for (std::size_t k = 0; k < prof.J.size(); ++k)
            block_var_[k] = s * prof.J[k] / static_cast<double>(params.L);

        std::vector<double> sigma_row(geom_.Lc);
        F_.resize(rows_ * cols_);
        Xoshiro256 gen(derive_seed(seed, 0xDE5Eull));
        for (std::size_t r = 0; r < geom_.Lr; ++r) {
            for (std::size_t c = 0; c < geom_.Lc; ++c)
                sigma_row[c] = std::sqrt(block_var_[r * geom_.Lc + c]);
            for (std::size_t mu = geom_.row_start[r]; mu < geom_.row_start[r + 1]; ++mu) {
                double* row = F_.data() + mu * cols_;
                fill_normal(gen, row, cols_);
                for (std::size_t c = 0; c < geom_.Lc; ++c) {
                    const double sg = sigma_row[c];
                    double* seg = row + c * geom_.cols_per_block;
                    for (std::size_t j = 0; j < geom_.cols_per_block; ++j) seg[j] *= sg;
                }
            }
        }
    }

    void forward(const double* x, double* out) const override {
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            const double* row = F_.data() + mu * cols_;
            double acc = 0.0;
            for (std::size_t i = 0; i < cols_; ++i) acc += row[i] * x[i];
            out[mu] = acc;
        }
    }

    void adjoint(const double* f, double* out) const override {
        std::fill(out, out + cols_, 0.0);
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            const double* row = F_.data() + mu * cols_;
            const double fmu = f[mu];
            for (std::size_t i = 0; i < cols_; ++i) out[i] += row[i] * fmu;
        }
    }

    void sq_forward(const double* v, double* out) const override {
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            const double* row = F_.data() + mu * cols_;
            double acc = 0.0;
            for (std::size_t i = 0; i < cols_; ++i) acc += row[i] * row[i] * v[i];
            out[mu] = acc;
        }
    }

    void sq_adjoint(const double* f, double* out) const override {
        std::fill(out, out + cols_, 0.0);
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            const double* row = F_.data() + mu * cols_;
            const double fmu = f[mu];
            for (std::size_t i = 0; i < cols_; ++i) out[i] += row[i] * row[i] * fmu;
        }
    }

    const char* kind() const override { return "dense-gaussian"; }
    const double* dense_data() const override { return F_.data(); }

private:
    std::vector<double> F_;
};

} // namespace

std::unique_ptr<Operator> build_dense_gaussian(const CodeParams& params, std::uint64_t seed,
                                               const CoupledEnsembleParams& ens,
                                               const PowerAllocation* alloc,
                                               std::size_t max_entries) {
    return std::make_unique<DenseGaussianOperator>(params, seed, ens, alloc, max_entries);
}

// ---------------------------------------------------------------------------
// Coupled Hadamard

namespace {

class CoupledHadamardOperator final : public Operator {
public:
    CoupledHadamardOperator(const CoupledEnsembleParams& ens, const CodeParams& params,
                            std::uint64_t seed, const PowerAllocation* alloc) {
        if (params.L % ens.Lc != 0)
            throw std::invalid_argument("hadamard build: Lc must divide L");
        ens_ = ens;
        seed_ = seed;
        rows_ = params.M;
        cols_ = params.N;
        const auto heights = block_row_heights(ens, params);
        const auto prof = make_banded_profile(ens, params);
        const auto blk_power = block_power(params, ens.Lc, alloc);
        const double s = power_scale(params, prof, heights, blk_power);
        geom_ = make_geometry(params, heights, ens.Lc);
        P_ = next_pow2(geom_.cols_per_block);
        block_var_.resize(prof.J.size());
        for (std::size_t k = 0; k < prof.J.size(); ++k)
            block_var_[k] = s * prof.J[k] / static_cast<double>(params.L);

        omega_.resize(geom_.Lr * geom_.Lc);
        omega_seed_.assign(geom_.Lr * geom_.Lc, 0);
        std::vector<std::uint32_t> pool(P_);
        for (std::size_t r = 0; r < geom_.Lr; ++r) {
            const std::size_t m_r = heights[r];
            if (m_r > P_)
                throw std::invalid_argument(
                    "hadamard build: block row taller than the Hadamard size, "
                    "mode selection cannot be injective");
            for (std::size_t c = 0; c < geom_.Lc; ++c) {
                if (block_var_[r * geom_.Lc + c] == 0.0) continue;
                const std::uint64_t os = derive_seed(seed, r * geom_.Lc + c + 1);
                omega_seed_[r * geom_.Lc + c] = os;
                Xoshiro256 gen(os);
                for (std::size_t i = 0; i < P_; ++i)
                    pool[i] = static_cast<std::uint32_t>(i);
                auto& sel = omega_[r * geom_.Lc + c];
                sel.resize(m_r);
                for (std::size_t k = 0; k < m_r; ++k) {
                    const std::size_t j = k + static_cast<std::size_t>(gen() % (P_ - k));
                    std::swap(pool[k], pool[j]);
                    sel[k] = pool[k];
                }
            }
        }
    }

    void forward(const double* x, double* out) const override {
        std::fill(out, out + rows_, 0.0);
        std::vector<double> buf(P_);
        for (std::size_t c = 0; c < geom_.Lc; ++c) {
            std::memcpy(buf.data(), x + c * geom_.cols_per_block,
                        geom_.cols_per_block * sizeof(double));
            std::fill(buf.begin() + geom_.cols_per_block, buf.end(), 0.0);
            fht(buf.data(), P_);
            for (std::size_t r = 0; r < geom_.Lr; ++r) {
                const double var = block_var_[r * geom_.Lc + c];
                if (var == 0.0) continue;
                const double sg = std::sqrt(var);
                const auto& sel = omega_[r * geom_.Lc + c];
                double* o = out + geom_.row_start[r];
                for (std::size_t k = 0; k < sel.size(); ++k) o[k] += sg * buf[sel[k]];
            }
        }
    }

    void adjoint(const double* f, double* out) const override {
        std::vector<double> buf(P_);
        for (std::size_t c = 0; c < geom_.Lc; ++c) {
            std::fill(buf.begin(), buf.end(), 0.0);
            for (std::size_t r = 0; r < geom_.Lr; ++r) {
                const double var = block_var_[r * geom_.Lc + c];
                if (var == 0.0) continue;
                const double sg = std::sqrt(var);
                const auto& sel = omega_[r * geom_.Lc + c];
                const double* fr = f + geom_.row_start[r];
                for (std::size_t k = 0; k < sel.size(); ++k) buf[sel[k]] += sg * fr[k];
            }
            fht(buf.data(), P_);
            std::memcpy(out + c * geom_.cols_per_block, buf.data(),
                        geom_.cols_per_block * sizeof(double));
        }
    }

    // Squared entries are the block variance constant, so both squared
    // applications collapse to block sums.
    void sq_forward(const double* v, double* out) const override {
        std::vector<double> colsum(geom_.Lc, 0.0);
        for (std::size_t c = 0; c < geom_.Lc; ++c) {
            const double* seg = v + c * geom_.cols_per_block;
            double acc = 0.0;
            for (std::size_t j = 0; j < geom_.cols_per_block; ++j) acc += seg[j];
            colsum[c] = acc;
        }
        for (std::size_t r = 0; r < geom_.Lr; ++r) {
            double val = 0.0;
            for (std::size_t c = 0; c < geom_.Lc; ++c)
                val += block_var_[r * geom_.Lc + c] * colsum[c];
            std::fill(out + geom_.row_start[r], out + geom_.row_start[r + 1], val);
        }
    }

    void sq_adjoint(const double* f, double* out) const override {
        std::vector<double> rowsum(geom_.Lr, 0.0);
        for (std::size_t r = 0; r < geom_.Lr; ++r) {
            double acc = 0.0;
            for (std::size_t mu = geom_.row_start[r]; mu < geom_.row_start[r + 1]; ++mu)
                acc += f[mu];
            rowsum[r] = acc;
        }
        for (std::size_t c = 0; c < geom_.Lc; ++c) {
            double val = 0.0;
            for (std::size_t r = 0; r < geom_.Lr; ++r)
                val += block_var_[r * geom_.Lc + c] * rowsum[r];
            std::fill(out + c * geom_.cols_per_block, out + (c + 1) * geom_.cols_per_block,
                      val);
        }
    }

    const char* kind() const override { return "coupled-hadamard"; }

    std::vector<std::uint64_t> omega_seeds() const override {
        std::vector<std::uint64_t> s;
        for (auto v : omega_seed_)
            if (v != 0) s.push_back(v);
        return s;
    }

private:
    std::size_t P_ = 0;
    std::vector<std::vector<std::uint32_t>> omega_;
    std::vector<std::uint64_t> omega_seed_;
};

} // namespace

std::unique_ptr<Operator> build_coupled_hadamard(const CoupledEnsembleParams& ens,
                                                 const CodeParams& params,
                                                 std::uint64_t seed,
                                                 const PowerAllocation* alloc) {
    return std::make_unique<CoupledHadamardOperator>(ens, params, seed, alloc);
}

// ---------------------------------------------------------------------------
// Streamed Gaussian (homogeneous, rows regenerated on the fly)

namespace {
constexpr std::size_t kRowChunk = 4096;

template <std::size_t K>
void fwd_kernel(const float* row, std::size_t len, const double* Xb, double* y) {
    double acc[K];
    for (std::size_t t = 0; t < K; ++t) acc[t] = y[t];
    for (std::size_t j = 0; j < len; ++j) {
        const double fj = row[j];
        const double* xb = Xb + j * K;
        for (std::size_t t = 0; t < K; ++t) acc[t] += fj * xb[t];
    }
    for (std::size_t t = 0; t < K; ++t) y[t] = acc[t];
}

template <std::size_t K>
void adj_kernel(const float* row, std::size_t len, const double* g, double* Ob) {
    double gv[K];
    for (std::size_t t = 0; t < K; ++t) gv[t] = g[t];
    for (std::size_t j = 0; j < len; ++j) {
        const double fj = row[j];
        double* ob = Ob + j * K;
        for (std::size_t t = 0; t < K; ++t) ob[t] += fj * gv[t];
    }
}

// Tile kernels: R rows at a time with per-row accumulators in the same order
// as running the single-row kernels on rows 0..R-1, so the floating-point
// result is identical while the per-column memory traffic is amortized.
constexpr std::size_t kFusedTile = 8;

template <std::size_t K, std::size_t R>
void fwd_tile(const float* rows, std::size_t stride, std::size_t len, const double* Xb,
              double* Y, std::size_t ystride) {
    double acc[R][K];
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t t = 0; t < K; ++t) acc[r][t] = Y[r * ystride + t];
    for (std::size_t j = 0; j < len; ++j) {
        const double* xb = Xb + j * K;
        for (std::size_t r = 0; r < R; ++r) {
            const double fj = rows[r * stride + j];
            for (std::size_t t = 0; t < K; ++t) acc[r][t] += fj * xb[t];
        }
    }
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t t = 0; t < K; ++t) Y[r * ystride + t] = acc[r][t];
}

template <std::size_t K, std::size_t R>
void adj_tile(const float* rows, std::size_t stride, std::size_t len, const double* G,
              std::size_t gstride, double* Ob) {
    double gv[R][K];
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t t = 0; t < K; ++t) gv[r][t] = G[r * gstride + t];
    for (std::size_t j = 0; j < len; ++j) {
        double* ob = Ob + j * K;
        double accv[K];
        for (std::size_t t = 0; t < K; ++t) accv[t] = ob[t];
        for (std::size_t r = 0; r < R; ++r) {
            const double fj = rows[r * stride + j];
            for (std::size_t t = 0; t < K; ++t) accv[t] += fj * gv[r][t];
        }
        for (std::size_t t = 0; t < K; ++t) ob[t] = accv[t];
    }
}

} // namespace

StreamedGaussianOperator::StreamedGaussianOperator(const CodeParams& params,
                                                   std::uint64_t seed) {
    ens_ = CoupledEnsembleParams{};
    seed_ = seed;
    rows_ = params.M;
    cols_ = params.N;
    geom_ = make_geometry(params, {params.M}, 1);
    sigma_ = std::sqrt(1.0 / static_cast<double>(params.L));
    block_var_ = {sigma_ * sigma_};
}

// Chunk (mu, c) has its own derived stream so applications can iterate in
// chunk-major order without replaying earlier chunks.
void StreamedGaussianOperator::fill_row(std::size_t mu, float* row) const {
    for (std::size_t base = 0, c = 0; base < cols_; base += kRowChunk, ++c) {
        const std::size_t len = std::min(kRowChunk, cols_ - base);
        Xoshiro256 gen(derive_seed(seed_, mu, c));
        fill_normal_f(gen, row + base, len);
    }
}

void StreamedGaussianOperator::forward(const double* x, double* out) const {
    std::fill(out, out + rows_, 0.0);
    forward_multi(x, out, 1);
}

void StreamedGaussianOperator::adjoint(const double* f, double* out) const {
    std::fill(out, out + cols_, 0.0);
    adjoint_multi(f, out, 1);
}

void StreamedGaussianOperator::forward_multi(const double* X, double* Y,
                                             std::size_t K) const {
    std::vector<float> buf(kRowChunk);
    const double sg = sigma_;
    for (std::size_t base = 0, c = 0; base < cols_; base += kRowChunk, ++c) {
        const std::size_t len = std::min(kRowChunk, cols_ - base);
        const double* Xb = X + base * K;
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            Xoshiro256 gen(derive_seed(seed_, mu, c));
            fill_normal_f(gen, buf.data(), len);
            if (K == 16) fwd_kernel<16>(buf.data(), len, Xb, Y + mu * 16);
            else if (K == 1) fwd_kernel<1>(buf.data(), len, Xb, Y + mu);
            else {
                double* y = Y + mu * K;
                for (std::size_t j = 0; j < len; ++j)
                    for (std::size_t t = 0; t < K; ++t)
                        y[t] += static_cast<double>(buf[j]) * Xb[j * K + t];
            }
        }
    }
    for (std::size_t k = 0; k < rows_ * K; ++k) Y[k] *= sg;
}

void StreamedGaussianOperator::adjoint_multi(const double* G, double* out,
                                             std::size_t K) const {
    std::vector<float> buf(kRowChunk);
    for (std::size_t base = 0, c = 0; base < cols_; base += kRowChunk, ++c) {
        const std::size_t len = std::min(kRowChunk, cols_ - base);
        double* Ob = out + base * K;
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            Xoshiro256 gen(derive_seed(seed_, mu, c));
            fill_normal_f(gen, buf.data(), len);
            if (K == 16) adj_kernel<16>(buf.data(), len, G + mu * 16, Ob);
            else if (K == 1) adj_kernel<1>(buf.data(), len, G + mu, Ob);
            else {
                const double* g = G + mu * K;
                for (std::size_t j = 0; j < len; ++j)
                    for (std::size_t t = 0; t < K; ++t)
                        Ob[j * K + t] += static_cast<double>(buf[j]) * g[t];
            }
        }
    }
    for (std::size_t k = 0; k < cols_ * K; ++k) out[k] *= sigma_;
}

void StreamedGaussianOperator::fused_multi(
    const double* X, double* Y, const double* G, double* out, std::size_t K,
    const std::function<void(std::size_t, std::size_t)>& between) const {
    const std::size_t M = rows_, N = cols_;
    std::vector<float> tile(kFusedTile * N);
    for (std::size_t mu0 = 0; mu0 < M; mu0 += kFusedTile) {
        const std::size_t nr = std::min(kFusedTile, M - mu0);
        for (std::size_t r = 0; r < nr; ++r) fill_row(mu0 + r, tile.data() + r * N);
        if (X != nullptr) {
            for (std::size_t base = 0; base < N; base += kRowChunk) {
                const std::size_t len = std::min(kRowChunk, N - base);
                if (K == 16 && nr == kFusedTile)
                    // pairs of rows: wider accumulator blocks spill registers
                    for (std::size_t r = 0; r < kFusedTile; r += 2)
                        fwd_tile<16, 2>(tile.data() + r * N + base, N, len, X + base * 16,
                                        Y + (mu0 + r) * 16, 16);
                else
                    for (std::size_t r = 0; r < nr; ++r) {
                        if (K == 16)
                            fwd_kernel<16>(tile.data() + r * N + base, len, X + base * 16,
                                           Y + (mu0 + r) * 16);
                        else
                            for (std::size_t j = 0; j < len; ++j)
                                for (std::size_t t = 0; t < K; ++t)
                                    Y[(mu0 + r) * K + t] +=
                                        static_cast<double>(tile[r * N + base + j]) *
                                        X[(base + j) * K + t];
                    }
            }
            for (std::size_t k = mu0 * K; k < (mu0 + nr) * K; ++k) Y[k] *= sigma_;
        }
        between(mu0, nr);
        for (std::size_t base = 0; base < N; base += kRowChunk) {
            const std::size_t len = std::min(kRowChunk, N - base);
            if (K == 16 && nr == kFusedTile)
                adj_tile<16, kFusedTile>(tile.data() + base, N, len, G + mu0 * 16, 16,
                                         out + base * 16);
            else
                for (std::size_t r = 0; r < nr; ++r) {
                    if (K == 16)
                        adj_kernel<16>(tile.data() + r * N + base, len, G + (mu0 + r) * 16,
                                       out + base * 16);
                    else
                        for (std::size_t j = 0; j < len; ++j)
                            for (std::size_t t = 0; t < K; ++t)
                                out[(base + j) * K + t] +=
                                    static_cast<double>(tile[r * N + base + j]) *
                                    G[(mu0 + r) * K + t];
                }
        }
    }
    for (std::size_t k = 0; k < N * K; ++k) out[k] *= sigma_;
}

void StreamedGaussianOperator::sq_forward(const double* v, double* out) const {
    std::fill(out, out + rows_, 0.0);
    std::vector<float> buf(kRowChunk);
    for (std::size_t base = 0, c = 0; base < cols_; base += kRowChunk, ++c) {
        const std::size_t len = std::min(kRowChunk, cols_ - base);
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            Xoshiro256 gen(derive_seed(seed_, mu, c));
            fill_normal_f(gen, buf.data(), len);
            double acc = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                const double fj = buf[j];
                acc += fj * fj * v[base + j];
            }
            out[mu] += acc;
        }
    }
    const double v2 = sigma_ * sigma_;
    for (std::size_t mu = 0; mu < rows_; ++mu) out[mu] *= v2;
}

void StreamedGaussianOperator::sq_adjoint(const double* f, double* out) const {
    std::fill(out, out + cols_, 0.0);
    std::vector<float> buf(kRowChunk);
    for (std::size_t base = 0, c = 0; base < cols_; base += kRowChunk, ++c) {
        const std::size_t len = std::min(kRowChunk, cols_ - base);
        for (std::size_t mu = 0; mu < rows_; ++mu) {
            Xoshiro256 gen(derive_seed(seed_, mu, c));
            fill_normal_f(gen, buf.data(), len);
            const double fmu = f[mu];
            for (std::size_t j = 0; j < len; ++j) {
                const double fj = buf[j];
                out[base + j] += fj * fj * fmu;
            }
        }
    }
    const double v2 = sigma_ * sigma_;
    for (std::size_t i = 0; i < cols_; ++i) out[i] *= v2;
}

} // namespace sparc
