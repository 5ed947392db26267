#pragma once
// Coding operators: dense i.i.d. Gaussian matrices and spatially coupled
// fast-Hadamard block operators. Both expose the four applications the
// decoder needs: forward, adjoint, and the squared-entry versions of each.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "sparc/core.hpp"

namespace sparc {

// In-place unnormalized Walsh-Hadamard transform; n must be a power of two.
// Applying it twice multiplies the input by n.
void fht(double* v, std::size_t n);
std::vector<double> fht(std::vector<double> v);

struct CoupledEnsembleParams {
    std::size_t Lc = 1;     // column blocks
    std::size_t Lr = 1;     // row blocks
    std::size_t w = 1;      // coupling window (lower-diagonal blocks with variance 1)
    double sqrtJ = 1.0;     // scale of the single upper-diagonal block
    double beta_seed = 1.0; // seed over-measurement factor
};

struct VarianceProfile {
    std::size_t Lr = 1, Lc = 1;
    std::vector<double> J;       // Lr x Lc row-major variance multipliers
    std::vector<double> alpha_r; // per block-row measurement rate (rows / block columns)

    double at(std::size_t r, std::size_t c) const { return J[r * Lc + c]; }
};

// Row-block heights: every non-seed row gets floor(alpha_rest*N/Lc) rows and
// the seed row absorbs the rounding remainder so the total stays M.
std::vector<std::size_t> block_row_heights(const CoupledEnsembleParams& ens,
                                           const CodeParams& params);

// Band profile of the coupled ensemble: 1 on the diagonal and the w blocks
// below it, J = sqrtJ^2 on the single block above, 0 elsewhere; alpha_r from
// the integer block heights.
VarianceProfile make_banded_profile(const CoupledEnsembleParams& ens,
                                    const CodeParams& params);

struct BlockGeometry {
    std::size_t Lr = 1, Lc = 1;
    std::vector<std::size_t> row_start; // Lr+1 prefix over rows
    std::size_t cols_per_block = 0;     // N / Lc message columns per column block
};

class Operator {
public:
    virtual ~Operator() = default;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    virtual void forward(const double* x, double* out) const = 0;
    virtual void adjoint(const double* f, double* out) const = 0;
    virtual void sq_forward(const double* v, double* out) const = 0;
    virtual void sq_adjoint(const double* f, double* out) const = 0;

    const BlockGeometry& geometry() const { return geom_; }
    // Entry variance per block, Lr x Lc row-major.
    const std::vector<double>& block_variance() const { return block_var_; }

    virtual const char* kind() const = 0;
    std::uint64_t seed() const { return seed_; }
    const CoupledEnsembleParams& ensemble() const { return ens_; }
    // Mode-selection seeds per non-zero block (coupled Hadamard only).
    virtual std::vector<std::uint64_t> omega_seeds() const { return {}; }
    // Row-major dense matrix if materialized, else nullptr.
    virtual const double* dense_data() const { return nullptr; }

protected:
    std::size_t rows_ = 0, cols_ = 0;
    BlockGeometry geom_;
    std::vector<double> block_var_;
    CoupledEnsembleParams ens_;
    std::uint64_t seed_ = 0;
};

std::vector<double> apply_forward(const Operator& op, const std::vector<double>& x);
std::vector<double> apply_adjoint(const Operator& op, const std::vector<double>& f);
std::vector<double> apply_sq_forward(const Operator& op, const std::vector<double>& v);
std::vector<double> apply_sq_adjoint(const Operator& op, const std::vector<double>& f);

constexpr std::size_t kDenseEntryBudget = 200'000'000;

// Materialized Gaussian matrix; block (r,c) entries are N(0, s*J_{r,c}/L)
// with s fixed so the expected codeword power is one for the given
// allocation (constant if omitted).
std::unique_ptr<Operator> build_dense_gaussian(
    const CodeParams& params, std::uint64_t seed,
    const CoupledEnsembleParams& ens = {},
    const PowerAllocation* alloc = nullptr,
    std::size_t max_entries = kDenseEntryBudget);

// Fast-Hadamard block operator: each non-zero block applies H of size
// next-pow2(N/Lc) and keeps the rows picked by an injective random mode
// selection Omega^{r,c}.
std::unique_ptr<Operator> build_coupled_hadamard(
    const CoupledEnsembleParams& ens, const CodeParams& params, std::uint64_t seed,
    const PowerAllocation* alloc = nullptr);

// Homogeneous Gaussian operator that regenerates its rows from per-row seeds
// instead of storing them; same distribution as the dense builder at 1x1
// blocks but with float entries. Supports batched application to K vectors
// so one regeneration sweep serves many decoding trials.
class StreamedGaussianOperator final : public Operator {
public:
    StreamedGaussianOperator(const CodeParams& params, std::uint64_t seed);

    void forward(const double* x, double* out) const override;
    void adjoint(const double* f, double* out) const override;
    void sq_forward(const double* v, double* out) const override;
    void sq_adjoint(const double* f, double* out) const override;
    const char* kind() const override { return "streamed-gaussian"; }

    // X is N x K row-major, Y is M x K row-major.
    void forward_multi(const double* X, double* Y, std::size_t K) const;
    // G is M x K row-major, out is N x K row-major (accumulated from zero).
    void adjoint_multi(const double* G, double* out, std::size_t K) const;

    // Forward and adjoint of one decoder iteration in a single row
    // regeneration pass. Rows are produced in tiles; after a tile's forward
    // products land in Y, `between(mu0, nrows)` lets the caller turn them
    // into the adjoint input rows of G before the tile is consumed again.
    // Y and out must be zeroed by the caller; results are bit-identical to
    // forward_multi followed by adjoint_multi.
    void fused_multi(const double* X, double* Y, const double* G, double* out,
                     std::size_t K,
                     const std::function<void(std::size_t, std::size_t)>& between) const;

private:
    void fill_row(std::size_t mu, float* row) const;
    double sigma_ = 0; // per-entry standard deviation sqrt(1/L)
};

} // namespace sparc
