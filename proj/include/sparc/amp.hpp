#pragma once
// AMP decoding: sectionwise Bayesian denoisers, the general operator-form
// decoder, the simplified block-variance form, the residual rewrite for
// homogeneous matrices, a relaxed-BP reference for small dense instances,
// and a batched streamed-operator decoder for large Gaussian experiments.

#include <cstddef>
#include <vector>

#include "sparc/core.hpp"
#include "sparc/operators.hpp"

namespace sparc {

struct DecodeOptions {
    std::size_t t_max = 500;
    double eps = 1e-8;
};

struct DecodeReport {
    SparseMessage estimate;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> a; // final posterior means
    std::vector<double> v; // final posterior variances
    std::vector<double> delta_trace;
    // Filled only when the true message is supplied.
    std::vector<double> mse_trace;
    std::vector<double> ser_trace;
};

// Posterior mean/variance of one section under the positional prior with
// amplitude c, given per-component fields (sigma2, r_field). Writes B values
// into a and v; sum(a) = c and v = a(c-a) by construction.
void denoise_section(int B, const double* sigma2, const double* r_field, double c,
                     double* a, double* v);

// Per-section argmax with ties broken toward the lowest index.
SparseMessage hard_decision(const std::vector<double>& a, const CodeParams& params,
                            const PowerAllocation& alloc);

DecodeReport amp_decode(const std::vector<double>& received, const Operator& op,
                        const CodeParams& params, const PowerAllocation& alloc,
                        const DecodeOptions& opts = {},
                        const SparseMessage* truth = nullptr);

DecodeReport amp_decode_simplified(const std::vector<double>& received, const Operator& op,
                                   const CodeParams& params, const PowerAllocation& alloc,
                                   const DecodeOptions& opts = {},
                                   const SparseMessage* truth = nullptr);

// Homogeneous operators only; identical trajectory to the simplified form,
// tracked through the residual tau = y - w instead of w.
DecodeReport amp_decode_residual(const std::vector<double>& received, const Operator& op,
                                 const CodeParams& params, const PowerAllocation& alloc,
                                 const DecodeOptions& opts = {},
                                 const SparseMessage* truth = nullptr);

// Edge-message reference algorithm; requires a materialized dense operator
// and N <= 4096.
DecodeReport relaxed_bp_decode(const std::vector<double>& received, const Operator& op,
                               const CodeParams& params, const PowerAllocation& alloc,
                               const DecodeOptions& opts = {},
                               const SparseMessage* truth = nullptr);

// Residual-form AMP for K received words sharing one streamed Gaussian
// operator; one regeneration sweep per application serves all K trials.
std::vector<DecodeReport> amp_decode_batch(
    const std::vector<std::vector<double>>& received,
    const StreamedGaussianOperator& op, const CodeParams& params,
    const PowerAllocation& alloc, const DecodeOptions& opts = {},
    const std::vector<SparseMessage>* truths = nullptr);

} // namespace sparc
