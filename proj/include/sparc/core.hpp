#pragma once
// Code parameters, message model, AWGN channel, error metrics and the
// exponential power allocation.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparc/rng.hpp"

namespace sparc {

struct CodeParams {
    int B = 0;            // section size
    std::size_t L = 0;    // number of sections
    double R = 0;         // requested rate, bits per channel use
    double snr = 0;       // signal-to-noise ratio (noise variance is 1/snr)
    std::size_t N = 0;    // L*B components
    std::size_t M = 0;    // codeword length
    double alpha = 0;     // target measurement ratio log2(B)/(R*B)
    double realized_rate = 0; // log2(B)*L/M after rounding M
};

CodeParams derive_dimensions(int B, std::size_t L, double R, double snr);

struct PowerAllocation {
    std::vector<double> c; // one positive amplitude per section, (1/L)*sum c^2 = 1
};

PowerAllocation constant_allocation(std::size_t L);

// c_g = 2^{-C g/G}/Z replicated over L/G contiguous sections, Z chosen so the
// mean square power is exactly one. C is the AWGN capacity at this snr.
PowerAllocation exponential_power_allocation(std::size_t G, std::size_t L, double snr);

// Group amplitudes only (length G, unit mean square).
std::vector<double> exponential_group_amplitudes(std::size_t G, double snr);

// Per-group verdicts of the sequential decodability inequality
//   R ln2 (1/snr + E_{g-1}) / c_g^2 < 1/2,
// where E_{g-1} is the residual power once groups 1..g-1 are decoded.
std::vector<bool> decodability_condition(const std::vector<double>& c_groups,
                                         double R, double snr);

struct SparseMessage {
    std::vector<std::uint32_t> symbols; // position of the non-zero inside each section, 0-based
    std::vector<double> dense;          // length N
};

SparseMessage random_message(const CodeParams& params, const PowerAllocation& alloc,
                             Xoshiro256& rng);

SparseMessage message_from_symbols(const CodeParams& params, const PowerAllocation& alloc,
                                   const std::vector<std::uint32_t>& symbols);

struct ChannelRealization {
    std::vector<double> noise;
    std::vector<double> received;
};

ChannelRealization transmit(const std::vector<double>& codeword, double snr,
                            Xoshiro256& rng);

double section_error_rate(const SparseMessage& x, const SparseMessage& x_hat);

// (1/L) * sum_i (x_i - a_i)^2
double mse_per_section(const std::vector<double>& x, const std::vector<double>& a,
                       std::size_t L);

} // namespace sparc
