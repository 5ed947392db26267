#include "sparc/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sparc {

CodeParams derive_dimensions(int B, std::size_t L, double R, double snr) {
    if (B < 2) throw std::invalid_argument("derive_dimensions: B must be >= 2");
    if (L < 1) throw std::invalid_argument("derive_dimensions: L must be >= 1");
    if (R <= 0) throw std::invalid_argument("derive_dimensions: R must be > 0");
    if (snr <= 0) throw std::invalid_argument("derive_dimensions: snr must be > 0");

    CodeParams p;
    p.B = B;
    p.L = L;
    p.R = R;
    p.snr = snr;
    p.N = L * static_cast<std::size_t>(B);
    p.alpha = std::log2(static_cast<double>(B)) / (R * B);
    p.M = static_cast<std::size_t>(std::llround(p.alpha * static_cast<double>(p.N)));
    if (p.M < 1)
        throw std::invalid_argument("derive_dimensions: rate too high, M rounds to zero");
    p.realized_rate = std::log2(static_cast<double>(B)) * static_cast<double>(L)
                      / static_cast<double>(p.M);
    return p;
}

PowerAllocation constant_allocation(std::size_t L) {
    return PowerAllocation{std::vector<double>(L, 1.0)};
}

std::vector<double> exponential_group_amplitudes(std::size_t G, double snr) {
    if (G < 1) throw std::invalid_argument("exponential allocation: G must be >= 1");
    if (snr <= 0) throw std::invalid_argument("exponential allocation: snr must be > 0");
    const double C = 0.5 * std::log2(1.0 + snr);
    const double q = std::pow(2.0, -2.0 * C / static_cast<double>(G));
    // Z^2 = 2^{-2C/G} (1 - 2^{-2C}) / (G (1 - 2^{-2C/G}))
    const double Z2 = q * (1.0 - std::pow(2.0, -2.0 * C)) / (static_cast<double>(G) * (1.0 - q));
    const double Z = std::sqrt(Z2);
    std::vector<double> c(G);
    for (std::size_t g = 0; g < G; ++g)
        c[g] = std::pow(2.0, -C * static_cast<double>(g + 1) / static_cast<double>(G)) / Z;
    return c;
}

PowerAllocation exponential_power_allocation(std::size_t G, std::size_t L, double snr) {
    if (G == 0 || L % G != 0)
        throw std::invalid_argument("exponential allocation: G must divide L");
    const std::vector<double> cg = exponential_group_amplitudes(G, snr);
    PowerAllocation a;
    a.c.resize(L);
    const std::size_t per = L / G;
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t k = 0; k < per; ++k)
            a.c[g * per + k] = cg[g];
    return a;
}

std::vector<bool> decodability_condition(const std::vector<double>& c_groups,
                                         double R, double snr) {
    if (c_groups.empty())
        throw std::invalid_argument("decodability_condition: empty allocation");
    const std::size_t G = c_groups.size();
    std::vector<bool> ok(G);
    double decoded_power = 0.0; // (1/G) sum of c^2 over already-decoded groups
    for (std::size_t g = 0; g < G; ++g) {
        const double E_prev = 1.0 - decoded_power;
        ok[g] = R * std::log(2.0) * (1.0 / snr + E_prev) / (c_groups[g] * c_groups[g]) < 0.5;
        decoded_power += c_groups[g] * c_groups[g] / static_cast<double>(G);
    }
    return ok;
}

SparseMessage message_from_symbols(const CodeParams& params, const PowerAllocation& alloc,
                                   const std::vector<std::uint32_t>& symbols) {
    if (symbols.size() != params.L || alloc.c.size() != params.L)
        throw std::invalid_argument("message_from_symbols: length mismatch");
    SparseMessage m;
    m.symbols = symbols;
    m.dense.assign(params.N, 0.0);
    for (std::size_t l = 0; l < params.L; ++l) {
        if (symbols[l] >= static_cast<std::uint32_t>(params.B))
            throw std::invalid_argument("message_from_symbols: symbol out of range");
        m.dense[l * params.B + symbols[l]] = alloc.c[l];
    }
    return m;
}

SparseMessage random_message(const CodeParams& params, const PowerAllocation& alloc,
                             Xoshiro256& rng) {
    if (alloc.c.size() != params.L)
        throw std::invalid_argument("random_message: allocation length mismatch");
    std::vector<std::uint32_t> symbols(params.L);
    const auto B = static_cast<std::uint64_t>(params.B);
    for (std::size_t l = 0; l < params.L; ++l) {
        // Rejection-free enough for the B values in play; bias is < 2^-40.
        symbols[l] = static_cast<std::uint32_t>((rng() >> 24) % B);
    }
    return message_from_symbols(params, alloc, symbols);
}

ChannelRealization transmit(const std::vector<double>& codeword, double snr,
                            Xoshiro256& rng) {
    if (snr <= 0) throw std::invalid_argument("transmit: snr must be > 0");
    ChannelRealization ch;
    const std::size_t M = codeword.size();
    ch.noise.resize(M);
    fill_normal(rng, ch.noise.data(), M);
    const double sigma = std::sqrt(1.0 / snr);
    ch.received.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        ch.noise[i] *= sigma;
        ch.received[i] = codeword[i] + ch.noise[i];
    }
    return ch;
}

double section_error_rate(const SparseMessage& x, const SparseMessage& x_hat) {
    if (x.symbols.size() != x_hat.symbols.size())
        throw std::invalid_argument("section_error_rate: length mismatch");
    std::size_t bad = 0;
    for (std::size_t l = 0; l < x.symbols.size(); ++l)
        bad += x.symbols[l] != x_hat.symbols[l];
    return static_cast<double>(bad) / static_cast<double>(x.symbols.size());
}

double mse_per_section(const std::vector<double>& x, const std::vector<double>& a,
                       std::size_t L) {
    if (x.size() != a.size())
        throw std::invalid_argument("mse_per_section: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - a[i];
        acc += d * d;
    }
    return acc / static_cast<double>(L);
}

} // namespace sparc
