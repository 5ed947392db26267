#pragma once
// Seed derivation and bulk Gaussian sampling.
//
// Every stochastic routine in the library takes an explicit 64-bit seed.
// Sub-streams (per trial, per block, per iteration) are derived from the
// master seed by counter so runs replay exactly regardless of execution
// order.

#include <cstdint>
#include <cstddef>

namespace sparc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from (master, a, b). Mixing each word
// through splitmix64 keeps nearby counters decorrelated.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t z = splitmix64(s);
    s ^= a + 0xD1B54A32D192ED03ull;
    z ^= splitmix64(s);
    s ^= b + 0x8BB84B93962EACC9ull;
    return z ^ splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in (0,1).
    double uniform() {
        return static_cast<double>((*this)() >> 11) * 0x1p-53 + 0x1p-54;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Fill `out` with n i.i.d. standard normals (Box-Muller on bulk uniform
// batches; the float variant trades precision for roughly double speed and
// is meant for regenerated operator entries).
void fill_normal(Xoshiro256& gen, double* out, std::size_t n);
void fill_normal_f(Xoshiro256& gen, float* out, std::size_t n);

// Single draws for cold paths.
double normal(Xoshiro256& gen);

} // namespace sparc
