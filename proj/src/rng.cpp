#include "sparc/rng.hpp"

#include <math.h>

// Compiled with -ffast-math (see CMakeLists) so the log/sin/cos calls in the
// chunk loops vectorize through libmvec.

namespace sparc {

namespace {
constexpr std::size_t kChunk = 2048; // pairs per batch
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

// The radius, cosine and sine passes are separate loops on purpose: a single
// loop makes the compiler fuse sin+cos into scalar sincos, which has no
// vector version, and the whole loop falls back to scalar libm calls.
void fill_normal(Xoshiro256& gen, double* out, std::size_t n) {
    double u1[kChunk], u2[kChunk], r[kChunk], s[kChunk];
    std::size_t produced = 0;
    while (produced < n) {
        std::size_t pairs = (n - produced + 1) / 2;
        if (pairs > kChunk) pairs = kChunk;
        for (std::size_t i = 0; i < pairs; ++i)
            u1[i] = static_cast<double>(gen() >> 11) * 0x1p-53 + 0x1p-54;
        for (std::size_t i = 0; i < pairs; ++i)
            u2[i] = static_cast<double>(gen() >> 11) * 0x1p-53;
        for (std::size_t i = 0; i < pairs; ++i)
            r[i] = sqrt(-2.0 * log(u1[i]));
        for (std::size_t i = 0; i < pairs; ++i)
            s[i] = r[i] * sin(kTwoPi * u2[i]);
        for (std::size_t i = 0; i < pairs; ++i)
            u1[i] = r[i] * cos(kTwoPi * u2[i]);
        for (std::size_t i = 0; i < pairs && produced < n; ++i) {
            out[produced++] = u1[i];
            if (produced < n) out[produced++] = s[i];
        }
    }
}

void fill_normal_f(Xoshiro256& gen, float* out, std::size_t n) {
    float u1[kChunk], u2[kChunk], r[kChunk], s[kChunk];
    std::size_t produced = 0;
    while (produced < n) {
        std::size_t pairs = (n - produced + 1) / 2;
        if (pairs > kChunk) pairs = kChunk;
        // Two floats per 64-bit draw; top bits feed u1, low bits u2.
        for (std::size_t i = 0; i < pairs; ++i) {
            const std::uint64_t bits = gen();
            u1[i] = static_cast<float>(bits >> 40) * 0x1p-24f + 0x1p-25f;
            u2[i] = static_cast<float>((bits >> 16) & 0xFFFFFFu) * 0x1p-24f;
        }
        for (std::size_t i = 0; i < pairs; ++i)
            r[i] = sqrtf(-2.0f * logf(u1[i]));
        for (std::size_t i = 0; i < pairs; ++i)
            s[i] = r[i] * sinf(static_cast<float>(kTwoPi) * u2[i]);
        for (std::size_t i = 0; i < pairs; ++i)
            u1[i] = r[i] * cosf(static_cast<float>(kTwoPi) * u2[i]);
        for (std::size_t i = 0; i < pairs && produced < n; ++i) {
            out[produced++] = u1[i];
            if (produced < n) out[produced++] = s[i];
        }
    }
}

double normal(Xoshiro256& gen) {
    const double u1 = gen.uniform();
    const double u2 = static_cast<double>(gen() >> 11) * 0x1p-53;
    return sqrt(-2.0 * log(u1)) * cos(kTwoPi * u2);
}

} // namespace sparc
