#ifndef QKDSIM_RNG_HPP
#define QKDSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace qkdsim {

/// Seedable, cross-platform PRNG (xoshiro256++ core, splitmix64 seeding).
///
/// Simulation results must be bit-identical across platforms and runs, so
/// we avoid std:: distributions (their output is implementation-defined).
/// Per-photon streams are derived with `stream(seed, photonId)` so the
/// photon loop can be reordered or parallelized without changing results.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    /// Independent stream for a given id (stream id = photonId).
    static Rng stream(uint64_t seed, uint64_t streamId) {
        uint64_t x = seed;
        uint64_t a = splitmix64(x);
        uint64_t y = streamId ^ 0x9e3779b97f4a7c15ULL;
        uint64_t b = splitmix64(y);
        return Rng(a ^ rotl(b, 17) ^ (streamId + 0x2545F4914F6CDD1DULL));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        const uint64_t threshold = -n % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Geometric sample (number of failures before first success), p = 1/mean.
    int64_t geometric(double mean) {
        if (mean <= 1.0) return 0;
        const double p = 1.0 / mean;
        double u = next_double();
        if (u >= 1.0) u = 0x1.fffffffffffffp-1;
        return static_cast<int64_t>(std::log1p(-u) / std::log1p(-p));
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    static uint64_t rotl(uint64_t x, int s) { return (x << s) | (x >> (64 - s)); }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t state_[4];
};

}  // namespace qkdsim

#endif
