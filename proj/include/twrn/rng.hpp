#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace twrn {

/// SplitMix64 step; used only to derive sub-stream seeds, never as the
/// sampling engine itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic sub-seed derivation: the master seed is folded with each
/// tag in order through SplitMix64. Campaigns call this as
/// derive_seed(master, {purpose, snr_index, frame_index}) so every frame
/// owns an independent, reproducible stream per purpose.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t x = splitmix64(master);
    for (std::uint64_t t : tags) x = splitmix64(x ^ t);
    return x;
}

/// Seeded random stream with pinned sampling algorithms (53-bit uniforms,
/// Box-Muller gaussians) so that identical seeds give identical draws on
/// any platform, independent of the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one value per call, no cached state.
    double gaussian() {
        // u1 in (0, 1] keeps the log finite.
        double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Circularly symmetric complex gaussian with E{|x|^2} = variance.
    std::complex<double> complex_gaussian(double variance) {
        double s = std::sqrt(variance / 2.0);
        double re = gaussian();
        double im = gaussian();
        return {s * re, s * im};
    }

private:
    std::mt19937_64 engine_;
};

} // namespace twrn
