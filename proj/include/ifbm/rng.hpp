// Reproducible Gaussian streams.
//
// Stream seeds are derived from (master_seed, stream_index, chunk) with the
// SplitMix64 finalizer; each derived seed drives a std::mt19937_64 whose output
// sequence is fixed by the C++ standard. Normals come from the Box-Muller
// transform on 53-bit uniforms, so the byte stream is the same on every
// conforming platform (up to libm rounding of log/sqrt/sincos).
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ifbm {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t chunk) noexcept {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    return splitmix64(s ^ splitmix64(chunk + 0x2545f4914f6cdd1dULL));
}

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ifbm
