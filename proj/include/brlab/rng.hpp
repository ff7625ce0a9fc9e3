#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace brlab {

/// Counter-based generator: the state is a pure function of (seed, stream,
/// counter), so parallel multi-start runs draw identical numbers regardless
/// of scheduling. Stream 0, 1, ... are independent substreams.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0x3c6ef372fe94f82bull))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return m * std::cos(2.0 * M_PI * u2);
    }

    std::complex<double> complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace brlab
