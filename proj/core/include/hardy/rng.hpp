#pragma once

#include <cmath>
#include <cstdint>

namespace hardy {

// Counter-based random streams. Every draw is a pure function of
// (seed, a, b, index), so results do not depend on evaluation order or
// thread schedule. Words come from a chain of SplitMix64 finalizers over
// the key words; uniforms take the top 53 bits into (0,1]; Gaussians are
// Box-Muller over two consecutive uniforms.

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

inline std::uint64_t counterWord(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t index) noexcept {
    std::uint64_t z = detail::mix64(seed);
    z = detail::mix64(z ^ (0xa0761d6478bd642fULL * (a + 1)));
    z = detail::mix64(z ^ (0xe7037ed1a0b428dbULL * (b + 1)));
    z = detail::mix64(z ^ (0x8ebc6af09c88c6e3ULL * (index + 1)));
    return z;
}

/// Uniform in (0,1]: top 53 bits, offset by one ulp so log() is finite.
inline double counterUniform(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b, std::uint64_t index) noexcept {
    return static_cast<double>((counterWord(seed, a, b, index) >> 11) + 1) * 0x1p-53;
}

/// Standard Gaussian keyed by (seed, a, b); consumes indices 2k and 2k+1.
inline double counterGaussian(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b, std::uint64_t k) noexcept {
    const double u1 = counterUniform(seed, a, b, 2 * k);
    const double u2 = counterUniform(seed, a, b, 2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.28318530717958647692528676655900577 * u2);
}

/// Sequential view over one (seed, stream) pair.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) noexcept
        : seed_(seed), a_(stream), b_(substream) {}

    std::uint64_t nextWord() { return counterWord(seed_, a_, b_, next_++); }

    double uniform() { return counterUniform(seed_, a_, b_, next_++); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Log-uniform over [lo, hi], lo > 0.
    double logUniform(double lo, double hi) {
        return lo * std::exp(uniform() * std::log(hi / lo));
    }

    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.28318530717958647692528676655900577 * u2);
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return nextWord() % n; }

private:
    std::uint64_t seed_;
    std::uint64_t a_;
    std::uint64_t b_;
    std::uint64_t next_ = 0;
};

} // namespace hardy
