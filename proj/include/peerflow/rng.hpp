#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace peerflow {

namespace detail {

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Labeled, seedable random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniform and Gaussian variates are produced here rather than
/// through <random> distributions, whose algorithms vary between standard
/// library vendors. Identical (seed, label) pairs yield identical draws.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string label)
        : seed_(seed), label_(std::move(label)), engine_(detail::splitmix64(seed ^ detail::fnv1a64(label_)))
    {
    }

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& label() const noexcept { return label_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound). Lemire-style rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound)
    {
        if (bound == 0) {
            throw std::invalid_argument("RngStream::below: bound must be positive");
        }
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    /// Standard normal via the Marsaglia polar method. The spare variate is
    /// cached, so draw order is part of the stream's contract.
    double standard_normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

private:
    std::uint64_t seed_;
    std::string label_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draw from N(mean, variance). A zero variance returns `mean` exactly and
/// consumes no randomness.
inline double gaussian(RngStream& rng, double mean, double variance)
{
    if (!(variance >= 0.0)) {
        throw std::invalid_argument("gaussian: variance must be non-negative");
    }
    if (variance == 0.0) {
        return mean;
    }
    return mean + std::sqrt(variance) * rng.standard_normal();
}

} // namespace peerflow
