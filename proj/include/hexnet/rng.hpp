#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index, position), so any sample can be regenerated without
// replaying the stream that produced it.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace hexnet {

/// Identifier recorded in checkpoints and reports.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter-v1";

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream ^ 0xd1b54a32d192ed03ULL));
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
        : state_(mix64(stream_key(seed, stream) ^ mix64(index))) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; portable across standard libraries.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Bernoulli(p) via comparison of a raw 64-bit draw against p·2⁶⁴.
class BernoulliThreshold {
public:
    explicit BernoulliThreshold(double p)
        : always_(p >= 1.0),
          threshold_(p <= 0.0 || p >= 1.0 ? 0 : static_cast<std::uint64_t>(std::ldexp(p, 64))) {}

    bool operator()(std::uint64_t draw) const { return always_ || draw < threshold_; }
    [[nodiscard]] bool never() const { return !always_ && threshold_ == 0; }
    [[nodiscard]] bool always() const { return always_; }

private:
    bool always_;
    std::uint64_t threshold_;
};

}  // namespace hexnet
