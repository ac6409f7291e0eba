#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace taes {

// SplitMix64 finalizer, used to derive independent substream seeds from the
// experiment seed. Streams with distinct ids never overlap in practice.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream ids. Environment and policy draws never share a stream, so changing
// the number of draws one side makes cannot perturb the other.
inline constexpr std::uint64_t kEnvStream = 0;
inline constexpr std::uint64_t kPolicyStream = 1;
inline constexpr std::uint64_t kLatentStreamBase = 100;  // + activity index

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is pinned by the C++ standard; all variate transforms are
// implemented here by hand because the standard library's distribution
// objects are not guaranteed to produce identical sequences across
// implementations. Every draw increments a counter so callers can report
// exactly how much randomness they consumed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    static RandomStream substream(std::uint64_t seed, std::uint64_t stream_id) {
        return RandomStream(mix_seed(seed, stream_id));
    }

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    // [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; consumes two engine draws per variate.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kTwoPi * u2);
    }

    // Failures before first success, support {0, 1, ...}, mean (1-p)/p.
    std::uint64_t geometric(double p) {
        const double u = uniform01();
        return static_cast<std::uint64_t>(std::log1p(-u) / std::log1p(-p));
    }

    // Uniform index in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n) {
        const auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    std::uint64_t draws() const { return draws_; }

private:
    static constexpr double kTwoPi = 6.283185307179586476925286766559;
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace taes
