#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aqr {

/// Seedable generator used for every random draw in the project.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard library distributions are not portable across
/// implementations, so the transforms to uniform/normal/integer variates are
/// implemented here on top of the raw 64-bit stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform on the open interval (0, 1).
    double uniform_open();

    /// Standard normal via the Box-Muller transform (one cached spare).
    double normal();

    /// Uniform integer in the closed range [lo, hi], rejection-sampled so the
    /// result carries no modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a run seed and a tag.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::int64_t index);

/// In-place Fisher-Yates shuffle driven by Rng.
template <typename It>
void shuffle(It first, It last, Rng& rng) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
        const auto j = rng.uniform_int(0, static_cast<std::int64_t>(i));
        std::swap(first[i], first[j]);
    }
}

}  // namespace aqr
