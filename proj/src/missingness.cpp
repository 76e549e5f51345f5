#include "aqr/missingness.hpp"

#include "aqr/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace aqr {

std::string to_string(Mechanism m) {
    switch (m) {
        case Mechanism::SporadicMCAR: return "sporadic";
        case Mechanism::BlockMAR: return "blocks";
        case Mechanism::SelfMaskMNAR: return "selfmask";
    }
    return "unknown";
}

double MaskedSeriesPair::missing_fraction() const {
    if (observed.size() == 0) return 0.0;
    return static_cast<double>(observed.count_missing()) / static_cast<double>(observed.size());
}

namespace {

void require_complete(const ObservedSeries& series) {
    if (!series.complete()) throw std::invalid_argument("missingness: input series already contains NA");
}

MaskedSeriesPair make_pair(const ObservedSeries& series, Mechanism mech, std::uint64_t seed) {
    MaskedSeriesPair pair;
    pair.truth = series;
    pair.observed = series;
    pair.mechanism = mech;
    pair.seed = seed;
    return pair;
}

}  // namespace

MaskedSeriesPair mask_sporadic(const ObservedSeries& series, double p, std::uint64_t seed) {
    require_complete(series);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mask_sporadic: p must lie in [0,1]");
    auto pair = make_pair(series, Mechanism::SporadicMCAR, seed);
    Rng rng(seed);
    for (auto& v : pair.observed.values) {
        if (rng.uniform() < p) v = kNA;
    }
    return pair;
}

std::vector<Interval> draw_blocks(std::size_t n, int n_blocks, int len_min, int len_max, std::uint64_t seed) {
    if (n_blocks < 1) throw std::invalid_argument("mask_blocks: n_blocks must be >= 1");
    if (len_min < 1 || len_min > len_max) throw std::invalid_argument("mask_blocks: need 1 <= len_min <= len_max");
    if (static_cast<std::size_t>(len_max) > n)
        throw std::invalid_argument("mask_blocks: len_max exceeds series length");
    Rng rng(seed);
    std::vector<Interval> blocks;
    blocks.reserve(static_cast<std::size_t>(n_blocks));
    for (int b = 0; b < n_blocks; ++b) {
        const auto start = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        const auto len = static_cast<std::size_t>(rng.uniform_int(len_min, len_max));
        blocks.push_back({start, std::min(start + len, n)});
    }
    return blocks;
}

MaskedSeriesPair mask_blocks(const ObservedSeries& series, int n_blocks, int len_min, int len_max,
                             std::uint64_t seed) {
    require_complete(series);
    auto pair = make_pair(series, Mechanism::BlockMAR, seed);
    for (const auto& block : draw_blocks(series.size(), n_blocks, len_min, len_max, seed)) {
        std::fill(pair.observed.values.begin() + static_cast<std::ptrdiff_t>(block.begin),
                  pair.observed.values.begin() + static_cast<std::ptrdiff_t>(block.end), kNA);
    }
    return pair;
}

MaskedSeriesPair mask_selfmask(const ObservedSeries& series, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw std::invalid_argument("mask_selfmask: threshold must lie in [0,1]");
    auto pair = make_pair(series, Mechanism::SelfMaskMNAR, 0);
    for (auto& v : pair.observed.values) {
        if (v > threshold) v = kNA;
    }
    return pair;
}

std::vector<Mask> pattern_enumerate(int d) {
    if (d < 1 || d > 12) throw std::invalid_argument("pattern_enumerate: d must lie in [1,12]");
    const std::size_t count = std::size_t{1} << d;
    std::vector<Mask> patterns;
    patterns.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        Mask m(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) m[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((idx >> (d - 1 - j)) & 1U);
        patterns.push_back(std::move(m));
    }
    return patterns;
}

}  // namespace aqr
