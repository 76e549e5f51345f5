#pragma once

#include "aqr/data_pipeline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace aqr {

enum class Mechanism { SporadicMCAR, BlockMAR, SelfMaskMNAR };

std::string to_string(Mechanism m);

/// Complete ground truth alongside its masked copy.
struct MaskedSeriesPair {
    ObservedSeries truth;
    ObservedSeries observed;
    Mechanism mechanism = Mechanism::SporadicMCAR;
    std::uint64_t seed = 0;

    double missing_fraction() const;
};

/// Half-open index range [begin, end).
struct Interval {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Each value independently missing with probability p.
MaskedSeriesPair mask_sporadic(const ObservedSeries& series, double p, std::uint64_t seed);

/// Block placements drawn by mask_blocks: start uniform over [0, n), length
/// uniform over {len_min..len_max}, truncated at n. Draw order is start then
/// length for each block.
std::vector<Interval> draw_blocks(std::size_t n, int n_blocks, int len_min, int len_max, std::uint64_t seed);

/// n_blocks randomly placed runs of missing values; overlapping runs merge.
MaskedSeriesPair mask_blocks(const ObservedSeries& series, int n_blocks, int len_min, int len_max,
                             std::uint64_t seed);

/// Self-masking: a value is removed iff it is strictly greater than threshold.
/// Existing NAs stay NA, so the operation is idempotent.
MaskedSeriesPair mask_selfmask(const ObservedSeries& series, double threshold);

/// All 2^d masks in lexicographic order (first coordinate most significant).
std::vector<Mask> pattern_enumerate(int d);

}  // namespace aqr
