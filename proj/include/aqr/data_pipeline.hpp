#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqr {

inline constexpr double kNA = std::numeric_limits<double>::quiet_NaN();
inline constexpr std::int64_t kHourSeconds = 3600;

inline bool is_na(double v) { return std::isnan(v); }

/// Missingness indicator, 1 = missing.
using Mask = std::vector<std::uint8_t>;

/// Error raised while reading a CSV series; row() is the 0-based data row.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// Hourly series of capacity-normalized values; NA entries are NaN.
///
/// Timestamps are integer seconds since the epoch on a uniform 3600 s grid.
struct ObservedSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    double capacity = 1.0;

    std::size_t size() const { return values.size(); }
    std::size_t count_missing() const;
    bool complete() const { return count_missing() == 0; }

    /// Throws std::invalid_argument if any invariant is broken.
    void validate() const;
};

/// One supervised sample: h lagged inputs ending at the origin, target k steps ahead.
struct LaggedSample {
    std::vector<double> features;
    Mask mask;
    int lead = 1;
    double target = kNA;
    std::int64_t origin_time = 0;

    bool has_target() const { return !is_na(target); }
};

struct SplitSpec {
    double train_frac = 0.7;
    double val_frac = 0.1;
    double test_frac = 0.2;

    void validate() const;
};

struct SampleSplit {
    std::vector<LaggedSample> train;
    std::vector<LaggedSample> val;
    std::vector<LaggedSample> test;
};

struct ArSpec {
    double rho = 0.98;
    double sigma = 0.15;
    double initial_state = 0.0;
    std::int64_t start_time = 0;
};

/// Reads a `timestamp,value` CSV. Values are divided by `capacity` and clipped
/// to [0, 1]; empty fields and `NA` are missing; absent hours become NA rows.
ObservedSeries ingest_csv(const std::filesystem::path& path, double capacity);

/// Writes the normalized values in the same format ingest_csv reads (values
/// printed with 17 significant digits, so re-ingesting with capacity 1 is exact).
void write_csv(const ObservedSeries& series, const std::filesystem::path& path);

/// Lag windows of length h with target k steps ahead, one per admissible origin.
std::vector<LaggedSample> build_samples(const ObservedSeries& series, int h, int k);

/// Boundaries (train_end, val_end) for n items under the given split.
std::pair<std::size_t, std::size_t> split_bounds(std::size_t n, const SplitSpec& spec);

SampleSplit chronological_split(const std::vector<LaggedSample>& samples, const SplitSpec& spec);

/// Logistic transform of a latent AR(1) state; deterministic under `seed`.
ObservedSeries generate_synthetic(std::size_t n, std::uint64_t seed, const ArSpec& params = {});

}  // namespace aqr
