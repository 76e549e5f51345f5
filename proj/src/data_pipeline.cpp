#include "aqr/data_pipeline.hpp"

#include "aqr/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>

namespace aqr {

std::size_t ObservedSeries::count_missing() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), is_na));
}

void ObservedSeries::validate() const {
    if (timestamps.size() != values.size())
        throw std::invalid_argument("series: timestamps and values differ in length");
    if (!(capacity > 0.0)) throw std::invalid_argument("series: capacity must be positive");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] - timestamps[i - 1] != kHourSeconds)
            throw std::invalid_argument("series: non-hourly step at index " + std::to_string(i));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!is_na(v) && !(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("series: value outside [0,1] at index " + std::to_string(i));
    }
}

void SplitSpec::validate() const {
    for (double f : {train_frac, val_frac, test_frac}) {
        if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("split fractions must lie in (0,1)");
    }
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-12)
        throw std::invalid_argument("split fractions must sum to 1");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

ObservedSeries ingest_csv(const std::filesystem::path& path, double capacity) {
    if (!(capacity > 0.0)) throw std::invalid_argument("capacity must be positive");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::vector<std::int64_t> raw_times;
    std::vector<double> raw_values;
    std::string line;
    bool first_line = true;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (first_line) {
            first_line = false;
            if (text == "timestamp,value") continue;
        }
        if (text.empty()) continue;

        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
            throw CsvError(row, "expected two fields");
        const auto ts_field = trim(text.substr(0, comma));
        const auto value_field = trim(text.substr(comma + 1));

        std::int64_t ts = 0;
        if (!parse_number(ts_field, ts)) throw CsvError(row, "unparsable timestamp");
        if (!raw_times.empty() && ts <= raw_times.back()) throw CsvError(row, "timestamps not increasing");
        if (!raw_times.empty() && (ts - raw_times.front()) % kHourSeconds != 0)
            throw CsvError(row, "timestamp off the hourly grid");

        double v = kNA;
        if (!value_field.empty() && value_field != "NA") {
            if (!parse_number(value_field, v) || !std::isfinite(v)) throw CsvError(row, "unparsable value");
            if (v < 0.0) throw CsvError(row, "negative value");
            v = std::clamp(v / capacity, 0.0, 1.0);
        }
        raw_times.push_back(ts);
        raw_values.push_back(v);
        ++row;
    }

    ObservedSeries series;
    series.capacity = capacity;
    if (raw_times.empty()) return series;
    const auto span = (raw_times.back() - raw_times.front()) / kHourSeconds + 1;
    series.timestamps.reserve(static_cast<std::size_t>(span));
    series.values.assign(static_cast<std::size_t>(span), kNA);
    for (std::int64_t j = 0; j < span; ++j) series.timestamps.push_back(raw_times.front() + j * kHourSeconds);
    for (std::size_t i = 0; i < raw_times.size(); ++i) {
        series.values[static_cast<std::size_t>((raw_times[i] - raw_times.front()) / kHourSeconds)] = raw_values[i];
    }
    return series;
}

void write_csv(const ObservedSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "timestamp,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.timestamps[i] << ',';
        if (is_na(series.values[i])) {
            out << "NA\n";
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", series.values[i]);
            out << buf << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<LaggedSample> build_samples(const ObservedSeries& series, int h, int k) {
    if (h < 1 || k < 1) throw std::invalid_argument("build_samples: h and k must be >= 1");
    const auto n = series.size();
    const auto window = static_cast<std::size_t>(h) + static_cast<std::size_t>(k);
    if (n < window) {
        throw std::invalid_argument("build_samples: series of length " + std::to_string(n) +
                                    " is shorter than h + k = " + std::to_string(window));
    }
    std::vector<LaggedSample> samples;
    samples.reserve(n - window + 1);
    for (std::size_t origin = static_cast<std::size_t>(h) - 1; origin + static_cast<std::size_t>(k) < n; ++origin) {
        LaggedSample s;
        s.features.assign(series.values.begin() + static_cast<std::ptrdiff_t>(origin + 1 - h),
                          series.values.begin() + static_cast<std::ptrdiff_t>(origin + 1));
        s.mask.resize(s.features.size());
        std::transform(s.features.begin(), s.features.end(), s.mask.begin(),
                       [](double v) { return static_cast<std::uint8_t>(is_na(v)); });
        s.lead = k;
        s.target = series.values[origin + static_cast<std::size_t>(k)];
        s.origin_time = series.timestamps[origin];
        samples.push_back(std::move(s));
    }
    return samples;
}

std::pair<std::size_t, std::size_t> split_bounds(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    const auto nd = static_cast<double>(n);
    // slack for binary rounding of decimal fractions
    const auto part = [nd](double f) { return static_cast<std::size_t>(std::floor(nd * f + 1e-9)); };
    const auto train_end = part(spec.train_frac);
    const auto val_end = train_end + part(spec.val_frac);
    return {std::min(train_end, n), std::min(val_end, n)};
}

SampleSplit chronological_split(const std::vector<LaggedSample>& samples, const SplitSpec& spec) {
    if (samples.empty()) throw std::invalid_argument("chronological_split: no samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].origin_time < samples[i - 1].origin_time)
            throw std::invalid_argument("chronological_split: samples not ordered by origin time");
    }
    const auto [train_end, val_end] = split_bounds(samples.size(), spec);
    const auto begin = samples.begin();
    SampleSplit out;
    out.train.assign(begin, begin + static_cast<std::ptrdiff_t>(train_end));
    out.val.assign(begin + static_cast<std::ptrdiff_t>(train_end), begin + static_cast<std::ptrdiff_t>(val_end));
    out.test.assign(begin + static_cast<std::ptrdiff_t>(val_end), samples.end());
    return out;
}

ObservedSeries generate_synthetic(std::size_t n, std::uint64_t seed, const ArSpec& params) {
    if (n < 1) throw std::invalid_argument("generate_synthetic: n must be >= 1");
    if (!(std::abs(params.rho) < 1.0)) throw std::invalid_argument("generate_synthetic: |rho| must be < 1");
    if (!(params.sigma >= 0.0)) throw std::invalid_argument("generate_synthetic: sigma must be >= 0");
    Rng rng(seed);
    ObservedSeries series;
    series.timestamps.reserve(n);
    series.values.reserve(n);
    double state = params.initial_state;
    for (std::size_t t = 0; t < n; ++t) {
        series.timestamps.push_back(params.start_time + static_cast<std::int64_t>(t) * kHourSeconds);
        series.values.push_back(1.0 / (1.0 + std::exp(-state)));
        state = params.rho * state + params.sigma * rng.normal();
    }
    return series;
}

}  // namespace aqr
