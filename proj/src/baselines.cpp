#include "aqr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqr {

ClimatologyModel climatology_fit(std::span<const LaggedSample> train_samples) {
    ClimatologyModel model;
    for (const auto& s : train_samples) {
        if (s.has_target()) model.sorted_targets.push_back(s.target);
    }
    if (model.sorted_targets.empty()) throw std::invalid_argument("climatology_fit: every target is NA");
    std::sort(model.sorted_targets.begin(), model.sorted_targets.end());
    return model;
}

double empirical_quantile(std::span<const double> sorted, double alpha) {
    if (sorted.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("empirical_quantile: alpha outside [0,1]");
    const auto n = sorted.size();
    if (n == 1) return sorted.front();
    const double pos = alpha * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= n) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

QuantileForecast climatology_forecast(const ClimatologyModel& model, const QuantileLevels& levels) {
    QuantileForecast f;
    f.levels = levels.values();
    for (double alpha : levels.values()) f.values.push_back(empirical_quantile(model.sorted_targets, alpha));
    // a + f (b - a) may land one ulp above b; keep the sequence monotone.
    for (std::size_t i = 1; i < f.values.size(); ++i) f.values[i] = std::max(f.values[i], f.values[i - 1]);
    return f;
}

std::string to_string(ImputeMethod method) {
    return method == ImputeMethod::LocfNocb ? "locf" : "mean";
}

ObservedSeries impute(const ObservedSeries& series, ImputeMethod method) {
    const auto observed = series.size() - series.count_missing();
    if (observed == 0) throw std::invalid_argument("impute: series has no observed value");
    ObservedSeries out = series;
    auto& v = out.values;
    if (method == ImputeMethod::Mean) {
        double sum = 0.0;
        for (double x : series.values) {
            if (!is_na(x)) sum += x;
        }
        const double mean = sum / static_cast<double>(observed);
        std::replace_if(v.begin(), v.end(), is_na, mean);
        return out;
    }
    double last = kNA;
    for (auto& x : v) {
        if (is_na(x)) {
            x = last;
        } else {
            last = x;
        }
    }
    const auto first = std::find_if(v.begin(), v.end(), [](double x) { return !is_na(x); });
    std::fill(v.begin(), first, *first);
    return out;
}

std::vector<LaggedSample> build_samples_with_targets(const ObservedSeries& inputs, const ObservedSeries& targets,
                                                     int h, int k) {
    if (inputs.timestamps != targets.timestamps)
        throw std::invalid_argument("build_samples_with_targets: series are not aligned");
    auto samples = build_samples(inputs, h, k);
    const auto with_targets = build_samples(targets, h, k);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i].target = with_targets[i].target;
    return samples;
}

FitResult fit_imqr(const MaskedSeriesPair& masked, ImputeMethod method, int h, int k, const NetworkSpec& net,
                   const TrainConfig& cfg, const SplitSpec& split) {
    const auto imputed = impute(masked.observed, method);
    const auto kind = method == ImputeMethod::LocfNocb ? ModelKind::ImQrLocf : ModelKind::ImQrMean;
    return fit_network(kind, build_samples_with_targets(imputed, masked.observed, h, k), net, cfg, split);
}

FitResult fit_rqr(const ObservedSeries& truth, int h, int k, const NetworkSpec& net, const TrainConfig& cfg,
                  const SplitSpec& split) {
    if (!truth.complete()) throw std::invalid_argument("fit_rqr: ground truth contains NA");
    return fit_network(ModelKind::RQr, build_samples(truth, h, k), net, cfg, split);
}

}  // namespace aqr
