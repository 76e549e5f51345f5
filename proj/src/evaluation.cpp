#include "aqr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqr {

double PredictiveCdf::operator()(double v) const {
    if (knots.empty()) throw std::logic_error("empty predictive cdf");
    if (v < knots.front().value) return 0.0;
    if (v >= knots.back().value) return 1.0;
    // Last knot with value <= v; the next one is strictly to the right.
    const auto it = std::upper_bound(knots.begin(), knots.end(), v,
                                     [](double x, const CdfKnot& k) { return x < k.value; });
    const auto& right = *it;
    const auto& left = *(it - 1);
    const double t = (v - left.value) / (right.value - left.value);
    return left.prob + t * (right.prob - left.prob);
}

PredictiveCdf cdf_from_quantiles(const QuantileForecast& forecast) {
    if (forecast.levels.size() != forecast.values.size())
        throw std::invalid_argument("cdf_from_quantiles: levels and values differ in length");
    PredictiveCdf cdf;
    cdf.knots.push_back({0.0, 0.0});
    for (std::size_t i = 0; i < forecast.values.size(); ++i) {
        const double q = forecast.values[i];
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("cdf_from_quantiles: quantile outside [0,1]");
        if (q < cdf.knots.back().value) throw std::invalid_argument("cdf_from_quantiles: crossing quantiles");
        cdf.knots.push_back({q, forecast.levels[i]});
    }
    cdf.knots.push_back({1.0, 1.0});
    const auto last = std::unique(cdf.knots.begin(), cdf.knots.end(), [](const CdfKnot& a, const CdfKnot& b) {
        return a.value == b.value && a.prob == b.prob;
    });
    cdf.knots.erase(last, cdf.knots.end());
    return cdf;
}

namespace {

// Integral of (F - c)^2 over [a, b] with F linear from fa to fb.
double segment_integral(double a, double b, double fa, double fb, double c) {
    const double u = fa - c;
    const double w = fb - c;
    return (b - a) * (u * u + u * w + w * w) / 3.0;
}

}  // namespace

double crps(const PredictiveCdf& cdf, double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("crps: observation outside [0,1]");
    double total = 0.0;
    for (std::size_t j = 1; j < cdf.knots.size(); ++j) {
        const auto& l = cdf.knots[j - 1];
        const auto& r = cdf.knots[j];
        if (r.value <= l.value) continue;
        if (r.value <= y) {
            total += segment_integral(l.value, r.value, l.prob, r.prob, 0.0);
        } else if (l.value >= y) {
            total += segment_integral(l.value, r.value, l.prob, r.prob, 1.0);
        } else {
            const double fy = l.prob + (y - l.value) / (r.value - l.value) * (r.prob - l.prob);
            total += segment_integral(l.value, y, l.prob, fy, 0.0);
            total += segment_integral(y, r.value, fy, r.prob, 1.0);
        }
    }
    return total;
}

double crps(const QuantileForecast& forecast, double y) {
    return crps(cdf_from_quantiles(forecast), y);
}

double quantile_score(const QuantileForecast& forecast, double y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < forecast.values.size(); ++i) sum += pinball(y, forecast.values[i], forecast.levels[i]);
    return 2.0 * sum / static_cast<double>(forecast.values.size());
}

std::vector<double> reliability(std::span<const QuantileForecast> forecasts, std::span<const double> targets,
                                const QuantileLevels& levels) {
    if (forecasts.empty()) throw std::invalid_argument("reliability: no forecasts");
    if (forecasts.size() != targets.size()) throw std::invalid_argument("reliability: forecasts and targets differ in length");
    std::vector<std::size_t> hits(levels.size(), 0);
    for (std::size_t t = 0; t < forecasts.size(); ++t) {
        const auto& f = forecasts[t];
        if (is_na(targets[t])) throw std::invalid_argument("reliability: NA target");
        if (f.values.size() != levels.size()) throw std::invalid_argument("reliability: forecast has wrong level count");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (targets[t] <= f.values[i]) ++hits[i];
        }
    }
    std::vector<double> coverage;
    for (auto h : hits) coverage.push_back(static_cast<double>(h) / static_cast<double>(forecasts.size()));
    return coverage;
}

std::vector<double> sharpness(std::span<const QuantileForecast> forecasts, std::span<const double> betas) {
    if (forecasts.empty()) throw std::invalid_argument("sharpness: no forecasts");
    const QuantileLevels levels(forecasts.front().levels);
    std::vector<double> widths;
    for (double beta : betas) {
        const int lo = levels.find((1.0 - beta) / 2.0);
        const int hi = levels.find((1.0 + beta) / 2.0);
        if (lo < 0 || hi < 0) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g", beta);
            throw std::invalid_argument(std::string("sharpness: levels for central interval ") + buf + " are absent");
        }
        double sum = 0.0;
        for (const auto& f : forecasts)
            sum += f.values[static_cast<std::size_t>(hi)] - f.values[static_cast<std::size_t>(lo)];
        widths.push_back(sum / static_cast<double>(forecasts.size()));
    }
    return widths;
}

std::vector<double> default_betas() {
    std::vector<double> b;
    for (int i = 1; i <= 9; ++i) b.push_back(i / 10.0);
    return b;
}

EvalReport evaluate(const ModelArtifact& model, std::span<const LaggedSample> test_samples, const EvalOptions& options,
                    std::vector<QuantileForecast>* forecasts_out) {
    std::vector<LaggedSample> scored;
    for (const auto& s : test_samples) {
        if (s.has_target()) scored.push_back(s);
    }
    if (scored.empty()) throw std::invalid_argument("evaluate: no test sample with an observed target");

    const Matrix q = model.forecast_batch(scored);
    std::vector<QuantileForecast> forecasts;
    std::vector<double> targets;
    forecasts.reserve(scored.size());
    double total = 0.0;
    for (std::size_t t = 0; t < scored.size(); ++t) {
        QuantileForecast f;
        f.levels = model.levels.values();
        const auto col = q.col(static_cast<Eigen::Index>(t));
        f.values.assign(col.data(), col.data() + col.size());
        total += crps(f, scored[t].target);
        targets.push_back(scored[t].target);
        forecasts.push_back(std::move(f));
    }

    EvalReport r;
    r.model_kind = to_string(model.kind);
    r.case_id = options.case_id;
    r.lead = model.lead;
    r.seed = options.seed;
    r.sample_count = scored.size();
    r.crps_pct = 100.0 * total / static_cast<double>(scored.size());
    r.levels = model.levels.values();
    r.coverage = reliability(forecasts, targets, model.levels);
    r.betas = options.betas;
    r.widths = sharpness(forecasts, options.betas);
    if (forecasts_out) *forecasts_out = std::move(forecasts);
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    return {
        {"model_kind", r.model_kind},
        {"case", r.case_id},
        {"lead", r.lead},
        {"seed", r.seed},
        {"sample_count", r.sample_count},
        {"crps_pct", r.crps_pct},
        {"reliability", {{"levels", r.levels}, {"coverage", r.coverage}}},
        {"sharpness", {{"betas", r.betas}, {"mean_width", r.widths}}},
    };
}

}  // namespace aqr
