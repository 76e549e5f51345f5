#pragma once

#include "aqr/artifact.hpp"
#include "aqr/model.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace aqr {

struct CdfKnot {
    double value = 0.0;
    double prob = 0.0;
};

/// Piecewise-linear CDF on [0, 1]; consecutive knots sharing a value form a
/// vertical jump.
struct PredictiveCdf {
    std::vector<CdfKnot> knots;

    /// Right-continuous evaluation.
    double operator()(double v) const;
};

/// Knots (0,0), (q_1, a_1), ..., (q_m, a_m), (1,1) with exact duplicates removed.
/// Rejects crossing quantiles and values outside [0, 1].
PredictiveCdf cdf_from_quantiles(const QuantileForecast& forecast);

/// Integral over [0,1] of (F(v) - 1{v >= y})^2, evaluated segment by segment
/// in closed form.
double crps(const PredictiveCdf& cdf, double y);
double crps(const QuantileForecast& forecast, double y);

/// (2/m) * sum_i pinball(y, q_i, a_i), the quantile-score approximation of CRPS.
double quantile_score(const QuantileForecast& forecast, double y);

/// Fraction of targets at or below the forecast quantile, per level.
std::vector<double> reliability(std::span<const QuantileForecast> forecasts, std::span<const double> targets,
                                const QuantileLevels& levels);

/// Mean width of the central interval [q_{(1-b)/2}, q_{(1+b)/2}] for each b.
std::vector<double> sharpness(std::span<const QuantileForecast> forecasts, std::span<const double> betas);

/// Central coverages 0.1, 0.2, ..., 0.9.
std::vector<double> default_betas();

struct EvalReport {
    std::string model_kind;
    std::string case_id;
    int lead = 1;
    std::uint64_t seed = 0;
    std::size_t sample_count = 0;
    double crps_pct = 0.0;
    std::vector<double> levels;
    std::vector<double> coverage;
    std::vector<double> betas;
    std::vector<double> widths;
};

struct EvalOptions {
    std::string case_id;
    std::uint64_t seed = 0;
    std::vector<double> betas = default_betas();
};

/// Scores the artifact on the samples with observed targets. Returns the
/// forecasts alongside the report when `forecasts_out` is non-null.
EvalReport evaluate(const ModelArtifact& model, std::span<const LaggedSample> test_samples, const EvalOptions& options,
                    std::vector<QuantileForecast>* forecasts_out = nullptr);

nlohmann::json to_json(const EvalReport& report);

}  // namespace aqr
