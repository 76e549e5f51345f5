#pragma once

#include "aqr/data_pipeline.hpp"
#include "aqr/model.hpp"

#include <span>
#include <vector>

namespace aqr {

/// Unconditional empirical distribution of the training targets.
struct ClimatologyModel {
    std::vector<double> sorted_targets;
};

/// Sorts the non-NA targets; throws if there are none.
ClimatologyModel climatology_fit(std::span<const LaggedSample> train_samples);

/// Linear interpolation between order statistics at plotting positions
/// (i - 1) / (n - 1) (Hyndman-Fan type 7). `sorted` must be nondecreasing.
double empirical_quantile(std::span<const double> sorted, double alpha);

QuantileForecast climatology_forecast(const ClimatologyModel& model, const QuantileLevels& levels);

}  // namespace aqr
