#pragma once

#include "aqr/artifact.hpp"
#include "aqr/climatology.hpp"
#include "aqr/missingness.hpp"
#include "aqr/training.hpp"

namespace aqr {

enum class ImputeMethod { LocfNocb, Mean };

std::string to_string(ImputeMethod method);

/// `LocfNocb` carries the last observation forward and back-fills a leading
/// gap; `Mean` replaces every NA with the mean of the observed values.
ObservedSeries impute(const ObservedSeries& series, ImputeMethod method);

/// Samples whose features come from `inputs` and whose targets come from
/// `targets`. Both series must share the time grid.
std::vector<LaggedSample> build_samples_with_targets(const ObservedSeries& inputs, const ObservedSeries& targets,
                                                     int h, int k);

/// Impute-then-predict: the same network trained on imputed, complete lag
/// windows. Targets stay the observed ones (NA targets are dropped).
FitResult fit_imqr(const MaskedSeriesPair& masked, ImputeMethod method, int h, int k, const NetworkSpec& net,
                   const TrainConfig& cfg, const SplitSpec& split = {});

/// Reference model trained on the complete ground truth.
FitResult fit_rqr(const ObservedSeries& truth, int h, int k, const NetworkSpec& net, const TrainConfig& cfg,
                  const SplitSpec& split = {});

}  // namespace aqr
