#pragma once

#include "aqr/artifact.hpp"
#include "aqr/data_pipeline.hpp"
#include "aqr/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aqr {

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 256;
    int max_epochs = 200;
    int patience = 20;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;  // L2 penalty added to the gradient
    double lr_decay = 1.0;      // learning rate multiplier applied after every epoch

    void validate() const;
};

struct TrainReport {
    int epochs_run = 0;
    std::vector<double> train_curve;  // mean pinball over the epoch's minibatches
    std::vector<double> val_curve;    // mean pinball on the validation set after each epoch
    int best_epoch = -1;
    double initial_val_loss = 0.0;
    std::string final_params_ref;
};

struct TrainResult {
    AqrParams params;
    TrainReport report;
};

/// Drops samples whose target is NA. Feature NAs are kept.
std::vector<LaggedSample> filter_trainable(std::span<const LaggedSample> samples);

/// Minibatch Adam on batch_loss with validation early stopping. Returns the
/// parameters of the epoch with the lowest validation loss. Every random
/// choice derives from cfg.seed.
TrainResult train(std::span<const LaggedSample> train_samples, std::span<const LaggedSample> val_samples,
                  const AqrParams& init_params, const TrainConfig& cfg);

/// Architecture and output settings shared by every network fit.
struct NetworkSpec {
    NetworkShape shape;
    QuantileLevels levels = QuantileLevels::standard();
};

struct FitResult {
    ModelArtifact artifact;
    TrainReport report;
};

/// Initializes from derive_seed(cfg.seed, "init") and trains on the train/val
/// parts of a chronological split of `samples`.
FitResult fit_network(ModelKind kind, const std::vector<LaggedSample>& samples, const NetworkSpec& net,
                      const TrainConfig& cfg, const SplitSpec& split);

/// The adaptive model trained directly on the observed (NA-bearing) series.
FitResult fit_aqr(const ObservedSeries& observed, int h, int k, const NetworkSpec& net, const TrainConfig& cfg,
                  const SplitSpec& split = {});

}  // namespace aqr
