#include "aqr/training.hpp"

#include "aqr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aqr {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (patience < 0) throw std::invalid_argument("train: patience must be >= 0");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw std::invalid_argument("train: moment decays must lie in (0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("train: epsilon must be positive");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("train: weight_decay must be >= 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("train: lr_decay must lie in (0,1]");
}

std::vector<LaggedSample> filter_trainable(std::span<const LaggedSample> samples) {
    std::vector<LaggedSample> out;
    out.reserve(samples.size());
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
                 [](const LaggedSample& s) { return s.has_target(); });
    return out;
}

namespace {

class Adam {
public:
    Adam(const AqrParams& like, const TrainConfig& cfg)
        : first_(like.zeros_like()), second_(like.zeros_like()), cfg_(cfg) {}

    void step(AqrParams& params, const AqrParams& grad, double lr) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
        const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
        auto p = params.tensors();
        auto g = grad.tensors();
        auto m = first_.tensors();
        auto v = second_.tensors();
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto pa = p[i].data->array();
            auto ga = g[i].data->array();
            auto ma = m[i].data->array();
            auto va = v[i].data->array();
            if (cfg_.weight_decay > 0.0) {
                const Eigen::ArrayXXd gd = ga + cfg_.weight_decay * pa;
                ma = cfg_.beta1 * ma + (1.0 - cfg_.beta1) * gd;
                va = cfg_.beta2 * va + (1.0 - cfg_.beta2) * gd.square();
            } else {
                ma = cfg_.beta1 * ma + (1.0 - cfg_.beta1) * ga;
                va = cfg_.beta2 * va + (1.0 - cfg_.beta2) * ga.square();
            }
            pa -= lr * (ma / c1) / ((va / c2).sqrt() + cfg_.epsilon);
        }
    }

private:
    AqrParams first_;
    AqrParams second_;
    TrainConfig cfg_;
    int t_ = 0;
};

}  // namespace

TrainResult train(std::span<const LaggedSample> train_samples, std::span<const LaggedSample> val_samples,
                  const AqrParams& init_params, const TrainConfig& cfg) {
    cfg.validate();
    init_params.validate();
    const auto train_set = filter_trainable(train_samples);
    const auto val_set = filter_trainable(val_samples);
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    if (val_set.empty()) throw std::invalid_argument("train: empty validation set");

    TrainResult result{init_params, {}};
    auto& report = result.report;
    AqrParams params = init_params;
    Adam optimizer(params, cfg);
    Rng rng(derive_seed(cfg.seed, "shuffle"));

    report.initial_val_loss = batch_loss(val_set, params);
    double best_val = report.initial_val_loss;
    double lr = cfg.learning_rate;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<LaggedSample> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const auto stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            batch.clear();
            for (auto i = start; i < stop; ++i) batch.push_back(train_set[order[i]]);
            LossAndGradient lg;
            try {
                lg = loss_and_gradient(batch, params);
            } catch (const std::runtime_error& e) {
                throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch) + " (" + e.what() + ")");
            }
            epoch_loss += lg.loss * static_cast<double>(stop - start);
            optimizer.step(params, lg.gradient, lr);
        }
        const double val = batch_loss(val_set, params);
        if (!std::isfinite(val)) throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch));
        report.train_curve.push_back(epoch_loss / static_cast<double>(train_set.size()));
        report.val_curve.push_back(val);
        report.epochs_run = epoch + 1;

        if (report.best_epoch < 0 || val < best_val) {
            best_val = val;
            report.best_epoch = epoch;
            result.params = params;
        } else if (epoch - report.best_epoch >= cfg.patience) {
            break;
        }
        lr *= cfg.lr_decay;
    }
    return result;
}

FitResult fit_network(ModelKind kind, const std::vector<LaggedSample>& samples, const NetworkSpec& net,
                      const TrainConfig& cfg, const SplitSpec& split) {
    if (samples.empty()) throw std::invalid_argument("fit: no samples");
    const auto parts = chronological_split(samples, split);
    auto shape = net.shape;
    shape.inputs = static_cast<int>(samples.front().features.size());
    const auto init = AqrParams::initialize(shape, net.levels, samples.front().lead, derive_seed(cfg.seed, "init"));
    auto trained = train(parts.train, parts.val, init, cfg);
    return {ModelArtifact::from_network(kind, std::move(trained.params)), std::move(trained.report)};
}

FitResult fit_aqr(const ObservedSeries& observed, int h, int k, const NetworkSpec& net, const TrainConfig& cfg,
                  const SplitSpec& split) {
    return fit_network(ModelKind::Aqr, build_samples(observed, h, k), net, cfg, split);
}

}  // namespace aqr
