#include "aqr/artifact.hpp"
#include "aqr/training.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace aqr;

namespace {

NetworkSpec small_net() {
    NetworkSpec net;
    net.shape.hidden = 16;
    return net;
}

}  // namespace

TEST_CASE("filter_trainable drops NA targets only") {
    Rng rng(1);
    std::vector<LaggedSample> s;
    for (int i = 0; i < 5; ++i) s.push_back(oracle::random_sample(rng, 3, 0.5, i != 1 && i != 3));
    const auto kept = filter_trainable(s);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].target == s[0].target);
    CHECK(kept[1].target == s[2].target);
    CHECK(kept[2].features.size() == 3);

    for (auto& x : s) x.target = kNA;
    CHECK(filter_trainable(s).empty());

    std::vector<LaggedSample> full;
    for (int i = 0; i < 4; ++i) full.push_back(oracle::random_sample(rng, 3, 0.0));
    CHECK(filter_trainable(full).size() == 4);
}

TEST_CASE("train config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.learning_rate = 0.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.batch_size = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.beta2 = 1.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.lr_decay = 1.5;
    CHECK_THROWS(c.validate());
}

TEST_CASE("training improves validation loss on an AR series") {
    const auto series = generate_synthetic(2000, 3);
    TrainConfig cfg;
    cfg.seed = 5;
    const auto fit = fit_aqr(series, 6, 1, small_net(), cfg);
    const auto& r = fit.report;
    REQUIRE(r.best_epoch >= 0);
    CHECK(r.val_curve[static_cast<std::size_t>(r.best_epoch)] < r.initial_val_loss);
    CHECK(r.val_curve[static_cast<std::size_t>(r.best_epoch)] ==
          *std::min_element(r.val_curve.begin(), r.val_curve.end()));
    CHECK(r.epochs_run == static_cast<int>(r.val_curve.size()));
    CHECK(r.epochs_run <= cfg.max_epochs);
    if (r.epochs_run < cfg.max_epochs) CHECK(r.epochs_run - 1 - r.best_epoch == cfg.patience);
}

TEST_CASE("early stopping returns the best parameters, not the last") {
    const auto series = generate_synthetic(1200, 4);
    const auto samples = build_samples(series, 6, 1);
    const auto parts = chronological_split(samples, {});
    TrainConfig cfg;
    cfg.seed = 9;
    cfg.learning_rate = 0.05;  // noisy enough that the last epoch is rarely the best
    cfg.max_epochs = 30;
    cfg.patience = 30;
    const auto init = AqrParams::initialize(small_net().shape, QuantileLevels::standard(), 1, 1);
    const auto res = train(parts.train, parts.val, init, cfg);
    const auto& v = res.report.val_curve;
    const auto best = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    CHECK(res.report.best_epoch == static_cast<int>(best));
    CHECK(batch_loss(filter_trainable(parts.val), res.params) == v[best]);
}

TEST_CASE("one epoch with zero patience") {
    const auto samples = build_samples(generate_synthetic(600, 2), 6, 1);
    const auto parts = chronological_split(samples, {});
    TrainConfig cfg;
    cfg.patience = 0;
    cfg.max_epochs = 1;
    const auto init = AqrParams::initialize(small_net().shape, QuantileLevels::standard(), 1, 1);
    const auto res = train(parts.train, parts.val, init, cfg);
    CHECK(res.report.epochs_run == 1);
    CHECK(res.report.best_epoch == 0);
    CHECK(res.report.train_curve.size() == 1);
}

TEST_CASE("training is bit-reproducible under a seed") {
    const auto series = generate_synthetic(1500, 6);
    TrainConfig cfg;
    cfg.seed = 17;
    cfg.max_epochs = 15;
    const auto a = fit_aqr(series, 6, 1, small_net(), cfg);
    const auto b = fit_aqr(series, 6, 1, small_net(), cfg);
    CHECK(serialize_model(a.artifact) == serialize_model(b.artifact));
    cfg.seed = 18;
    const auto c = fit_aqr(series, 6, 1, small_net(), cfg);
    CHECK(serialize_model(a.artifact) != serialize_model(c.artifact));
}

TEST_CASE("training on NA-bearing inputs") {
    auto series = generate_synthetic(1500, 7);
    Rng rng(3);
    for (auto& v : series.values) {
        if (rng.uniform() < 0.3) v = kNA;
    }
    TrainConfig cfg;
    cfg.max_epochs = 5;
    const auto fit = fit_aqr(series, 6, 2, small_net(), cfg);
    CHECK(fit.artifact.kind == ModelKind::Aqr);
    CHECK(fit.artifact.lead == 2);
    CHECK_NOTHROW(fit.artifact.network().validate());
}

TEST_CASE("empty training or validation sets are rejected") {
    auto samples = build_samples(generate_synthetic(100, 1), 6, 1);
    const auto init = AqrParams::initialize(small_net().shape, QuantileLevels::standard(), 1, 1);
    std::vector<LaggedSample> none;
    CHECK_THROWS(train(none, samples, init, {}));
    CHECK_THROWS(train(samples, none, init, {}));
    for (auto& s : samples) s.target = kNA;
    CHECK_THROWS(train(samples, samples, init, {}));
}

TEST_CASE("divergence names the epoch") {
    const auto samples = build_samples(generate_synthetic(400, 1), 6, 1);
    const auto parts = chronological_split(samples, {});
    TrainConfig cfg;
    cfg.learning_rate = 1e300;
    cfg.max_epochs = 5;
    const auto init = AqrParams::initialize(small_net().shape, QuantileLevels::standard(), 1, 1);
    CHECK_THROWS_WITH(train(parts.train, parts.val, init, cfg), doctest::Contains("epoch"));
}
