#include "aqr/baselines.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace aqr;

namespace {

ObservedSeries series_of(std::vector<double> v) {
    ObservedSeries s;
    for (std::size_t i = 0; i < v.size(); ++i) s.timestamps.push_back(static_cast<std::int64_t>(i) * kHourSeconds);
    s.values = std::move(v);
    return s;
}

std::vector<LaggedSample> with_targets(std::vector<double> t) {
    std::vector<LaggedSample> out;
    for (double y : t) {
        LaggedSample s;
        s.features = {0.5};
        s.mask = {0};
        s.target = y;
        out.push_back(s);
    }
    return out;
}

NetworkSpec small_net() {
    NetworkSpec net;
    net.shape.hidden = 8;
    return net;
}

TrainConfig short_cfg(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.max_epochs = 4;
    return cfg;
}

}  // namespace

TEST_CASE("climatology fit sorts the observed targets") {
    CHECK(climatology_fit(with_targets({0.4, 0.1, kNA, 0.3})).sorted_targets == std::vector<double>{0.1, 0.3, 0.4});
    CHECK(climatology_fit(with_targets({0.5})).sorted_targets == std::vector<double>{0.5});
    CHECK_THROWS(climatology_fit(with_targets({kNA, kNA})));
}

TEST_CASE("type-7 empirical quantiles") {
    const std::vector<double> two{0.0, 1.0};
    CHECK(empirical_quantile(two, 0.5) == 0.5);
    const std::vector<double> three{0.1, 0.3, 0.4};
    // position 0.5 * (3 - 1) = 1 lands on the second order statistic
    CHECK(empirical_quantile(three, 0.5) == 0.3);
    CHECK(empirical_quantile(three, 0.25) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(empirical_quantile(three, 0.0) == 0.1);
    CHECK(empirical_quantile(three, 1.0) == 0.4);
}

TEST_CASE("climatology forecasts are monotone and input-independent") {
    Rng rng(1);
    std::vector<double> t;
    for (int i = 0; i < 999; ++i) t.push_back(rng.uniform());
    const auto model = climatology_fit(with_targets(t));
    const auto f = climatology_forecast(model, QuantileLevels::standard());
    CHECK(f.non_crossing());
    const auto artifact = ModelArtifact::from_climatology(model, QuantileLevels::standard(), 1);
    const auto a = artifact.forecast(oracle::random_sample(rng, 6, 0.5));
    const auto b = artifact.forecast(oracle::random_sample(rng, 6, 0.0));
    CHECK(a.values == b.values);
    CHECK(a.values == f.values);
}

TEST_CASE("imputation") {
    const auto locf = impute(series_of({0.2, kNA, kNA, 0.6}), ImputeMethod::LocfNocb);
    CHECK(locf.values == std::vector<double>{0.2, 0.2, 0.2, 0.6});
    CHECK(impute(series_of({kNA, 0.4}), ImputeMethod::LocfNocb).values == std::vector<double>{0.4, 0.4});
    const auto mean = impute(series_of({0.2, kNA, 0.6}), ImputeMethod::Mean);
    CHECK(mean.values[1] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS(impute(series_of({kNA, kNA}), ImputeMethod::Mean));
}

TEST_CASE("imputation never alters observed entries") {
    auto s = generate_synthetic(3000, 2);
    const auto masked = mask_blocks(s, 50, 5, 30, 9);
    for (auto method : {ImputeMethod::LocfNocb, ImputeMethod::Mean}) {
        const auto filled = impute(masked.observed, method);
        CHECK(filled.complete());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!is_na(masked.observed.values[i])) REQUIRE(filled.values[i] == masked.observed.values[i]);
        }
    }
}

TEST_CASE("impute-then-predict keeps observed targets") {
    const auto truth = series_of({0.1, 0.2, kNA, 0.4, 0.5});
    const auto filled = impute(truth, ImputeMethod::LocfNocb);
    const auto s = build_samples_with_targets(filled, truth, 1, 1);
    REQUIRE(s.size() == 4);
    CHECK_FALSE(s[1].has_target());
    CHECK(s[2].features == std::vector<double>{0.2});
    CHECK(s[2].mask == Mask{0});
    auto shifted = truth;
    shifted.timestamps[0] = -1;
    CHECK_THROWS(build_samples_with_targets(filled, shifted, 1, 1));
}

TEST_CASE("with no missing values impute-then-predict and the reference coincide") {
    const auto s = generate_synthetic(1200, 5);
    const auto pair = mask_sporadic(s, 0.0, 1);
    const auto im = fit_imqr(pair, ImputeMethod::Mean, 6, 1, small_net(), short_cfg(3));
    const auto ref = fit_rqr(s, 6, 1, small_net(), short_cfg(3));
    CHECK(oracle::flatten(im.artifact.network()) == oracle::flatten(ref.artifact.network()));
    CHECK(im.artifact.kind == ModelKind::ImQrMean);
    CHECK(ref.artifact.kind == ModelKind::RQr);
}

TEST_CASE("impute-then-predict on self-masked data") {
    ArSpec ar;
    ar.sigma = 0.3;
    const auto pair = mask_selfmask(generate_synthetic(1500, 6, ar), 0.87);
    REQUIRE(pair.observed.count_missing() > 0);
    const auto a = fit_imqr(pair, ImputeMethod::Mean, 6, 1, small_net(), short_cfg(4));
    const auto b = fit_imqr(pair, ImputeMethod::Mean, 6, 1, small_net(), short_cfg(4));
    CHECK(serialize_model(a.artifact) == serialize_model(b.artifact));
    const auto samples = build_samples(impute(pair.observed, ImputeMethod::Mean), 6, 1);
    for (std::size_t i = 0; i < samples.size(); i += 37) CHECK(a.artifact.forecast(samples[i]).non_crossing());
}

TEST_CASE("reference model needs complete truth") {
    auto s = generate_synthetic(500, 1);
    const auto fit = fit_rqr(s, 6, 1, small_net(), short_cfg(1));
    CHECK(fit.artifact.forecast(build_samples(s, 6, 1)[10]).non_crossing());
    s.values[3] = kNA;
    CHECK_THROWS(fit_rqr(s, 6, 1, small_net(), short_cfg(1)));
}

TEST_CASE("complete-input models reject masked inputs") {
    const auto s = generate_synthetic(500, 1);
    const auto fit = fit_rqr(s, 6, 1, small_net(), short_cfg(1));
    Rng rng(2);
    auto sample = oracle::random_sample(rng, 6, 0.0);
    sample.mask[2] = 1;
    sample.features[2] = kNA;
    CHECK_THROWS(fit.artifact.forecast(sample));
}
