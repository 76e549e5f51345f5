#include "aqr/artifact.hpp"
#include "aqr/climatology.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace aqr;

TEST_CASE("model kind names round trip") {
    for (auto k : {ModelKind::Aqr, ModelKind::ImQrLocf, ModelKind::ImQrMean, ModelKind::RQr, ModelKind::Climatology})
        CHECK(parse_model_kind(to_string(k)) == k);
    CHECK(to_string(ModelKind::ImQrLocf) == "im-qr-locf");
    CHECK_THROWS(parse_model_kind("missforest"));
}

TEST_CASE("network artifacts round trip exactly") {
    NetworkShape shape;
    shape.hidden = 7;
    auto p = AqrParams::initialize(shape, QuantileLevels::standard(), 3, 99);
    const auto a = ModelArtifact::from_network(ModelKind::ImQrMean, p);
    const auto text = serialize_model(a);
    CHECK(text.rfind("aqrcast-model 1\nmodel_kind im-qr-mean\nlead 3\n", 0) == 0);
    const auto b = parse_model(text);
    CHECK(b.kind == ModelKind::ImQrMean);
    CHECK(b.lead == 3);
    CHECK(b.levels == a.levels);
    CHECK(b.network().shape == shape);
    CHECK(oracle::flatten(b.network()) == oracle::flatten(p));
    CHECK(serialize_model(b) == text);
}

TEST_CASE("climatology artifacts round trip exactly") {
    ClimatologyModel m{{0.1, 0.2, 1.0 / 3.0, 0.9}};
    const auto a = ModelArtifact::from_climatology(m, QuantileLevels({0.25, 0.5, 0.75}), 2);
    const auto b = parse_model(serialize_model(a));
    CHECK_FALSE(b.is_network());
    CHECK(std::get<ClimatologyModel>(b.body).sorted_targets == m.sorted_targets);
    CHECK(b.levels == a.levels);
    const auto F = b.forecast_batch(std::vector<LaggedSample>(3));
    CHECK(F.rows() == 3);
    CHECK(F.cols() == 3);
}

TEST_CASE("save and load") {
    TempDir dir;
    const auto p = AqrParams::initialize(NetworkShape{}, QuantileLevels::standard(), 1, 5);
    const auto a = ModelArtifact::from_network(ModelKind::Aqr, p);
    save_model(a, dir.path / "m.model");
    const auto b = load_model(dir.path / "m.model");
    CHECK(serialize_model(b) == serialize_model(a));
    CHECK_THROWS_WITH(load_model(dir.path / "none.model"), doctest::Contains("missing model artifact"));
}

TEST_CASE("malformed artifacts are rejected") {
    const auto good = serialize_model(
        ModelArtifact::from_network(ModelKind::Aqr, AqrParams::initialize(NetworkShape{}, QuantileLevels({0.5}), 1, 1)));
    CHECK_THROWS(parse_model(""));
    CHECK_THROWS(parse_model("aqrcast-model 2\n"));
    CHECK_THROWS(parse_model(good.substr(0, good.size() / 2)));
    auto wrong_kind = good;
    wrong_kind.replace(wrong_kind.find("aqr\n"), 3, "xyz");
    CHECK_THROWS(parse_model(wrong_kind));
    auto no_end = good.substr(0, good.rfind("end"));
    CHECK_THROWS(parse_model(no_end));
}
