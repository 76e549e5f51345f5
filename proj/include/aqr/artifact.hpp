#pragma once

#include "aqr/climatology.hpp"
#include "aqr/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace aqr {

enum class ModelKind { Aqr, ImQrLocf, ImQrMean, RQr, Climatology };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// A persisted forecaster. Network kinds carry AqrParams; im-qr and r-qr
/// networks are only ever fed complete inputs.
struct ModelArtifact {
    ModelKind kind = ModelKind::Aqr;
    int lead = 1;
    std::uint64_t seed = 0;
    QuantileLevels levels;
    std::variant<AqrParams, ClimatologyModel> body;

    static ModelArtifact from_network(ModelKind kind, AqrParams params);
    static ModelArtifact from_climatology(ClimatologyModel model, const QuantileLevels& levels, int lead);

    bool is_network() const { return std::holds_alternative<AqrParams>(body); }
    const AqrParams& network() const { return std::get<AqrParams>(body); }

    /// levels x n matrix of clipped forecasts.
    Matrix forecast_batch(std::span<const LaggedSample> samples) const;
    QuantileForecast forecast(const LaggedSample& sample) const;
};

/// Text format, version 1:
///
///   aqrcast-model 1
///   model_kind <aqr|im-qr-locf|im-qr-mean|r-qr|climatology>
///   lead <k>
///   seed <u64>
///   levels <m> <alpha_1> ... <alpha_m>
///
/// then, for network kinds,
///
///   d <d>
///   hidden <u>
///   feature_layers <L1>
///   head_layers <L2>
///   tensor <name> <rows> <cols>      (one line per row, space separated)
///   ...                              (AqrParams::tensors() order)
///
/// or, for climatology,
///
///   targets <n>                      (followed by n lines, one value each)
///
/// and finally `end`. Reals are written with 17 significant digits, which
/// round-trips every double exactly.
std::string serialize_model(const ModelArtifact& artifact);
ModelArtifact parse_model(std::string_view text);

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace aqr
