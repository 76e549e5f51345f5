#pragma once

#include "aqr/artifact.hpp"
#include "aqr/data_pipeline.hpp"
#include "aqr/evaluation.hpp"
#include "aqr/missingness.hpp"
#include "aqr/training.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aqr {

inline constexpr const char* kToolName = "aqrcast";
inline constexpr const char* kToolVersion = "0.1.0";

struct DataSource {
    std::optional<std::filesystem::path> path;  // unset means synthetic
    double capacity = 1.0;
    std::size_t synthetic_n = 20000;
    ArSpec ar;
};

/// Missingness case. `none` keeps the source series as observed.
struct CaseSpec {
    std::string mechanism = "sporadic";  // sporadic | blocks | selfmask | none
    double p = 0.2;
    int n_blocks = 300;
    int len_min = 5;
    int len_max = 30;
    double threshold = 0.87;

    /// case1 (sporadic), case2 (blocks), case3 (selfmask) or none.
    std::string case_id() const;
};

struct EvaluationSpec {
    std::vector<double> betas = default_betas();
    int fan_window = 144;
    int fan_start = 0;
    double fan_beta = 0.9;
};

struct ExperimentConfig {
    DataSource data;
    int h = 6;
    std::vector<int> leads{1, 2, 3};
    CaseSpec case_spec;
    std::vector<ModelKind> models{ModelKind::Climatology, ModelKind::Aqr, ModelKind::ImQrLocf, ModelKind::ImQrMean,
                                  ModelKind::RQr};
    QuantileLevels levels = QuantileLevels::standard();
    NetworkShape network;
    TrainConfig train;
    SplitSpec split;
    EvaluationSpec evaluation;
    std::uint64_t seed = 0;
    std::filesystem::path output = "runs";

    /// Parses a JSON config. A seed must come from the document or from
    /// `seed_override`; unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = {},
                                      std::optional<std::filesystem::path> output_override = {});
    static ExperimentConfig load(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {},
                                 std::optional<std::filesystem::path> output_override = {});

    /// Fully resolved config, defaults included.
    nlohmann::json to_json() const;

    /// FNV-1a of the resolved config, as 16 hex digits.
    std::string hash() const;

    /// <output>/seed-<seed>
    std::filesystem::path run_dir() const;

    /// Per-job training seed derived from the run seed, model kind and lead.
    std::uint64_t job_seed(ModelKind kind, int lead) const;
};

struct TrainJob {
    ModelKind kind = ModelKind::Aqr;
    int lead = 1;
    bool ok = false;
    std::string error;
    std::filesystem::path artifact;
    TrainReport report;
};

struct RunSummaryRow {
    int lead = 1;
    int rank = 1;
    std::string model_kind;
    double crps_pct = 0.0;
};

std::filesystem::path model_path(const std::filesystem::path& run_dir, ModelKind kind, int lead);

/// Writes truth.csv, observed.csv and simulate.json into the run directory.
MaskedSeriesPair cmd_simulate(const ExperimentConfig& cfg);

/// Trains one artifact per (model, lead). A failing job is recorded and the
/// remaining jobs still run.
std::vector<TrainJob> cmd_train(const ExperimentConfig& cfg);

/// Writes crps.csv, reliability.csv, sharpness.csv, report.json and SVG plots.
std::vector<EvalReport> cmd_evaluate(const ExperimentConfig& cfg);

/// simulate -> train -> evaluate, then summary.csv ranking models per lead.
std::vector<RunSummaryRow> cmd_run(const ExperimentConfig& cfg);

}  // namespace aqr
