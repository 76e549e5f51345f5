#include "aqr/experiment.hpp"

#include "aqr/baselines.hpp"
#include "aqr/plots.hpp"
#include "aqr/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aqr {

using nlohmann::json;
namespace fs = std::filesystem;

std::string CaseSpec::case_id() const {
    if (mechanism == "sporadic") return "case1";
    if (mechanism == "blocks") return "case2";
    if (mechanism == "selfmask") return "case3";
    return "none";
}

// ---------------------------------------------------------------- config parsing

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc, std::optional<std::uint64_t> seed_override,
                                             std::optional<fs::path> output_override) {
    reject_unknown(doc,
                   {"data", "h", "leads", "case", "models", "levels", "network", "train", "split", "evaluation", "seed",
                    "output"},
                   "config");
    ExperimentConfig c;
    try {
        if (doc.contains("data")) {
            const auto& d = doc.at("data");
            reject_unknown(d, {"path", "capacity", "synthetic"}, "data");
            if (d.contains("path") && d.contains("synthetic"))
                throw std::invalid_argument("config: data takes either path or synthetic");
            if (d.contains("path")) c.data.path = d.at("path").get<std::string>();
            c.data.capacity = get_or(d, "capacity", c.data.capacity);
            if (d.contains("synthetic")) {
                const auto& s = d.at("synthetic");
                reject_unknown(s, {"n", "rho", "sigma", "initial_state"}, "data.synthetic");
                c.data.synthetic_n = get_or(s, "n", c.data.synthetic_n);
                c.data.ar.rho = get_or(s, "rho", c.data.ar.rho);
                c.data.ar.sigma = get_or(s, "sigma", c.data.ar.sigma);
                c.data.ar.initial_state = get_or(s, "initial_state", c.data.ar.initial_state);
            }
        }
        c.h = get_or(doc, "h", c.h);
        c.leads = get_or(doc, "leads", c.leads);
        if (doc.contains("case")) {
            const auto& k = doc.at("case");
            reject_unknown(k, {"mechanism", "p", "n_blocks", "len_min", "len_max", "threshold"}, "case");
            auto& cs = c.case_spec;
            cs.mechanism = get_or(k, "mechanism", cs.mechanism);
            cs.p = get_or(k, "p", cs.p);
            cs.n_blocks = get_or(k, "n_blocks", cs.n_blocks);
            cs.len_min = get_or(k, "len_min", cs.len_min);
            cs.len_max = get_or(k, "len_max", cs.len_max);
            cs.threshold = get_or(k, "threshold", cs.threshold);
        }
        if (doc.contains("models")) {
            c.models.clear();
            for (const auto& m : doc.at("models")) c.models.push_back(parse_model_kind(m.get<std::string>()));
        }
        if (doc.contains("levels")) c.levels = QuantileLevels(doc.at("levels").get<std::vector<double>>());
        if (doc.contains("network")) {
            const auto& n = doc.at("network");
            reject_unknown(n, {"hidden", "feature_layers", "head_layers"}, "network");
            c.network.hidden = get_or(n, "hidden", c.network.hidden);
            c.network.feature_layers = get_or(n, "feature_layers", c.network.feature_layers);
            c.network.head_layers = get_or(n, "head_layers", c.network.head_layers);
        }
        if (doc.contains("train")) {
            const auto& t = doc.at("train");
            reject_unknown(t,
                           {"learning_rate", "batch_size", "max_epochs", "patience", "beta1", "beta2", "epsilon",
                            "weight_decay", "lr_decay"},
                           "train");
            auto& tc = c.train;
            tc.learning_rate = get_or(t, "learning_rate", tc.learning_rate);
            tc.batch_size = get_or(t, "batch_size", tc.batch_size);
            tc.max_epochs = get_or(t, "max_epochs", tc.max_epochs);
            tc.patience = get_or(t, "patience", tc.patience);
            tc.beta1 = get_or(t, "beta1", tc.beta1);
            tc.beta2 = get_or(t, "beta2", tc.beta2);
            tc.epsilon = get_or(t, "epsilon", tc.epsilon);
            tc.weight_decay = get_or(t, "weight_decay", tc.weight_decay);
            tc.lr_decay = get_or(t, "lr_decay", tc.lr_decay);
        }
        if (doc.contains("split")) {
            const auto& s = doc.at("split");
            reject_unknown(s, {"train", "val", "test"}, "split");
            c.split.train_frac = get_or(s, "train", c.split.train_frac);
            c.split.val_frac = get_or(s, "val", c.split.val_frac);
            c.split.test_frac = get_or(s, "test", c.split.test_frac);
        }
        if (doc.contains("evaluation")) {
            const auto& e = doc.at("evaluation");
            reject_unknown(e, {"betas", "fan_window", "fan_start", "fan_beta"}, "evaluation");
            c.evaluation.betas = get_or(e, "betas", c.evaluation.betas);
            c.evaluation.fan_window = get_or(e, "fan_window", c.evaluation.fan_window);
            c.evaluation.fan_start = get_or(e, "fan_start", c.evaluation.fan_start);
            c.evaluation.fan_beta = get_or(e, "fan_beta", c.evaluation.fan_beta);
        }
        if (doc.contains("output")) c.output = doc.at("output").get<std::string>();
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }

    if (seed_override) {
        c.seed = *seed_override;
    } else if (!doc.contains("seed")) {
        throw std::invalid_argument("config: seed is required");
    }
    if (output_override) c.output = *output_override;

    if (c.h < 1) throw std::invalid_argument("config: h must be >= 1");
    if (c.leads.empty()) throw std::invalid_argument("config: leads must not be empty");
    for (int k : c.leads) {
        if (k < 1) throw std::invalid_argument("config: every lead must be >= 1");
    }
    if (c.models.empty()) throw std::invalid_argument("config: models must not be empty");
    const std::set<std::string> mechanisms{"sporadic", "blocks", "selfmask", "none"};
    if (!mechanisms.count(c.case_spec.mechanism))
        throw std::invalid_argument("config: unknown mechanism '" + c.case_spec.mechanism + "'");
    if (!(c.data.capacity > 0.0)) throw std::invalid_argument("config: capacity must be positive");
    if (c.evaluation.fan_window < 1 || c.evaluation.fan_start < 0)
        throw std::invalid_argument("config: invalid fan chart window");
    c.network.inputs = c.h;
    c.network.validate();
    c.train.validate();
    c.split.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path, std::optional<std::uint64_t> seed_override,
                                        std::optional<fs::path> output_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return from_json(doc, seed_override, std::move(output_override));
}

json ExperimentConfig::to_json() const {
    json data;
    if (this->data.path) {
        data = {{"path", this->data.path->string()}, {"capacity", this->data.capacity}};
    } else {
        data = {{"capacity", this->data.capacity},
                {"synthetic",
                 {{"n", this->data.synthetic_n},
                  {"rho", this->data.ar.rho},
                  {"sigma", this->data.ar.sigma},
                  {"initial_state", this->data.ar.initial_state}}}};
    }
    json model_names = json::array();
    for (auto m : models) model_names.push_back(to_string(m));
    return {
        {"data", data},
        {"h", h},
        {"leads", leads},
        {"case",
         {{"mechanism", case_spec.mechanism},
          {"p", case_spec.p},
          {"n_blocks", case_spec.n_blocks},
          {"len_min", case_spec.len_min},
          {"len_max", case_spec.len_max},
          {"threshold", case_spec.threshold}}},
        {"models", model_names},
        {"levels", levels.values()},
        {"network",
         {{"hidden", network.hidden}, {"feature_layers", network.feature_layers}, {"head_layers", network.head_layers}}},
        {"train",
         {{"learning_rate", train.learning_rate},
          {"batch_size", train.batch_size},
          {"max_epochs", train.max_epochs},
          {"patience", train.patience},
          {"beta1", train.beta1},
          {"beta2", train.beta2},
          {"epsilon", train.epsilon},
          {"weight_decay", train.weight_decay},
          {"lr_decay", train.lr_decay}}},
        {"split", {{"train", split.train_frac}, {"val", split.val_frac}, {"test", split.test_frac}}},
        {"evaluation",
         {{"betas", evaluation.betas},
          {"fan_window", evaluation.fan_window},
          {"fan_start", evaluation.fan_start},
          {"fan_beta", evaluation.fan_beta}}},
        {"seed", seed},
        {"output", output.string()},
    };
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json().dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path ExperimentConfig::run_dir() const {
    return output / ("seed-" + std::to_string(seed));
}

std::uint64_t ExperimentConfig::job_seed(ModelKind kind, int lead) const {
    return derive_seed(seed, "job:" + to_string(kind), lead);
}

fs::path model_path(const fs::path& run_dir, ModelKind kind, int lead) {
    return run_dir / "models" / (to_string(kind) + "_k" + std::to_string(lead) + ".model");
}

// ---------------------------------------------------------------- shared helpers

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_manifest(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.run_dir());
    write_json(cfg.run_dir() / "manifest.json", {{"tool", kToolName},
                                                  {"version", kToolVersion},
                                                  {"config_hash", cfg.hash()},
                                                  {"seed", cfg.seed},
                                                  {"config", cfg.to_json()}});
}

ObservedSeries load_source(const ExperimentConfig& cfg) {
    if (cfg.data.path) return ingest_csv(*cfg.data.path, cfg.data.capacity);
    return generate_synthetic(cfg.data.synthetic_n, derive_seed(cfg.seed, "data"), cfg.data.ar);
}

struct RunData {
    ObservedSeries truth;
    ObservedSeries observed;
};

RunData load_run_data(const ExperimentConfig& cfg) {
    const auto dir = cfg.run_dir();
    if (!fs::exists(dir / "observed.csv"))
        throw std::runtime_error("missing " + (dir / "observed.csv").string() + " (run simulate first)");
    RunData d{ingest_csv(dir / "truth.csv", 1.0), ingest_csv(dir / "observed.csv", 1.0)};
    if (d.truth.timestamps != d.observed.timestamps)
        throw std::runtime_error("truth.csv and observed.csv are not aligned");
    return d;
}

NetworkSpec network_spec(const ExperimentConfig& cfg) {
    return {cfg.network, cfg.levels};
}

/// Lag windows as seen by a model kind: the adaptive model and climatology
/// read the observed series, impute-then-predict models the imputed one, the
/// reference model the ground truth. Targets are always the observed values.
std::vector<LaggedSample> samples_for(ModelKind kind, const RunData& data, int h, int k) {
    switch (kind) {
        case ModelKind::Aqr:
        case ModelKind::Climatology: return build_samples(data.observed, h, k);
        case ModelKind::ImQrLocf:
            return build_samples_with_targets(impute(data.observed, ImputeMethod::LocfNocb), data.observed, h, k);
        case ModelKind::ImQrMean:
            return build_samples_with_targets(impute(data.observed, ImputeMethod::Mean), data.observed, h, k);
        case ModelKind::RQr:
            if (!data.truth.complete()) throw std::invalid_argument("r-qr: ground truth contains NA");
            return build_samples_with_targets(data.truth, data.observed, h, k);
    }
    throw std::logic_error("unhandled model kind");
}

json train_report_json(const TrainReport& r) {
    return {{"epochs_run", r.epochs_run},
            {"best_epoch", r.best_epoch},
            {"initial_val_loss", r.initial_val_loss},
            {"train_curve", r.train_curve},
            {"val_curve", r.val_curve},
            {"final_params_ref", r.final_params_ref}};
}

}  // namespace

// ---------------------------------------------------------------- commands

MaskedSeriesPair cmd_simulate(const ExperimentConfig& cfg) {
    write_manifest(cfg);
    const auto source = load_source(cfg);
    const auto& cs = cfg.case_spec;
    const auto mask_seed = derive_seed(cfg.seed, "mask");
    MaskedSeriesPair pair;
    if (cs.mechanism == "sporadic") {
        pair = mask_sporadic(source, cs.p, mask_seed);
    } else if (cs.mechanism == "blocks") {
        pair = mask_blocks(source, cs.n_blocks, cs.len_min, cs.len_max, mask_seed);
    } else if (cs.mechanism == "selfmask") {
        pair = mask_selfmask(source, cs.threshold);
    } else {
        pair.truth = source;
        pair.observed = source;
        pair.seed = mask_seed;
    }

    const auto dir = cfg.run_dir();
    write_csv(pair.truth, dir / "truth.csv");
    write_csv(pair.observed, dir / "observed.csv");
    json params;
    if (cs.mechanism == "sporadic") params = {{"p", cs.p}};
    if (cs.mechanism == "blocks")
        params = {{"n_blocks", cs.n_blocks}, {"len_min", cs.len_min}, {"len_max", cs.len_max}};
    if (cs.mechanism == "selfmask") params = {{"threshold", cs.threshold}};
    write_json(dir / "simulate.json", {{"config_hash", cfg.hash()},
                                       {"seed", cfg.seed},
                                       {"mechanism", cs.mechanism},
                                       {"case", cs.case_id()},
                                       {"parameters", params},
                                       {"mask_seed", mask_seed},
                                       {"length", pair.observed.size()},
                                       {"missing_count", pair.observed.count_missing()},
                                       {"missing_fraction", pair.missing_fraction()}});
    return pair;
}

std::vector<TrainJob> cmd_train(const ExperimentConfig& cfg) {
    write_manifest(cfg);
    const auto data = load_run_data(cfg);
    const auto dir = cfg.run_dir();
    fs::create_directories(dir / "models");

    std::vector<TrainJob> jobs;
    for (int k : cfg.leads) {
        for (auto kind : cfg.models) {
            TrainJob job;
            job.kind = kind;
            job.lead = k;
            job.artifact = model_path(dir, kind, k);
            try {
                const auto samples = samples_for(kind, data, cfg.h, k);
                ModelArtifact artifact;
                if (kind == ModelKind::Climatology) {
                    const auto parts = chronological_split(samples, cfg.split);
                    artifact = ModelArtifact::from_climatology(climatology_fit(parts.train), cfg.levels, k);
                } else {
                    auto tc = cfg.train;
                    tc.seed = cfg.job_seed(kind, k);
                    auto fit = fit_network(kind, samples, network_spec(cfg), tc, cfg.split);
                    artifact = std::move(fit.artifact);
                    job.report = std::move(fit.report);
                }
                job.report.final_params_ref = job.artifact.filename().string();
                save_model(artifact, job.artifact);
                if (kind != ModelKind::Climatology) {
                    auto report_path = job.artifact;
                    report_path.replace_extension(".train.json");
                    write_json(report_path, train_report_json(job.report));
                }
                job.ok = true;
            } catch (const std::exception& e) {
                job.error = e.what();
            }
            jobs.push_back(std::move(job));
        }
    }

    json listing = json::array();
    for (const auto& j : jobs) {
        json entry = {{"model_kind", to_string(j.kind)}, {"lead", j.lead}, {"ok", j.ok}};
        if (j.ok) {
            entry["artifact"] = j.artifact.filename().string();
            if (j.kind != ModelKind::Climatology) {
                entry["epochs_run"] = j.report.epochs_run;
                entry["best_epoch"] = j.report.best_epoch;
                entry["seed"] = cfg.job_seed(j.kind, j.lead);
            }
        } else {
            entry["error"] = j.error;
        }
        listing.push_back(entry);
    }
    write_json(dir / "train.json", {{"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"jobs", listing}});
    return jobs;
}

std::vector<EvalReport> cmd_evaluate(const ExperimentConfig& cfg) {
    write_manifest(cfg);
    const auto data = load_run_data(cfg);
    const auto dir = cfg.run_dir();
    fs::create_directories(dir / "plots");

    std::vector<EvalReport> reports;
    std::string crps_csv = "case,model_kind,lead,seed,sample_count,crps_pct\n";
    std::string rel_csv = "case,model_kind,lead,level,coverage\n";
    std::string sharp_csv = "case,model_kind,lead,beta,mean_width\n";
    EvalOptions options{cfg.case_spec.case_id(), cfg.seed, cfg.evaluation.betas};

    for (int k : cfg.leads) {
        std::vector<Curve> rel_curves;
        std::vector<Curve> sharp_curves;
        std::optional<FanChartData> fan;
        std::string fan_model;
        for (auto kind : cfg.models) {
            const auto path = model_path(dir, kind, k);
            if (!fs::exists(path)) throw std::runtime_error("missing model artifact " + path.string());
            const auto artifact = load_model(path);
            const auto parts = chronological_split(samples_for(kind, data, cfg.h, k), cfg.split);
            std::vector<QuantileForecast> forecasts;
            auto report = evaluate(artifact, parts.test, options, &forecasts);

            const auto& id = report.case_id;
            const auto name = report.model_kind;
            crps_csv += id + "," + name + "," + std::to_string(k) + "," + std::to_string(cfg.seed) + "," +
                        std::to_string(report.sample_count) + "," + real(report.crps_pct) + "\n";
            for (std::size_t i = 0; i < report.levels.size(); ++i)
                rel_csv += id + "," + name + "," + std::to_string(k) + "," + real(report.levels[i]) + "," +
                           real(report.coverage[i]) + "\n";
            for (std::size_t i = 0; i < report.betas.size(); ++i)
                sharp_csv += id + "," + name + "," + std::to_string(k) + "," + real(report.betas[i]) + "," +
                             real(report.widths[i]) + "\n";
            rel_curves.push_back({name, report.levels, report.coverage});
            sharp_curves.push_back({name, report.betas, report.widths});

            const bool prefer = kind == ModelKind::Aqr || !fan;
            const int lo = artifact.levels.find((1.0 - cfg.evaluation.fan_beta) / 2.0);
            const int hi = artifact.levels.find((1.0 + cfg.evaluation.fan_beta) / 2.0);
            if (prefer && lo >= 0 && hi >= 0) {
                int mid = artifact.levels.find(0.5);
                if (mid < 0) mid = static_cast<int>(artifact.levels.size() / 2);
                std::vector<double> targets;
                for (const auto& s : parts.test) {
                    if (s.has_target()) targets.push_back(s.target);
                }
                const auto start = std::min<std::size_t>(static_cast<std::size_t>(cfg.evaluation.fan_start),
                                                         forecasts.size() - 1);
                const auto stop = std::min(forecasts.size(), start + static_cast<std::size_t>(cfg.evaluation.fan_window));
                FanChartData fd;
                for (auto t = start; t < stop; ++t) {
                    fd.observed.push_back(targets[t]);
                    fd.lower.push_back(forecasts[t].values[static_cast<std::size_t>(lo)]);
                    fd.upper.push_back(forecasts[t].values[static_cast<std::size_t>(hi)]);
                    fd.median.push_back(forecasts[t].values[static_cast<std::size_t>(mid)]);
                }
                fan = std::move(fd);
                fan_model = name;
            }
            reports.push_back(std::move(report));
        }
        const auto suffix = "_k" + std::to_string(k) + ".svg";
        const auto title = cfg.case_spec.case_id() + ", lead " + std::to_string(k);
        write_text(dir / "plots" / ("reliability" + suffix), reliability_svg(rel_curves, "Reliability, " + title));
        write_text(dir / "plots" / ("sharpness" + suffix), sharpness_svg(sharp_curves, "Sharpness, " + title));
        if (fan) {
            char beta[16];
            std::snprintf(beta, sizeof beta, "%g", 100.0 * cfg.evaluation.fan_beta);
            write_text(dir / "plots" / ("fan" + suffix),
                       fan_chart_svg(*fan, std::string(beta) + "% intervals, " + fan_model + ", " + title));
        }
    }

    write_text(dir / "crps.csv", crps_csv);
    write_text(dir / "reliability.csv", rel_csv);
    write_text(dir / "sharpness.csv", sharp_csv);
    json doc = json::array();
    for (const auto& r : reports) {
        auto entry = to_json(r);
        if (r.model_kind == "im-qr-locf") entry["imputer"] = "locf_nocb (substitute for random-forest imputation)";
        if (r.model_kind == "im-qr-mean") entry["imputer"] = "mean (substitute for random-forest imputation)";
        doc.push_back(std::move(entry));
    }
    write_json(dir / "report.json", {{"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"reports", doc}});
    return reports;
}

std::vector<RunSummaryRow> cmd_run(const ExperimentConfig& cfg) {
    cmd_simulate(cfg);
    const auto jobs = cmd_train(cfg);
    std::string failures;
    for (const auto& j : jobs) {
        if (!j.ok) failures += (failures.empty() ? "" : "; ") + to_string(j.kind) + " k=" + std::to_string(j.lead) + ": " + j.error;
    }
    if (!failures.empty()) throw std::runtime_error("training failed: " + failures);
    const auto reports = cmd_evaluate(cfg);

    std::vector<RunSummaryRow> rows;
    for (int k : cfg.leads) {
        std::vector<RunSummaryRow> lead_rows;
        for (const auto& r : reports) {
            if (r.lead == k) lead_rows.push_back({k, 0, r.model_kind, r.crps_pct});
        }
        std::stable_sort(lead_rows.begin(), lead_rows.end(),
                         [](const auto& a, const auto& b) { return a.crps_pct < b.crps_pct; });
        for (std::size_t i = 0; i < lead_rows.size(); ++i) lead_rows[i].rank = static_cast<int>(i) + 1;
        rows.insert(rows.end(), lead_rows.begin(), lead_rows.end());
    }
    std::string csv = "lead,rank,model_kind,crps_pct\n";
    for (const auto& r : rows)
        csv += std::to_string(r.lead) + "," + std::to_string(r.rank) + "," + r.model_kind + "," + real(r.crps_pct) + "\n";
    write_text(cfg.run_dir() / "summary.csv", csv);
    return rows;
}

}  // namespace aqr
