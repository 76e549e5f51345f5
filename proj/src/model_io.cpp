#include "aqr/artifact.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aqr {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Aqr: return "aqr";
        case ModelKind::ImQrLocf: return "im-qr-locf";
        case ModelKind::ImQrMean: return "im-qr-mean";
        case ModelKind::RQr: return "r-qr";
        case ModelKind::Climatology: return "climatology";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (auto kind : {ModelKind::Aqr, ModelKind::ImQrLocf, ModelKind::ImQrMean, ModelKind::RQr,
                      ModelKind::Climatology}) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

ModelArtifact ModelArtifact::from_network(ModelKind kind, AqrParams params) {
    if (kind == ModelKind::Climatology) throw std::invalid_argument("climatology is not a network model");
    ModelArtifact a;
    a.kind = kind;
    a.lead = params.lead;
    a.seed = params.seed;
    a.levels = params.levels;
    a.body = std::move(params);
    return a;
}

ModelArtifact ModelArtifact::from_climatology(ClimatologyModel model, const QuantileLevels& levels, int lead) {
    ModelArtifact a;
    a.kind = ModelKind::Climatology;
    a.lead = lead;
    a.levels = levels;
    a.body = std::move(model);
    return a;
}

Matrix ModelArtifact::forecast_batch(std::span<const LaggedSample> samples) const {
    if (const auto* clim = std::get_if<ClimatologyModel>(&body)) {
        const auto f = climatology_forecast(*clim, levels);
        Matrix out(static_cast<Eigen::Index>(levels.size()), static_cast<Eigen::Index>(samples.size()));
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, c) = f.values[static_cast<std::size_t>(i)];
        return out;
    }
    if (kind != ModelKind::Aqr) {
        for (const auto& s : samples) {
            for (auto bit : s.mask) {
                if (bit != 0) throw std::invalid_argument(to_string(kind) + " requires complete inputs");
            }
        }
    }
    return aqr::forecast_batch(samples, network());
}

QuantileForecast ModelArtifact::forecast(const LaggedSample& sample) const {
    const auto column = forecast_batch(std::span<const LaggedSample>(&sample, 1));
    QuantileForecast f;
    f.levels = levels.values();
    f.values.assign(column.data(), column.data() + column.size());
    return f;
}

namespace {

std::string fmt_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::string_view word() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const auto start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw std::runtime_error("model file: unexpected end of input");
        return text_.substr(start, pos_ - start);
    }

    void expect(std::string_view keyword) {
        const auto w = word();
        if (w != keyword)
            throw std::runtime_error("model file: expected '" + std::string(keyword) + "', found '" + std::string(w) + "'");
    }

    template <typename T>
    T number() {
        const auto w = word();
        T value{};
        const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
        if (ec != std::errc{} || ptr != w.data() + w.size())
            throw std::runtime_error("model file: bad number '" + std::string(w) + "'");
        return value;
    }

    template <typename T>
    T field(std::string_view keyword) {
        expect(keyword);
        return number<T>();
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const ModelArtifact& a) {
    std::ostringstream out;
    out << "aqrcast-model 1\n";
    out << "model_kind " << to_string(a.kind) << '\n';
    out << "lead " << a.lead << '\n';
    out << "seed " << a.seed << '\n';
    out << "levels " << a.levels.size();
    for (double alpha : a.levels.values()) out << ' ' << fmt_real(alpha);
    out << '\n';
    if (const auto* clim = std::get_if<ClimatologyModel>(&a.body)) {
        out << "targets " << clim->sorted_targets.size() << '\n';
        for (double v : clim->sorted_targets) out << fmt_real(v) << '\n';
    } else {
        const auto& p = a.network();
        out << "d " << p.shape.inputs << '\n';
        out << "hidden " << p.shape.hidden << '\n';
        out << "feature_layers " << p.shape.feature_layers << '\n';
        out << "head_layers " << p.shape.head_layers << '\n';
        for (const auto& t : p.tensors()) {
            const auto& m = *t.data;
            out << "tensor " << t.name << ' ' << m.rows() << ' ' << m.cols() << '\n';
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << fmt_real(m(i, j));
                out << '\n';
            }
        }
    }
    out << "end\n";
    return out.str();
}

ModelArtifact parse_model(std::string_view text) {
    Reader in(text);
    in.expect("aqrcast-model");
    if (const auto version = in.number<int>(); version != 1)
        throw std::runtime_error("model file: unsupported version " + std::to_string(version));
    in.expect("model_kind");
    const auto kind = parse_model_kind(in.word());
    const auto lead = in.field<int>("lead");
    const auto seed = in.field<std::uint64_t>("seed");
    const auto n_levels = in.field<std::size_t>("levels");
    std::vector<double> alphas(n_levels);
    for (auto& alpha : alphas) alpha = in.number<double>();
    const QuantileLevels levels(std::move(alphas));

    ModelArtifact artifact;
    if (kind == ModelKind::Climatology) {
        ClimatologyModel clim;
        clim.sorted_targets.resize(in.field<std::size_t>("targets"));
        for (auto& v : clim.sorted_targets) v = in.number<double>();
        if (clim.sorted_targets.empty()) throw std::runtime_error("model file: climatology without targets");
        artifact = ModelArtifact::from_climatology(std::move(clim), levels, lead);
    } else {
        NetworkShape shape;
        shape.inputs = in.field<int>("d");
        shape.hidden = in.field<int>("hidden");
        shape.feature_layers = in.field<int>("feature_layers");
        shape.head_layers = in.field<int>("head_layers");
        auto params = AqrParams::zeros(shape, levels, lead);
        params.seed = seed;
        for (auto& t : params.tensors()) {
            in.expect("tensor");
            in.expect(t.name);
            const auto rows = in.number<Eigen::Index>();
            const auto cols = in.number<Eigen::Index>();
            if (rows != t.data->rows() || cols != t.data->cols())
                throw std::runtime_error("model file: tensor " + t.name + " has the wrong shape");
            for (Eigen::Index i = 0; i < rows; ++i)
                for (Eigen::Index j = 0; j < cols; ++j) (*t.data)(i, j) = in.number<double>();
        }
        params.validate();
        artifact = ModelArtifact::from_network(kind, std::move(params));
    }
    artifact.seed = seed;
    in.expect("end");
    return artifact;
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << serialize_model(artifact);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing model artifact " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace aqr
