#include "aqr/model.hpp"

#include "aqr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqr {

// ---------------------------------------------------------------- levels

QuantileLevels::QuantileLevels(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw std::invalid_argument("quantile levels: need at least one level");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (!(levels_[i] > 0.0 && levels_[i] < 1.0))
            throw std::invalid_argument("quantile levels: every level must lie in (0,1)");
        if (i > 0 && !(levels_[i] > levels_[i - 1]))
            throw std::invalid_argument("quantile levels: levels must be strictly increasing");
    }
}

QuantileLevels QuantileLevels::standard() {
    std::vector<double> v;
    for (int i = 1; i <= 19; ++i) v.push_back(i / 20.0);
    return QuantileLevels(std::move(v));
}

int QuantileLevels::find(double alpha) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (std::abs(levels_[i] - alpha) <= 1e-9) return static_cast<int>(i);
    }
    return -1;
}

bool QuantileForecast::non_crossing() const {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] >= values[i - 1])) return false;
    }
    return true;
}

void NetworkShape::validate() const {
    if (inputs < 1) throw std::invalid_argument("network: inputs must be >= 1");
    if (hidden < 1) throw std::invalid_argument("network: hidden width must be >= 1");
    if (feature_layers < 0) throw std::invalid_argument("network: feature_layers must be >= 0");
    if (head_layers < 1) throw std::invalid_argument("network: head_layers must be >= 1");
}

// ---------------------------------------------------------------- params

AqrParams AqrParams::zeros(const NetworkShape& shape, const QuantileLevels& levels, int lead) {
    shape.validate();
    if (levels.size() == 0) throw std::invalid_argument("params: empty quantile levels");
    AqrParams p;
    p.shape = shape;
    p.levels = levels;
    p.lead = lead;
    const auto d = shape.inputs;
    const auto u = shape.hidden;
    p.feature_weights.assign(static_cast<std::size_t>(shape.feature_layers), Matrix::Zero(d, d));
    p.adaptive_bias = Matrix::Zero(d, 1);
    p.heads.resize(levels.size());
    for (auto& head : p.heads) {
        for (int l = 0; l < shape.head_layers; ++l) {
            head.weights.push_back(Matrix::Zero(u, l == 0 ? d : u));
            head.biases.push_back(Matrix::Zero(u, 1));
        }
        head.out = Matrix::Zero(u, 1);
    }
    return p;
}

AqrParams AqrParams::initialize(const NetworkShape& shape, const QuantileLevels& levels, int lead,
                                std::uint64_t seed) {
    auto p = zeros(shape, levels, lead);
    p.seed = seed;
    Rng rng(seed);
    auto fill = [&rng](Matrix& m, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = bound * (2.0 * rng.uniform() - 1.0);
    };
    const int d = shape.inputs;
    const int u = shape.hidden;
    for (auto& w : p.feature_weights) fill(w, d);
    fill(p.adaptive_bias, d);
    for (std::size_t i = 0; i < p.heads.size(); ++i) {
        auto& head = p.heads[i];
        for (int l = 0; l < shape.head_layers; ++l) {
            const int fan_in = l == 0 ? d : u;
            fill(head.weights[static_cast<std::size_t>(l)], fan_in);
            fill(head.biases[static_cast<std::size_t>(l)], fan_in);
        }
        fill(head.out, u);
        // increments start active: the hidden state is nonnegative, so a
        // nonnegative coefficient vector gives a nonnegative score
        if (i > 0) head.out = head.out.cwiseAbs();
    }
    return p;
}

AqrParams AqrParams::zeros_like() const {
    auto p = zeros(shape, levels, lead);
    p.seed = seed;
    return p;
}

namespace {

template <typename Self, typename Ref>
std::vector<Ref> collect_tensors(Self& self) {
    std::vector<Ref> out;
    for (std::size_t l = 0; l < self.feature_weights.size(); ++l)
        out.push_back({"feature.W" + std::to_string(l), &self.feature_weights[l]});
    out.push_back({"feature.bias", &self.adaptive_bias});
    for (std::size_t i = 0; i < self.heads.size(); ++i) {
        auto& head = self.heads[i];
        const auto prefix = "head" + std::to_string(i) + ".";
        for (std::size_t l = 0; l < head.weights.size(); ++l) {
            out.push_back({prefix + "W" + std::to_string(l), &head.weights[l]});
            out.push_back({prefix + "b" + std::to_string(l), &head.biases[l]});
        }
        out.push_back({prefix + "out", &head.out});
    }
    return out;
}

}  // namespace

std::vector<TensorRef<Matrix>> AqrParams::tensors() {
    return collect_tensors<AqrParams, TensorRef<Matrix>>(*this);
}

std::vector<TensorRef<const Matrix>> AqrParams::tensors() const {
    return collect_tensors<const AqrParams, TensorRef<const Matrix>>(*this);
}

std::size_t AqrParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors()) n += static_cast<std::size_t>(t.data->size());
    return n;
}

void AqrParams::validate() const {
    shape.validate();
    if (levels.size() == 0) throw std::invalid_argument("params: empty quantile levels");
    if (lead < 1) throw std::invalid_argument("params: lead must be >= 1");
    const auto expected = zeros(shape, levels, lead);
    const auto want = expected.tensors();
    const auto have = tensors();
    if (want.size() != have.size()) throw std::invalid_argument("params: tensor count does not match shape");
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (have[i].data->rows() != want[i].data->rows() || have[i].data->cols() != want[i].data->cols())
            throw std::invalid_argument("params: tensor " + have[i].name + " has the wrong shape");
        if (!have[i].data->allFinite())
            throw std::invalid_argument("params: tensor " + have[i].name + " is not finite");
    }
}

// ---------------------------------------------------------------- single-sample forward

Vector zero_fill(std::span<const double> features, const Mask& mask) {
    if (features.size() != mask.size()) throw std::invalid_argument("zero_fill: features and mask differ in length");
    Vector out(static_cast<Eigen::Index>(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (mask[j] > 1) throw std::invalid_argument("zero_fill: mask entries must be 0 or 1");
        if (mask[j] == 0 && is_na(features[j]))
            throw std::invalid_argument("zero_fill: NA at index " + std::to_string(j) + " is not flagged in the mask");
        out(static_cast<Eigen::Index>(j)) = mask[j] == 1 ? 0.0 : features[j];
    }
    return out;
}

namespace {

Vector mask_vector(const Mask& mask) {
    Vector m(static_cast<Eigen::Index>(mask.size()));
    for (std::size_t j = 0; j < mask.size(); ++j) m(static_cast<Eigen::Index>(j)) = mask[j];
    return m;
}

void check_inputs(std::size_t n_features, const AqrParams& params) {
    if (static_cast<int>(n_features) != params.shape.inputs) {
        throw std::invalid_argument("model expects " + std::to_string(params.shape.inputs) + " features, got " +
                                    std::to_string(n_features));
    }
}

}  // namespace

Vector feature_block(std::span<const double> features, const Mask& mask, const AqrParams& params) {
    check_inputs(features.size(), params);
    const Vector h0 = zero_fill(features, mask);
    const Vector missing = mask_vector(mask);
    const Vector keep = Vector::Ones(missing.size()) - missing;
    Vector h = h0;
    for (std::size_t l = 0; l < params.feature_weights.size(); ++l) {
        h = (params.feature_weights[l] * h).cwiseProduct(keep) + h0;
        if (!h.allFinite()) throw std::runtime_error("feature_block: non-finite output at layer " + std::to_string(l));
    }
    Vector z = h + params.adaptive_bias.col(0).cwiseProduct(missing);
    if (!z.allFinite()) throw std::runtime_error("feature_block: non-finite adaptive bias output");
    return z;
}

QuantileForecast quantile_head(const Vector& z, const AqrParams& params) {
    if (z.size() != params.shape.inputs) throw std::invalid_argument("quantile_head: latent size mismatch");
    if (!z.allFinite()) throw std::invalid_argument("quantile_head: latent features not finite");
    QuantileForecast out;
    out.levels = params.levels.values();
    out.values.reserve(params.heads.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < params.heads.size(); ++i) {
        const auto& head = params.heads[i];
        Vector g = z;
        for (std::size_t l = 0; l < head.weights.size(); ++l)
            g = (head.weights[l] * g + head.biases[l].col(0)).cwiseMax(0.0);
        const double score = head.out.col(0).dot(g);
        previous = i == 0 ? score : previous + std::max(score, 0.0);
        out.values.push_back(previous);
    }
    return out;
}

QuantileForecast predict_unclipped(std::span<const double> features, const Mask& mask, const AqrParams& params) {
    return quantile_head(feature_block(features, mask, params), params);
}

QuantileForecast forward(const LaggedSample& sample, const AqrParams& params) {
    auto f = predict_unclipped(sample.features, sample.mask, params);
    for (auto& v : f.values) v = std::clamp(v, 0.0, 1.0);
    return f;
}

double pinball(double y, double q, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pinball: alpha must lie in (0,1)");
    const double e = y - q;
    return std::max(alpha * e, (alpha - 1.0) * e);
}

// ---------------------------------------------------------------- batched path

namespace {

struct Batch {
    Matrix x;        // d x n, zero-filled
    Matrix missing;  // d x n
    Matrix keep;     // d x n
    Eigen::RowVectorXd y;
};

Batch make_batch(std::span<const LaggedSample> samples, const AqrParams& params, bool need_targets) {
    const auto d = params.shape.inputs;
    const auto n = static_cast<Eigen::Index>(samples.size());
    Batch b{Matrix(d, n), Matrix(d, n), Matrix(d, n), Eigen::RowVectorXd(n)};
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto& s = samples[static_cast<std::size_t>(c)];
        check_inputs(s.features.size(), params);
        b.x.col(c) = zero_fill(s.features, s.mask);
        b.missing.col(c) = mask_vector(s.mask);
        if (need_targets && !s.has_target())
            throw std::invalid_argument("batch contains a sample with NA target at index " + std::to_string(c));
        b.y(c) = s.target;
    }
    b.keep = Matrix::Ones(d, n) - b.missing;
    return b;
}

struct ForwardCache {
    std::vector<Matrix> feature_h;               // h0 .. h_{L1}
    Matrix z;                                    // d x n
    std::vector<std::vector<Matrix>> head_pre;   // [level][layer] pre-activation
    std::vector<std::vector<Matrix>> head_act;   // [level][layer] relu output
    Matrix scores;                               // levels x n
    Matrix q;                                    // levels x n, unclipped
};

void run_forward(const Batch& b, const AqrParams& p, ForwardCache& c, bool keep_intermediates) {
    c.feature_h.clear();
    c.feature_h.push_back(b.x);
    for (const auto& w : p.feature_weights) {
        Matrix h = (w * c.feature_h.back()).cwiseProduct(b.keep) + b.x;
        c.feature_h.push_back(std::move(h));
    }
    c.z = c.feature_h.back() + (b.missing.array().colwise() * p.adaptive_bias.col(0).array()).matrix();

    const auto m = p.heads.size();
    const auto n = b.x.cols();
    c.scores.resize(static_cast<Eigen::Index>(m), n);
    c.head_pre.assign(keep_intermediates ? m : 0, {});
    c.head_act.assign(keep_intermediates ? m : 0, {});
    for (std::size_t i = 0; i < m; ++i) {
        const auto& head = p.heads[i];
        Matrix g = c.z;
        for (std::size_t l = 0; l < head.weights.size(); ++l) {
            Matrix pre = head.weights[l] * g;
            pre.colwise() += head.biases[l].col(0);
            g = pre.cwiseMax(0.0);
            if (keep_intermediates) {
                c.head_pre[i].push_back(std::move(pre));
                c.head_act[i].push_back(g);
            }
        }
        c.scores.row(static_cast<Eigen::Index>(i)).noalias() = head.out.col(0).transpose() * g;
    }
    c.q.resize(static_cast<Eigen::Index>(m), n);
    c.q.row(0) = c.scores.row(0);
    for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(m); ++i)
        c.q.row(i) = c.q.row(i - 1) + c.scores.row(i).cwiseMax(0.0);
}

double mean_pinball(const Matrix& q, const Eigen::RowVectorXd& y, const QuantileLevels& levels) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        for (Eigen::Index i = 0; i < q.rows(); ++i)
            total += pinball(y(c), q(i, c), levels[static_cast<std::size_t>(i)]);
    }
    return total / (static_cast<double>(q.cols()) * static_cast<double>(q.rows()));
}

}  // namespace

Matrix forecast_batch(std::span<const LaggedSample> samples, const AqrParams& params) {
    if (samples.empty()) return Matrix(static_cast<Eigen::Index>(params.levels.size()), 0);
    const auto batch = make_batch(samples, params, false);
    ForwardCache cache;
    run_forward(batch, params, cache, false);
    if (!cache.q.allFinite()) throw std::runtime_error("forecast_batch: non-finite model output");
    return cache.q.cwiseMax(0.0).cwiseMin(1.0);
}

double batch_loss(std::span<const LaggedSample> samples, const AqrParams& params) {
    if (samples.empty()) throw std::invalid_argument("batch_loss: no samples");
    const auto batch = make_batch(samples, params, true);
    ForwardCache cache;
    run_forward(batch, params, cache, false);
    return mean_pinball(cache.q, batch.y, params.levels);
}

LossAndGradient loss_and_gradient(std::span<const LaggedSample> samples, const AqrParams& params) {
    if (samples.empty()) throw std::invalid_argument("loss_gradients: no samples");
    const auto batch = make_batch(samples, params, true);
    ForwardCache cache;
    run_forward(batch, params, cache, true);

    LossAndGradient result;
    result.loss = mean_pinball(cache.q, batch.y, params.levels);
    result.gradient = params.zeros_like();
    auto& grad = result.gradient;

    const auto m = static_cast<Eigen::Index>(params.heads.size());
    const auto n = batch.x.cols();
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(m));

    // dL/dq for every level and sample.
    Matrix dq(m, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const double alpha = params.levels[static_cast<std::size_t>(i)];
            const double e = batch.y(c) - cache.q(i, c);
            dq(i, c) = e > 0.0 ? -alpha * scale : (e < 0.0 ? (1.0 - alpha) * scale : 0.0);
        }
    }

    // q_i = s_0 + sum_{j=1..i} relu(s_j): each score receives the suffix sum of dq.
    Matrix dscore(m, n);
    Eigen::RowVectorXd suffix = Eigen::RowVectorXd::Zero(n);
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        suffix += dq.row(i);
        if (i == 0) {
            dscore.row(i) = suffix;
        } else {
            for (Eigen::Index c = 0; c < n; ++c) dscore(i, c) = cache.scores(i, c) > 0.0 ? suffix(c) : 0.0;
        }
    }

    Matrix dz = Matrix::Zero(batch.x.rows(), n);
    for (std::size_t i = 0; i < params.heads.size(); ++i) {
        const auto& head = params.heads[i];
        auto& ghead = grad.heads[i];
        const auto& acts = cache.head_act[i];
        const auto& pres = cache.head_pre[i];
        const auto layers = head.weights.size();
        const auto drow = dscore.row(static_cast<Eigen::Index>(i));

        ghead.out.col(0).noalias() = acts[layers - 1] * drow.transpose();
        Matrix dact = head.out.col(0) * drow;
        for (std::size_t l = layers; l-- > 0;) {
            Matrix dpre = (pres[l].array() > 0.0).select(dact.array(), 0.0).matrix();
            const Matrix& input = l == 0 ? cache.z : acts[l - 1];
            ghead.weights[l].noalias() = dpre * input.transpose();
            ghead.biases[l].col(0) = dpre.rowwise().sum();
            if (l == 0) {
                dz.noalias() += head.weights[0].transpose() * dpre;
            } else {
                dact.noalias() = head.weights[l].transpose() * dpre;
            }
        }
    }

    grad.adaptive_bias.col(0) = dz.cwiseProduct(batch.missing).rowwise().sum();
    Matrix dh = dz;
    for (std::size_t l = params.feature_weights.size(); l-- > 0;) {
        const Matrix da = dh.cwiseProduct(batch.keep);
        grad.feature_weights[l].noalias() = da * cache.feature_h[l].transpose();
        if (l > 0) dh.noalias() = params.feature_weights[l].transpose() * da;
    }

    for (const auto& t : grad.tensors()) {
        if (!t.data->allFinite()) throw std::runtime_error("loss_gradients: non-finite gradient in " + t.name);
    }
    if (!std::isfinite(result.loss)) throw std::runtime_error("loss_gradients: non-finite loss");
    return result;
}

AqrParams loss_gradients(std::span<const LaggedSample> samples, const AqrParams& params) {
    return loss_and_gradient(samples, params).gradient;
}

}  // namespace aqr
