#pragma once

#include "aqr/data_pipeline.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Strictly increasing quantile levels inside (0, 1).
class QuantileLevels {
public:
    QuantileLevels() = default;
    explicit QuantileLevels(std::vector<double> levels);

    /// 0.05, 0.10, ..., 0.95 (19 levels), each computed as i / 20.
    static QuantileLevels standard();

    std::size_t size() const { return levels_.size(); }
    double operator[](std::size_t i) const { return levels_[i]; }
    const std::vector<double>& values() const { return levels_; }

    /// Index of the level equal to `alpha` within 1e-9, or -1.
    int find(double alpha) const;

    friend bool operator==(const QuantileLevels&, const QuantileLevels&) = default;

private:
    std::vector<double> levels_;
};

struct QuantileForecast {
    std::vector<double> levels;
    std::vector<double> values;

    bool non_crossing() const;
};

struct NetworkShape {
    int inputs = 6;          // d, equal to the lag count h
    int hidden = 64;         // u
    int feature_layers = 3;  // L1
    int head_layers = 2;     // L2

    void validate() const;
    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Per-level MLP: weights[0] is hidden x inputs, the rest hidden x hidden.
/// Biases and the output coefficient vector are stored as single columns.
struct HeadParams {
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;
    Matrix out;
};

/// Named view of one parameter tensor.
template <typename M>
struct TensorRef {
    std::string name;
    M* data;
};

struct AqrParams {
    NetworkShape shape;
    QuantileLevels levels;
    int lead = 1;
    std::uint64_t seed = 0;

    std::vector<Matrix> feature_weights;  // L1 square d x d matrices
    Matrix adaptive_bias;                 // d x 1, enters as bias (.) mask
    std::vector<HeadParams> heads;        // one per level

    /// All tensors zero.
    static AqrParams zeros(const NetworkShape& shape, const QuantileLevels& levels, int lead);

    /// Uniform on (-1/sqrt(fan_in), 1/sqrt(fan_in)) for every tensor.
    static AqrParams initialize(const NetworkShape& shape, const QuantileLevels& levels, int lead,
                                std::uint64_t seed);

    AqrParams zeros_like() const;

    /// Tensors in the fixed persistence order: feature.W0..W{L1-1},
    /// feature.bias, then for each level i: head{i}.W{l}, head{i}.b{l} for
    /// l = 0..L2-1, and head{i}.out.
    std::vector<TensorRef<Matrix>> tensors();
    std::vector<TensorRef<const Matrix>> tensors() const;

    std::size_t parameter_count() const;

    /// Checks tensor shapes against `shape`/`levels` and that every entry is finite.
    void validate() const;
};

/// x (.) (1 - m) with NA entries replaced by zero. Entries flagged missing are
/// ignored whatever they hold; an NA entry whose mask bit is 0 is rejected.
Vector zero_fill(std::span<const double> features, const Mask& mask);

/// Masked linear skip-connection stack plus the mask-dependent bias:
///   h0 = zero_fill(x, m); h_l = (W_l h_{l-1}) (.) (1 - m) + h0;
///   z = h_{L1} + b (.) m.
Vector feature_block(std::span<const double> features, const Mask& mask, const AqrParams& params);

/// Non-crossing head on latent features z. The base level is unconstrained,
/// each later level adds relu(w_i' h_i) to the previous one.
QuantileForecast quantile_head(const Vector& z, const AqrParams& params);

/// Unclipped model output for one input.
QuantileForecast predict_unclipped(std::span<const double> features, const Mask& mask, const AqrParams& params);

/// Forecast for one sample with values clipped to [0, 1].
QuantileForecast forward(const LaggedSample& sample, const AqrParams& params);

/// Batched forecasts, one column per sample (levels x n), clipped to [0, 1].
Matrix forecast_batch(std::span<const LaggedSample> samples, const AqrParams& params);

double pinball(double y, double q, double alpha);

/// Mean pinball loss over samples and levels, on unclipped outputs.
double batch_loss(std::span<const LaggedSample> samples, const AqrParams& params);

struct LossAndGradient {
    double loss = 0.0;
    AqrParams gradient;
};

/// Loss and its exact gradient by reverse accumulation. Derivatives of relu
/// and pinball are taken as 0 at their kinks.
LossAndGradient loss_and_gradient(std::span<const LaggedSample> samples, const AqrParams& params);

AqrParams loss_gradients(std::span<const LaggedSample> samples, const AqrParams& params);

}  // namespace aqr
