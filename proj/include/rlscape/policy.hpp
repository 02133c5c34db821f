#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rlscape/rng.hpp"

namespace rlscape {

enum class OutputKind {
    TanhScaled,  // y = output_scale * tanh(z); used by deterministic policies
    Linear,      // y = z; used by value networks
};

// Fully connected network architecture: input -> hidden... (ReLU) -> output.
struct MlpShape {
    int input_dim = 0;
    int output_dim = 0;
    std::vector<int> hidden;
    OutputKind output = OutputKind::TanhScaled;
    double output_scale = 1.0;

    // (fan_in, fan_out) per affine layer, input to output order.
    std::vector<std::pair<int, int>> layer_dims() const;
    std::size_t param_count() const;
    bool operator==(const MlpShape&) const = default;
};

// Flat parameter vector tied to a shape.
//
// Layout is layer-major: for each affine layer, weights first (row-major,
// W[out][in] at offset + out*fan_in + in), then biases. Pre-activations are
// computed as z[out] = b[out] + sum_in W[out][in] * x[in] with the sum
// accumulated in ascending input index, so results are reproducible
// bit-for-bit on any machine with the same FP evaluation order.
struct ParamVector {
    std::vector<double> values;
    MlpShape shape;

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    bool same_shape(const ParamVector& other) const { return shape == other.shape; }
};

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, weights then
// biases, drawn in flat-layout order from the given stream.
ParamVector init_params(const MlpShape& shape, RngStream rng);

// Forward pass; throws std::invalid_argument on dimension mismatch or
// non-finite input.
std::vector<double> mlp_forward(const ParamVector& params, std::span<const double> input);

// Per-layer activations retained for backprop.
struct MlpActivations {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;   // z per layer
    std::vector<std::vector<double>> post;  // activation per layer (last = output)
};

std::vector<double> mlp_forward_cached(const ParamVector& params, std::span<const double> input,
                                       MlpActivations& cache);

// Backpropagates dL/doutput through the cached pass. Parameter gradients are
// *accumulated* into param_grad (size must equal params.size()); if
// input_grad is non-null, dL/dinput is accumulated into it as well.
void mlp_backward(const ParamVector& params, const MlpActivations& cache,
                  std::span<const double> dout, std::vector<double>& param_grad,
                  std::vector<double>* input_grad = nullptr);

// alpha * p1 + (1 - alpha) * p2, elementwise. Exact at the endpoints:
// alpha == 1 returns p1 unchanged and alpha == 0 returns p2 unchanged,
// bit for bit. Shapes must match.
ParamVector lerp(const ParamVector& p1, const ParamVector& p2, double alpha);

// theta + sigma * eps with eps ~ N(0, I), one draw per coordinate in flat
// order. sigma must be >= 0 and finite.
ParamVector perturb(const ParamVector& theta, double sigma, RngStream rng);

double l2_norm(std::span<const double> v);
double l2_distance(const ParamVector& a, const ParamVector& b);

}  // namespace rlscape
