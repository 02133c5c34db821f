#include "rlscape/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlscape {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::pair<int, int>> MlpShape::layer_dims() const {
    std::vector<std::pair<int, int>> dims;
    int fan_in = input_dim;
    for (int h : hidden) {
        dims.emplace_back(fan_in, h);
        fan_in = h;
    }
    dims.emplace_back(fan_in, output_dim);
    return dims;
}

std::size_t MlpShape::param_count() const {
    std::size_t n = 0;
    for (auto [fan_in, fan_out] : layer_dims()) {
        n += static_cast<std::size_t>(fan_in) * fan_out + fan_out;
    }
    return n;
}

ParamVector init_params(const MlpShape& shape, RngStream rng) {
    require(shape.input_dim > 0 && shape.output_dim > 0, "init_params: shape has empty layers");
    ParamVector p;
    p.shape = shape;
    p.values.reserve(shape.param_count());
    for (auto [fan_in, fan_out] : shape.layer_dims()) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        const std::size_t layer_params = static_cast<std::size_t>(fan_in) * fan_out + fan_out;
        for (std::size_t i = 0; i < layer_params; ++i) {
            p.values.push_back(rng.uniform(-bound, bound));
        }
    }
    return p;
}

namespace {

// Shared core of the plain and cached forward passes.
std::vector<double> forward_impl(const ParamVector& params, std::span<const double> input,
                                 MlpActivations* cache) {
    const MlpShape& shape = params.shape;
    require(static_cast<int>(input.size()) == shape.input_dim,
            "mlp_forward: input size does not match shape");
    require(params.values.size() == shape.param_count(),
            "mlp_forward: parameter count does not match shape");
    require(all_finite(input), "mlp_forward: non-finite input");

    if (cache) {
        cache->input.assign(input.begin(), input.end());
        cache->pre.clear();
        cache->post.clear();
    }

    const auto dims = shape.layer_dims();
    std::vector<double> x(input.begin(), input.end());
    std::size_t offset = 0;
    for (std::size_t layer = 0; layer < dims.size(); ++layer) {
        const auto [fan_in, fan_out] = dims[layer];
        const double* w = params.values.data() + offset;
        const double* b = w + static_cast<std::size_t>(fan_in) * fan_out;
        std::vector<double> z(static_cast<std::size_t>(fan_out));
        for (int j = 0; j < fan_out; ++j) {
            double acc = b[j];
            const double* row = w + static_cast<std::size_t>(j) * fan_in;
            for (int i = 0; i < fan_in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(j)] = acc;
        }
        offset += static_cast<std::size_t>(fan_in) * fan_out + fan_out;

        const bool last = layer + 1 == dims.size();
        std::vector<double> a(z.size());
        if (!last) {
            for (std::size_t j = 0; j < z.size(); ++j) a[j] = z[j] > 0.0 ? z[j] : 0.0;
        } else if (shape.output == OutputKind::TanhScaled) {
            for (std::size_t j = 0; j < z.size(); ++j) a[j] = shape.output_scale * std::tanh(z[j]);
        } else {
            a = z;
        }
        if (cache) {
            cache->pre.push_back(z);
            cache->post.push_back(a);
        }
        x = std::move(a);
    }
    return x;
}

}  // namespace

std::vector<double> mlp_forward(const ParamVector& params, std::span<const double> input) {
    return forward_impl(params, input, nullptr);
}

std::vector<double> mlp_forward_cached(const ParamVector& params, std::span<const double> input,
                                       MlpActivations& cache) {
    return forward_impl(params, input, &cache);
}

void mlp_backward(const ParamVector& params, const MlpActivations& cache,
                  std::span<const double> dout, std::vector<double>& param_grad,
                  std::vector<double>* input_grad) {
    const MlpShape& shape = params.shape;
    const auto dims = shape.layer_dims();
    require(param_grad.size() == params.values.size(),
            "mlp_backward: gradient buffer size mismatch");
    require(dout.size() == static_cast<std::size_t>(shape.output_dim),
            "mlp_backward: output gradient size mismatch");
    require(cache.pre.size() == dims.size(), "mlp_backward: cache does not match shape");

    // Offsets of each layer's parameter block.
    std::vector<std::size_t> offsets(dims.size());
    std::size_t off = 0;
    for (std::size_t layer = 0; layer < dims.size(); ++layer) {
        offsets[layer] = off;
        off += static_cast<std::size_t>(dims[layer].first) * dims[layer].second +
               dims[layer].second;
    }

    // dL/dz of the layer currently being processed.
    std::vector<double> dz(dout.begin(), dout.end());
    const std::size_t last = dims.size() - 1;
    if (shape.output == OutputKind::TanhScaled) {
        for (std::size_t j = 0; j < dz.size(); ++j) {
            const double t = std::tanh(cache.pre[last][j]);
            dz[j] *= shape.output_scale * (1.0 - t * t);
        }
    }

    for (std::size_t layer = dims.size(); layer-- > 0;) {
        const auto [fan_in, fan_out] = dims[layer];
        const double* w = params.values.data() + offsets[layer];
        double* gw = param_grad.data() + offsets[layer];
        double* gb = gw + static_cast<std::size_t>(fan_in) * fan_out;
        const std::vector<double>& x =
            layer == 0 ? cache.input : cache.post[layer - 1];

        std::vector<double> dx(static_cast<std::size_t>(fan_in), 0.0);
        for (int j = 0; j < fan_out; ++j) {
            const double d = dz[static_cast<std::size_t>(j)];
            gb[j] += d;
            double* grow = gw + static_cast<std::size_t>(j) * fan_in;
            const double* wrow = w + static_cast<std::size_t>(j) * fan_in;
            for (int i = 0; i < fan_in; ++i) {
                grow[i] += d * x[static_cast<std::size_t>(i)];
                dx[static_cast<std::size_t>(i)] += d * wrow[i];
            }
        }

        if (layer == 0) {
            if (input_grad) {
                for (std::size_t i = 0; i < dx.size(); ++i) (*input_grad)[i] += dx[i];
            }
            break;
        }
        // Through the ReLU of the layer below.
        const std::vector<double>& below_pre = cache.pre[layer - 1];
        for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] = below_pre[i] > 0.0 ? dx[i] : 0.0;
        }
        dz = std::move(dx);
    }
}

ParamVector lerp(const ParamVector& p1, const ParamVector& p2, double alpha) {
    require(p1.same_shape(p2) && p1.size() == p2.size(), "lerp: shape mismatch");
    require(std::isfinite(alpha), "lerp: non-finite alpha");
    if (alpha == 1.0) return p1;
    if (alpha == 0.0) return p2;
    ParamVector out;
    out.shape = p1.shape;
    out.values.resize(p1.size());
    const double beta = 1.0 - alpha;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        out.values[i] = alpha * p1.values[i] + beta * p2.values[i];
    }
    return out;
}

ParamVector perturb(const ParamVector& theta, double sigma, RngStream rng) {
    require(std::isfinite(sigma) && sigma >= 0.0, "perturb: sigma must be finite and >= 0");
    if (sigma == 0.0) return theta;  // exact copy, no stream consumption
    ParamVector out = theta;
    for (double& v : out.values) v += sigma * rng.normal();
    return out;
}

double l2_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double l2_distance(const ParamVector& a, const ParamVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("l2_distance: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace rlscape
