#include "rlscape/landscape.hpp"

#include <cmath>
#include <stdexcept>

#include "rlscape/parallel.hpp"
#include "rlscape/rollout.hpp"

namespace rlscape {

namespace {

std::vector<double> centered_lattice(double center, double halfwidth, int res) {
    if (res < 2) throw std::invalid_argument("landscape: grid resolution must be >= 2");
    std::vector<double> coords(static_cast<std::size_t>(res));
    const double mid = static_cast<double>(res - 1) / 2.0;
    const double step = halfwidth / mid;
    for (int i = 0; i < res; ++i) {
        coords[static_cast<std::size_t>(i)] = center + (static_cast<double>(i) - mid) * step;
    }
    return coords;
}

ParamVector slice_point(const LandscapeGrid& g, double a, double b) {
    // Exact lattice anchors: the three vectors that define the slice.
    if (a == 0.0 && b == 0.0) return g.origin;
    if (a == 1.0 && b == 0.0) return g.end1;
    if (a == 0.0 && b == 1.0) return g.end2;
    ParamVector p = g.origin;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.values[i] += a * g.dir1[i] + b * g.dir2[i];
    }
    return p;
}

void fill_returns(LandscapeGrid& g, const ReturnFn& eval) {
    const std::size_t na = g.alphas.size();
    const std::size_t nb = g.betas.size();
    g.returns.assign(na * nb, 0.0);
    parallel_for(na * nb, [&](std::size_t cell) {
        const std::size_t ai = cell / nb;
        const std::size_t bi = cell % nb;
        g.returns[cell] = eval(slice_point(g, g.alphas[ai], g.betas[bi]));
    });
}

}  // namespace

ReturnFn env_return_fn(const EnvSpec& env) {
    const EnvState start = initial_state(env);
    return [env, start](const ParamVector& theta) {
        return rollout_return(env, theta, start);
    };
}

LandscapeGrid evaluate_slice(const ParamVector& origin, const ParamVector& end1,
                             const ParamVector& end2, int grid_res, double center_alpha,
                             double center_beta, double halfwidth, const ReturnFn& eval) {
    if (!(halfwidth > 0.0)) throw std::invalid_argument("landscape: halfwidth must be > 0");
    if (!origin.same_shape(end1) || !origin.same_shape(end2)) {
        throw std::invalid_argument("landscape: endpoint shapes do not match the origin");
    }
    LandscapeGrid g;
    g.origin = origin;
    g.end1 = end1;
    g.end2 = end2;
    g.dir1.resize(origin.size());
    g.dir2.resize(origin.size());
    for (std::size_t i = 0; i < origin.size(); ++i) {
        g.dir1[i] = end1.values[i] - origin.values[i];
        g.dir2[i] = end2.values[i] - origin.values[i];
    }
    g.center_alpha = center_alpha;
    g.center_beta = center_beta;
    g.halfwidth = halfwidth;
    g.alphas = centered_lattice(center_alpha, halfwidth, grid_res);
    g.betas = centered_lattice(center_beta, halfwidth, grid_res);
    g.degenerate_dir1 = l2_norm(g.dir1) == 0.0;
    g.degenerate_dir2 = l2_norm(g.dir2) == 0.0;
    fill_returns(g, eval);
    return g;
}

LandscapeGrid map_slice(const Checkpoint& ckpt, const UpdateFamily& fam, int grid_res,
                        double range, const EnvSpec& env, std::uint64_t seed) {
    if (!(range > 0.0)) throw std::invalid_argument("map_slice: range must be > 0");
    RngStream root(seed);
    const auto endpoint = [&](std::string_view label) {
        RngStream rng = root.split(label);
        if (fam.kind == UpdateKind::Td3Minibatch) {
            if (!ckpt.full) {
                throw std::invalid_argument(
                    "td3-minibatch directions require a checkpoint with full learner state");
            }
            return sample_update(fam, *ckpt.full, rng);
        }
        return sample_update(fam, ckpt.actor, rng);
    };
    return evaluate_slice(ckpt.actor, endpoint("dir1"), endpoint("dir2"), grid_res, 0.0, 0.0,
                          range, env_return_fn(env));
}

LandscapeGrid zoom(const LandscapeGrid& grid, double factor, const ReturnFn& eval) {
    if (!(factor > 0.0) || !(factor < 1.0)) {
        throw std::invalid_argument("zoom: factor must be in (0, 1)");
    }
    return evaluate_slice(grid.origin, grid.end1, grid.end2, static_cast<int>(grid.res()),
                          grid.center_alpha, grid.center_beta, grid.halfwidth * factor, eval);
}

LandscapeGrid zoom(const LandscapeGrid& grid, double factor, const EnvSpec& env) {
    return zoom(grid, factor, env_return_fn(env));
}

}  // namespace rlscape
