#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rlscape/learner.hpp"
#include "rlscape/policy.hpp"

namespace rlscape {

// Return evaluated over a 2D parameter slice
//   theta(alpha, beta) = origin + alpha * (end1 - origin) + beta * (end2 - origin)
// on a centered coordinate lattice. Coordinates are built as
// center + (i - mid) * step with step = halfwidth / mid, so for odd
// resolutions the window center is an exact lattice point, and a
// power-of-two zoom factor keeps shared coordinates bit-identical across
// zoom levels. The anchor coordinates are exact: (0,0) evaluates the origin
// vector unchanged and (1,0) / (0,1) evaluate the stored endpoint vectors
// unchanged, bit for bit.
struct LandscapeGrid {
    ParamVector origin, end1, end2;
    std::vector<double> dir1, dir2;  // endk - origin, precomputed
    std::vector<double> alphas;      // row coordinate values
    std::vector<double> betas;       // column coordinate values
    std::vector<double> returns;     // row-major: returns[ai * betas.size() + bi]
    double center_alpha = 0.0, center_beta = 0.0;
    double halfwidth = 0.0;
    bool degenerate_dir1 = false;  // endpoint coincides with the origin
    bool degenerate_dir2 = false;

    double at(std::size_t ai, std::size_t bi) const { return returns[ai * betas.size() + bi]; }
    std::size_t res() const { return alphas.size(); }
};

using ReturnFn = std::function<double(const ParamVector&)>;

// Return of a rollout from the collapsed init box of env; the standard
// evaluator behind map_slice.
ReturnFn env_return_fn(const EnvSpec& env);

// Grid through three parameter vectors over an explicit window; exposed so
// synthetic return surfaces can be mapped in tests. Cells are evaluated in
// parallel.
LandscapeGrid evaluate_slice(const ParamVector& origin, const ParamVector& end1,
                             const ParamVector& end2, int grid_res, double center_alpha,
                             double center_beta, double halfwidth, const ReturnFn& eval);

// Draws the two direction endpoints as independent update samples
// (streams (seed, "dir1") and (seed, "dir2")), then maps the slice over
// [-range, range]^2. Degenerate directions (update equal to the origin) are
// flagged on the grid rather than aborting, since zero-width families are
// legitimate probes.
LandscapeGrid map_slice(const Checkpoint& ckpt, const UpdateFamily& fam, int grid_res,
                        double range, const EnvSpec& env, std::uint64_t seed);

// Re-evaluates the same resolution on a window shrunk by `factor` about its
// center, with the same origin and directions. 0 < factor < 1.
LandscapeGrid zoom(const LandscapeGrid& grid, double factor, const ReturnFn& eval);
LandscapeGrid zoom(const LandscapeGrid& grid, double factor, const EnvSpec& env);

}  // namespace rlscape
