#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlscape/learner.hpp"
#include "rlscape/rollout.hpp"
#include "rlscape/stats.hpp"

namespace rlscape {

// Empirical post-update return distribution: n independent single updates
// drawn from the family, each followed by one deterministic rollout from a
// fixed start state (the init box is collapsed to its center so every draw
// sees the same start).
struct ReturnSampleSet {
    std::vector<double> samples;  // indexed by draw
    std::string checkpoint_id;
    UpdateKind family = UpdateKind::GaussianPerturbation;
    std::uint64_t seed = 0;
    std::vector<double> start_state;         // the start every rollout used
    std::vector<Trajectory> trajectories;    // filled only when retained
};

struct PurdOptions {
    int n = 1000;
    bool retain_trajectories = false;
    std::optional<EnvState> start;  // overrides the collapsed init box
};

// Draw i uses the stream derived from (seed, "draw", i), so the set is
// reproducible per index and independent of rollout scheduling; rollouts run
// in parallel. Probe rollouts never touch the learner state or its buffer.
ReturnSampleSet estimate_purd(const Checkpoint& ckpt, const UpdateFamily& fam,
                              const EnvSpec& env, std::uint64_t seed,
                              const PurdOptions& opts = {});

// Recomputes the trajectory of one draw of an estimate_purd run that did not
// retain trajectories, from the same (seed, index) streams.
Trajectory resimulate_draw(const Checkpoint& ckpt, const UpdateFamily& fam, const EnvSpec& env,
                           std::uint64_t seed, const PurdOptions& opts, std::size_t index);

struct ScatterRow {
    std::string checkpoint_id;
    std::int64_t step = 0;
    DistStats stats;
};

// One DistStats row per checkpoint, in input order. The bootstrap stream of
// row i derives from (seed, "boot", i).
std::vector<ScatterRow> scatter_table(const std::vector<Checkpoint>& ckpts,
                                      const UpdateFamily& fam, const EnvSpec& env,
                                      std::uint64_t seed, const PurdOptions& opts,
                                      const StatsParams& stats_params);

}  // namespace rlscape
