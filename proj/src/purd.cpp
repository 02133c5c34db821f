#include "rlscape/purd.hpp"

#include <stdexcept>

#include "rlscape/parallel.hpp"

namespace rlscape {

namespace {

EnvState purd_start(const EnvSpec& env, const PurdOptions& opts) {
    if (opts.start) {
        if (static_cast<int>(opts.start->s.size()) != env.state_dim) {
            throw std::invalid_argument("estimate_purd: start state has wrong dimension");
        }
        EnvState st = *opts.start;
        st.t = 0;
        st.terminated = false;
        return st;
    }
    return initial_state(env);  // init box width forced to zero
}

ParamVector draw_update(const Checkpoint& ckpt, const UpdateFamily& fam, std::uint64_t seed,
                        std::size_t index) {
    RngStream rng = RngStream(seed).split("draw", index);
    if (fam.kind == UpdateKind::Td3Minibatch) {
        if (!ckpt.full) {
            throw std::invalid_argument(
                "td3-minibatch sampling requires a checkpoint with full learner state");
        }
        return sample_update(fam, *ckpt.full, rng);
    }
    return sample_update(fam, ckpt.actor, rng);
}

}  // namespace

ReturnSampleSet estimate_purd(const Checkpoint& ckpt, const UpdateFamily& fam,
                              const EnvSpec& env, std::uint64_t seed, const PurdOptions& opts) {
    if (opts.n < 1) throw std::invalid_argument("estimate_purd: n must be >= 1");
    const EnvState start = purd_start(env, opts);

    ReturnSampleSet set;
    set.samples.resize(static_cast<std::size_t>(opts.n));
    set.checkpoint_id = ckpt.id();
    set.family = fam.kind;
    set.seed = seed;
    set.start_state = start.s;
    if (opts.retain_trajectories) {
        set.trajectories.resize(static_cast<std::size_t>(opts.n));
    }

    parallel_for(static_cast<std::size_t>(opts.n), [&](std::size_t i) {
        const ParamVector theta = draw_update(ckpt, fam, seed, i);
        if (opts.retain_trajectories) {
            set.trajectories[i] = rollout_trajectory(env, theta, start);
            set.samples[i] = set.trajectories[i].total_return();
        } else {
            set.samples[i] = rollout_return(env, theta, start);
        }
    });
    return set;
}

Trajectory resimulate_draw(const Checkpoint& ckpt, const UpdateFamily& fam, const EnvSpec& env,
                           std::uint64_t seed, const PurdOptions& opts, std::size_t index) {
    const EnvState start = purd_start(env, opts);
    const ParamVector theta = draw_update(ckpt, fam, seed, index);
    return rollout_trajectory(env, theta, start);
}

std::vector<ScatterRow> scatter_table(const std::vector<Checkpoint>& ckpts,
                                      const UpdateFamily& fam, const EnvSpec& env,
                                      std::uint64_t seed, const PurdOptions& opts,
                                      const StatsParams& stats_params) {
    std::vector<ScatterRow> rows;
    rows.reserve(ckpts.size());
    RngStream root(seed);
    for (std::size_t i = 0; i < ckpts.size(); ++i) {
        const ReturnSampleSet set =
            estimate_purd(ckpts[i], fam, env, root.split("purd", i).seed(), opts);
        ScatterRow row;
        row.checkpoint_id = ckpts[i].id();
        row.step = ckpts[i].step;
        row.stats = compute_stats(set.samples, stats_params, root.split("boot", i));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rlscape
