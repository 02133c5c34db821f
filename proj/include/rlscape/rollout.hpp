#pragma once

#include <optional>
#include <vector>

#include "rlscape/env.hpp"
#include "rlscape/policy.hpp"

namespace rlscape {

// Recorded episode. states holds s_0..s_k (one more entry than actions and
// rewards); terminated_at is the index of the step on which the environment
// terminated, if it did (the episode then has terminated_at + 1 rewards).
struct Trajectory {
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> actions;
    std::vector<double> rewards;
    std::optional<int> terminated_at;

    double total_return() const {
        double acc = 0.0;
        for (double r : rewards) acc += r;
        return acc;
    }
    std::size_t length() const { return rewards.size(); }
};

// Deterministic episode return of the policy from the given start state.
// The policy's action is the network forward pass; no exploration noise.
double rollout_return(const EnvSpec& spec, const ParamVector& policy, const EnvState& start);

Trajectory rollout_trajectory(const EnvSpec& spec, const ParamVector& policy,
                              const EnvState& start);

}  // namespace rlscape
