#pragma once

#include <span>
#include <string>
#include <vector>

#include "rlscape/rng.hpp"

namespace rlscape {

enum class EnvKind { CorridorWalk, StickyRidge, PendulumBalance };

// Deterministic, fixed-horizon environment description. Dynamics are pure
// functions of (state, action); the only stochasticity is the uniform-box
// draw of the initial state. All per-step rewards lie in
// [reward_min, reward_max], so episode returns are bounded by
// horizon * reward_min (or 0 for terminating nonnegative-reward tasks) and
// horizon * reward_max. The dynamics constants for the built-in tasks are
// listed in README.md.
struct EnvSpec {
    std::string name;
    EnvKind kind = EnvKind::CorridorWalk;
    int state_dim = 0;
    int action_dim = 0;
    int horizon = 200;
    std::vector<double> init_ref;        // box center s_I
    std::vector<double> init_halfwidth;  // box halfwidth, elementwise
    double action_bound = 1.0;
    double reward_min = 0.0;
    double reward_max = 0.0;

    // Greatest lower bound on episode returns, used by left-tail statistics.
    double return_lower_bound() const;
};

struct EnvState {
    std::vector<double> s;
    int t = 0;
    bool terminated = false;
};

struct StepResult {
    EnvState next;
    double reward = 0.0;
    bool done = false;  // terminated || t == horizon
};

// Initial state drawn uniformly from the init box. A zero halfwidth yields
// exactly init_ref (no stream consumption ambiguity: one draw per coordinate
// regardless).
EnvState reset(const EnvSpec& spec, RngStream rng);

// Initial state with the box width forced to zero: exactly init_ref.
EnvState initial_state(const EnvSpec& spec);

// Wraps an arbitrary state vector as a fresh cursor (t = 0, not terminated),
// e.g. to start rollouts from logged replay states.
EnvState state_at(const EnvSpec& spec, std::vector<double> s);

// One transition. Actions are clipped to [-action_bound, action_bound]
// componentwise before the dynamics are applied. Stepping a terminated state
// yields zero reward and leaves s unchanged (absorbing); stepping past the
// horizon (t == horizon) is a contract violation and throws
// std::logic_error. Non-finite actions throw std::invalid_argument.
StepResult step(const EnvSpec& spec, const EnvState& state, std::span<const double> action);

const std::vector<EnvSpec>& builtin_envs();
const EnvSpec& env_by_name(const std::string& name);  // throws std::invalid_argument

}  // namespace rlscape
