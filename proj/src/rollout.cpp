#include "rlscape/rollout.hpp"

namespace rlscape {

double rollout_return(const EnvSpec& spec, const ParamVector& policy, const EnvState& start) {
    EnvState st = start;
    double total = 0.0;
    while (st.t < spec.horizon && !st.terminated) {
        const std::vector<double> a = mlp_forward(policy, st.s);
        StepResult r = step(spec, st, a);
        total += r.reward;
        st = std::move(r.next);
    }
    return total;
}

Trajectory rollout_trajectory(const EnvSpec& spec, const ParamVector& policy,
                              const EnvState& start) {
    Trajectory traj;
    EnvState st = start;
    traj.states.push_back(st.s);
    while (st.t < spec.horizon && !st.terminated) {
        std::vector<double> a = mlp_forward(policy, st.s);
        StepResult r = step(spec, st, a);
        traj.actions.push_back(std::move(a));
        traj.rewards.push_back(r.reward);
        st = std::move(r.next);
        traj.states.push_back(st.s);
        if (st.terminated) traj.terminated_at = st.t - 1;
    }
    return traj;
}

}  // namespace rlscape
