#include "rlscape/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlscape {

namespace {

constexpr int kHorizon = 200;
constexpr double kDt = 0.05;

// corridor-walk: planar point mass (x, y, vx, vy), actions (ax, ay).
// Reward pays forward velocity minus a small control cost, shifted to be
// nonnegative; leaving the corridor (|y| > 1) terminates the episode.
constexpr double kCorridorAccel = 2.0;
constexpr double kCorridorVmax = 2.0;
constexpr double kCorridorCtrlCost = 0.01;
constexpr double kCorridorShift = kCorridorVmax + 2.0 * kCorridorCtrlCost;  // 2.02
constexpr double kCorridorHalfWidth = 1.0;

// sticky-ridge: car on a line (x, v), scalar action. Reward is the velocity
// minus a tiny control cost. Inside the pit interval, low speed triggers
// heavy multiplicative damping with reduced control authority: a
// quasi-absorbing low-reward regime that full throttle can escape slowly.
constexpr double kRidgeAccel = 2.0;
constexpr double kRidgeDrag = 0.1;
constexpr double kRidgeVmax = 2.0;
constexpr double kRidgeCtrlCost = 0.001;
constexpr double kPitLo = 0.0;
constexpr double kPitHi = 0.5;
constexpr double kPitSpeedThresh = 0.1;
constexpr double kPitDamp = 0.15;
constexpr double kPitAccel = 2.0;

// pendulum-balance: inverted pendulum (theta, omega) with theta measured
// from upright; scalar torque action. Smooth, never terminates; the maximum
// per-step reward sits exactly at the upright equilibrium with zero action.
constexpr double kPendGravity = 10.0;
constexpr double kPendTorque = 15.0;
constexpr double kPendDamp = 0.5;
constexpr double kPendOmegaMax = 10.0;
constexpr double kPendActionBonus = 0.05;
// Attenuates the balance reward by angular speed: spinning through upright
// at the omega cap collects ~1/11 of the standing reward, so the only
// near-maximal behavior is holding the pendulum up, slowly.
constexpr double kPendSpinPenalty = 0.1;

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

struct Dynamics {
    std::vector<double> s;
    double reward = 0.0;
    bool terminated = false;
};

Dynamics corridor_step(std::span<const double> s, std::span<const double> a) {
    const double vx = clamp(s[2] + kDt * kCorridorAccel * a[0], -kCorridorVmax, kCorridorVmax);
    const double vy = clamp(s[3] + kDt * kCorridorAccel * a[1], -kCorridorVmax, kCorridorVmax);
    const double x = s[0] + kDt * vx;
    const double y = s[1] + kDt * vy;
    Dynamics d;
    d.s = {x, y, vx, vy};
    d.reward = vx - kCorridorCtrlCost * (a[0] * a[0] + a[1] * a[1]) + kCorridorShift;
    d.terminated = std::abs(y) > kCorridorHalfWidth;
    return d;
}

Dynamics ridge_step(std::span<const double> s, std::span<const double> a) {
    const double x0 = s[0];
    const double v0 = s[1];
    const bool in_pit = x0 >= kPitLo && x0 <= kPitHi;
    double v;
    if (in_pit && std::abs(v0) < kPitSpeedThresh) {
        v = kPitDamp * v0 + kDt * kPitAccel * a[0];
    } else {
        v = v0 + kDt * (kRidgeAccel * a[0] - kRidgeDrag * v0);
    }
    v = clamp(v, -kRidgeVmax, kRidgeVmax);
    const double x = x0 + kDt * v;
    Dynamics d;
    d.s = {x, v};
    d.reward = v - kRidgeCtrlCost * a[0] * a[0];
    d.terminated = false;
    return d;
}

Dynamics pendulum_step(std::span<const double> s, std::span<const double> a) {
    const double th0 = s[0];
    const double om0 = s[1];
    const double om = clamp(
        om0 + kDt * (kPendGravity * std::sin(th0) + kPendTorque * a[0] - kPendDamp * om0),
        -kPendOmegaMax, kPendOmegaMax);
    const double th = th0 + kDt * om;
    Dynamics d;
    d.s = {th, om};
    d.reward = 0.5 * (1.0 + std::cos(th)) / (1.0 + kPendSpinPenalty * om * om) +
               kPendActionBonus * (1.0 - a[0] * a[0]);
    d.terminated = false;
    return d;
}

std::vector<EnvSpec> make_builtins() {
    std::vector<EnvSpec> envs;

    EnvSpec corridor;
    corridor.name = "corridor-walk";
    corridor.kind = EnvKind::CorridorWalk;
    corridor.state_dim = 4;
    corridor.action_dim = 2;
    corridor.horizon = kHorizon;
    corridor.init_ref = {0.0, 0.0, 0.0, 0.0};
    corridor.init_halfwidth = {0.05, 0.05, 0.01, 0.01};
    corridor.action_bound = 1.0;
    corridor.reward_min = 0.0;  // -vmax - cost + shift
    corridor.reward_max = kCorridorVmax + kCorridorShift;
    envs.push_back(corridor);

    EnvSpec ridge;
    ridge.name = "sticky-ridge";
    ridge.kind = EnvKind::StickyRidge;
    ridge.state_dim = 2;
    ridge.action_dim = 1;
    ridge.horizon = kHorizon;
    ridge.init_ref = {-1.0, 0.5};
    ridge.init_halfwidth = {0.02, 0.01};
    ridge.action_bound = 1.0;
    ridge.reward_min = -kRidgeVmax - kRidgeCtrlCost;
    ridge.reward_max = kRidgeVmax;
    envs.push_back(ridge);

    EnvSpec pendulum;
    pendulum.name = "pendulum-balance";
    pendulum.kind = EnvKind::PendulumBalance;
    pendulum.state_dim = 2;
    pendulum.action_dim = 1;
    pendulum.horizon = kHorizon;
    pendulum.init_ref = {0.6, 0.0};
    pendulum.init_halfwidth = {0.05, 0.05};
    pendulum.action_bound = 1.0;
    pendulum.reward_min = 0.0;
    pendulum.reward_max = 1.0 + kPendActionBonus;
    envs.push_back(pendulum);

    return envs;
}

}  // namespace

double EnvSpec::return_lower_bound() const {
    return std::min(0.0, static_cast<double>(horizon) * reward_min);
}

EnvState reset(const EnvSpec& spec, RngStream rng) {
    EnvState st;
    st.s.resize(static_cast<std::size_t>(spec.state_dim));
    for (int i = 0; i < spec.state_dim; ++i) {
        const double c = spec.init_ref[static_cast<std::size_t>(i)];
        const double h = spec.init_halfwidth[static_cast<std::size_t>(i)];
        st.s[static_cast<std::size_t>(i)] = rng.uniform(c - h, c + h);
    }
    st.t = 0;
    st.terminated = false;
    return st;
}

EnvState initial_state(const EnvSpec& spec) {
    EnvState st;
    st.s = spec.init_ref;
    st.t = 0;
    st.terminated = false;
    return st;
}

EnvState state_at(const EnvSpec& spec, std::vector<double> s) {
    if (static_cast<int>(s.size()) != spec.state_dim) {
        throw std::invalid_argument("state_at: state size does not match env");
    }
    EnvState st;
    st.s = std::move(s);
    st.t = 0;
    st.terminated = false;
    return st;
}

StepResult step(const EnvSpec& spec, const EnvState& state, std::span<const double> action) {
    if (state.t >= spec.horizon) {
        throw std::logic_error("step: episode already at horizon for env " + spec.name);
    }
    if (static_cast<int>(action.size()) != spec.action_dim) {
        throw std::invalid_argument("step: action size does not match env " + spec.name);
    }
    for (double a : action) {
        if (!std::isfinite(a)) throw std::invalid_argument("step: non-finite action");
    }

    StepResult out;
    if (state.terminated) {  // absorbing: zero reward, state frozen
        out.next = state;
        out.next.t = state.t + 1;
        out.reward = 0.0;
        out.done = true;
        return out;
    }

    std::vector<double> clipped(action.begin(), action.end());
    for (double& a : clipped) a = clamp(a, -spec.action_bound, spec.action_bound);

    Dynamics d;
    switch (spec.kind) {
        case EnvKind::CorridorWalk:
            d = corridor_step(state.s, clipped);
            break;
        case EnvKind::StickyRidge:
            d = ridge_step(state.s, clipped);
            break;
        case EnvKind::PendulumBalance:
            d = pendulum_step(state.s, clipped);
            break;
    }

    out.next.s = std::move(d.s);
    out.next.t = state.t + 1;
    out.next.terminated = d.terminated;
    out.reward = d.reward;
    out.done = d.terminated || out.next.t >= spec.horizon;
    return out;
}

const std::vector<EnvSpec>& builtin_envs() {
    static const std::vector<EnvSpec> envs = make_builtins();
    return envs;
}

const EnvSpec& env_by_name(const std::string& name) {
    for (const EnvSpec& e : builtin_envs()) {
        if (e.name == name) return e;
    }
    throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace rlscape
