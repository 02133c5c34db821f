#include "rlscape/learner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace rlscape {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

MlpShape actor_shape_for(const EnvSpec& env, const Td3Config& cfg) {
    MlpShape s;
    s.input_dim = env.state_dim;
    s.output_dim = env.action_dim;
    s.hidden.assign(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_units);
    s.output = OutputKind::TanhScaled;
    s.output_scale = env.action_bound;
    return s;
}

MlpShape critic_shape_for(const EnvSpec& env, const Td3Config& cfg) {
    MlpShape s;
    s.input_dim = env.state_dim + env.action_dim;
    s.output_dim = 1;
    s.hidden.assign(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_units);
    s.output = OutputKind::Linear;
    s.output_scale = 1.0;
    return s;
}

void ema_towards(ParamVector& target, const ParamVector& online, double tau) {
    for (std::size_t i = 0; i < target.size(); ++i) {
        target.values[i] = tau * target.values[i] + (1.0 - tau) * online.values[i];
    }
}

void check_finite_loss(double loss, const char* which, const Td3State& state) {
    if (std::isfinite(loss)) return;
    auto dump = std::make_shared<Td3State>(state);
    throw TrainingDiverged(std::string("training diverged: non-finite ") + which +
                               " loss at step " + std::to_string(state.interaction_count),
                           std::move(dump));
}

// One actor gradient accumulation over a minibatch: the mean of
// -Q1(s, pi(s)) with the critic held fixed. Returns the loss; grad must be
// zero-initialized to params size.
double actor_loss_and_grad(const ParamVector& actor, const ParamVector& critic,
                           const ReplayBuffer& buffer, const std::vector<std::size_t>& batch,
                           std::vector<double>& grad) {
    const double scale = 1.0 / static_cast<double>(batch.size());
    const int action_dim = actor.shape.output_dim;
    double loss = 0.0;
    MlpActivations actor_cache, critic_cache;
    for (std::size_t idx : batch) {
        const Transition& tr = buffer.at_logical(idx);
        const std::vector<double> a = mlp_forward_cached(actor, tr.s, actor_cache);
        const std::vector<double> in = concat(tr.s, a);
        const std::vector<double> q = mlp_forward_cached(critic, in, critic_cache);
        loss += -q[0] * scale;

        // dL/d(critic input), then the action block feeds the actor.
        std::vector<double> din(in.size(), 0.0);
        std::vector<double> critic_grad_unused(critic.size(), 0.0);
        const double dq[1] = {-scale};
        mlp_backward(critic, critic_cache, dq, critic_grad_unused, &din);
        std::vector<double> da(din.end() - action_dim, din.end());
        mlp_backward(actor, actor_cache, da, grad);
    }
    return loss;
}

}  // namespace

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& opt,
               const AdamParams& hp) {
    if (params.size() != grad.size() || params.size() != opt.m.size()) {
        throw std::invalid_argument("adam_step: size mismatch");
    }
    opt.t += 1;
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(opt.t));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(opt.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        opt.m[i] = hp.beta1 * opt.m[i] + (1.0 - hp.beta1) * grad[i];
        opt.v[i] = hp.beta2 * opt.v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
        const double mhat = opt.m[i] / bc1;
        const double vhat = opt.v[i] / bc2;
        params[i] -= hp.lr * mhat / (std::sqrt(vhat) + hp.eps);
    }
}

std::vector<std::int64_t> checkpoint_steps(std::int64_t total_steps, int n_checkpoints) {
    if (total_steps <= 0 || n_checkpoints <= 0) {
        throw std::invalid_argument("checkpoint_steps: positive counts required");
    }
    std::vector<std::int64_t> steps;
    steps.reserve(static_cast<std::size_t>(n_checkpoints));
    for (int k = 0; k < n_checkpoints; ++k) {
        steps.push_back(total_steps * (2 * k + 1) / (2 * n_checkpoints));
    }
    return steps;
}

Td3State td3_init(const EnvSpec& env, const Td3Config& config, std::uint64_t seed) {
    Td3State st;
    st.env = env;
    st.config = config;
    st.run_seed = seed;

    const MlpShape actor_shape = actor_shape_for(env, config);
    const MlpShape critic_shape = critic_shape_for(env, config);
    RngStream root(seed);
    st.actor = init_params(actor_shape, root.split("init-actor"));
    st.critic1 = init_params(critic_shape, root.split("init-critic1"));
    st.critic2 = init_params(critic_shape, root.split("init-critic2"));
    st.target_actor = st.actor;
    st.target_critic1 = st.critic1;
    st.target_critic2 = st.critic2;
    st.actor_opt = AdamState::zeros(st.actor.size());
    st.critic1_opt = AdamState::zeros(st.critic1.size());
    st.critic2_opt = AdamState::zeros(st.critic2.size());
    st.buffer = ReplayBuffer(config.buffer_capacity);

    st.cursor = reset(env, root.split("reset", 0));
    st.episode_count = 1;
    return st;
}

void td3_iterate(Td3State& st) {
    const EnvSpec& env = st.env;
    const Td3Config& cfg = st.config;
    RngStream root(st.run_seed);
    const std::uint64_t t = static_cast<std::uint64_t>(st.interaction_count);

    // --- act ---
    std::vector<double> action(static_cast<std::size_t>(env.action_dim));
    if (st.interaction_count < cfg.warmup_steps) {
        RngStream rng = root.split("warmup-action", t);
        for (double& a : action) a = rng.uniform(-env.action_bound, env.action_bound);
    } else {
        action = mlp_forward(st.actor, st.cursor.s);
        RngStream rng = root.split("explore", t);
        for (double& a : action) {
            a = clamp(a + cfg.exploration_noise * rng.normal(), -env.action_bound,
                      env.action_bound);
        }
    }

    StepResult res = step(env, st.cursor, action);
    st.buffer.push(Transition{st.cursor.s, action, res.reward, res.next.s,
                              res.next.terminated});
    st.cursor = std::move(res.next);
    st.interaction_count += 1;
    if (res.done) {
        st.cursor = reset(env, root.split("reset", static_cast<std::uint64_t>(st.episode_count)));
        st.episode_count += 1;
    }

    // --- learn ---
    if (st.interaction_count <= cfg.warmup_steps ||
        st.buffer.size() < static_cast<std::size_t>(cfg.batch_size)) {
        return;
    }

    const std::uint64_t u = static_cast<std::uint64_t>(st.update_count);
    const auto salted = [&](std::string_view label) {
        std::uint64_t s = derive_seed(st.run_seed, label, u);
        if (st.stream_salt != 0) s = mix64(s ^ st.stream_salt);
        return RngStream(s);
    };
    RngStream batch_rng = salted("batch");
    const std::vector<std::size_t> batch =
        st.buffer.sample_indices(static_cast<std::size_t>(cfg.batch_size), batch_rng);
    RngStream smooth_rng = salted("smooth");

    // Targets: y = r + gamma * (1 - terminal) * min(Q1', Q2')(s', pi'(s') + clipped noise).
    const std::size_t bsz = batch.size();
    std::vector<double> y(bsz);
    MlpActivations scratch;
    for (std::size_t i = 0; i < bsz; ++i) {
        const Transition& tr = st.buffer.at_logical(batch[i]);
        std::vector<double> a2 = mlp_forward(st.target_actor, tr.s2);
        for (double& a : a2) {
            const double noise =
                clamp(cfg.policy_noise * smooth_rng.normal(), -cfg.noise_clip, cfg.noise_clip);
            a = clamp(a + noise, -env.action_bound, env.action_bound);
        }
        const std::vector<double> in = concat(tr.s2, a2);
        const double q1 = mlp_forward(st.target_critic1, in)[0];
        const double q2 = mlp_forward(st.target_critic2, in)[0];
        y[i] = tr.r + cfg.discount * (tr.terminal ? 0.0 : 1.0) * std::min(q1, q2);
    }

    // Critic regression, both critics on the same batch and targets.
    const double scale = 1.0 / static_cast<double>(bsz);
    for (ParamVector* critic : {&st.critic1, &st.critic2}) {
        std::vector<double> grad(critic->size(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < bsz; ++i) {
            const Transition& tr = st.buffer.at_logical(batch[i]);
            const std::vector<double> in = concat(tr.s, tr.a);
            const double q = mlp_forward_cached(*critic, in, scratch)[0];
            const double err = q - y[i];
            loss += err * err * scale;
            const double dq[1] = {2.0 * err * scale};
            mlp_backward(*critic, scratch, dq, grad);
        }
        check_finite_loss(loss, "critic", st);
        adam_step(critic->values, grad, critic == &st.critic1 ? st.critic1_opt : st.critic2_opt,
                  cfg.adam);
    }
    st.update_count += 1;

    // Delayed actor update and target tracking.
    if (st.update_count % cfg.actor_delay == 0) {
        std::vector<double> grad(st.actor.size(), 0.0);
        const double loss = actor_loss_and_grad(st.actor, st.critic1, st.buffer, batch, grad);
        check_finite_loss(loss, "actor", st);
        adam_step(st.actor.values, grad, st.actor_opt, cfg.adam);
        st.actor_update_count += 1;

        ema_towards(st.target_actor, st.actor, cfg.tau);
        ema_towards(st.target_critic1, st.critic1, cfg.tau);
        ema_towards(st.target_critic2, st.critic2, cfg.tau);
    }
}

void td3_continue(Td3State& state, std::int64_t n_iterations) {
    for (std::int64_t i = 0; i < n_iterations; ++i) td3_iterate(state);
}

Checkpoint make_checkpoint(const Td3State& state, bool with_full_state,
                           std::uint64_t config_hash) {
    Checkpoint ck;
    ck.env_name = state.env.name;
    ck.seed = state.run_seed;
    ck.config_hash = config_hash;
    ck.step = state.interaction_count;
    ck.actor = state.actor;
    if (with_full_state) ck.full = std::make_shared<Td3State>(state);
    return ck;
}

std::vector<Checkpoint> td3_train(const EnvSpec& env, const Td3Config& config,
                                  std::uint64_t seed, bool full_state_checkpoints,
                                  std::vector<double>* episode_returns,
                                  std::uint64_t config_hash) {
    Td3State st = td3_init(env, config, seed);
    const std::vector<std::int64_t> marks = checkpoint_steps(config.total_steps,
                                                             config.n_checkpoints);
    std::vector<Checkpoint> out;
    out.reserve(marks.size());
    std::size_t next_mark = 0;

    double episode_acc = 0.0;
    std::int64_t episodes_seen = st.episode_count;
    while (st.interaction_count < config.total_steps) {
        const std::size_t before = st.buffer.insert_count();
        td3_iterate(st);
        if (episode_returns) {
            // The transition just pushed is the last insert.
            const Transition& tr = st.buffer.at_logical(st.buffer.size() - 1);
            (void)before;
            episode_acc += tr.r;
            if (st.episode_count != episodes_seen) {
                episode_returns->push_back(episode_acc);
                episode_acc = 0.0;
                episodes_seen = st.episode_count;
            }
        }
        if (next_mark < marks.size() && st.interaction_count == marks[next_mark]) {
            out.push_back(make_checkpoint(st, full_state_checkpoints, config_hash));
            ++next_mark;
        }
    }
    return out;
}

Td3Snapshot snapshot(Td3State& state) {
    Td3Snapshot s{state.actor,         state.critic1,        state.critic2,
                  state.target_actor,  state.target_critic1, state.target_critic2,
                  state.actor_opt,     state.critic1_opt,    state.critic2_opt,
                  state.cursor,        state.interaction_count, state.update_count,
                  state.actor_update_count, state.episode_count, state.buffer.mark()};
    return s;
}

void restore(Td3State& state, const Td3Snapshot& s) {
    state.actor = s.actor;
    state.critic1 = s.critic1;
    state.critic2 = s.critic2;
    state.target_actor = s.target_actor;
    state.target_critic1 = s.target_critic1;
    state.target_critic2 = s.target_critic2;
    state.actor_opt = s.actor_opt;
    state.critic1_opt = s.critic1_opt;
    state.critic2_opt = s.critic2_opt;
    state.cursor = s.cursor;
    state.interaction_count = s.interaction_count;
    state.update_count = s.update_count;
    state.actor_update_count = s.actor_update_count;
    state.episode_count = s.episode_count;
    state.buffer.rewind(s.buffer_mark);
}

void commit(Td3State& state, const Td3Snapshot& s) { state.buffer.release(s.buffer_mark); }

// --- update families --------------------------------------------------------

std::string update_kind_name(UpdateKind k) {
    switch (k) {
        case UpdateKind::Td3Minibatch: return "td3-minibatch";
        case UpdateKind::GaussianPerturbation: return "gaussian-perturbation";
        case UpdateKind::BcMinibatch: return "bc-minibatch";
    }
    throw std::logic_error("update_kind_name: bad kind");
}

UpdateKind update_kind_from_name(const std::string& name) {
    if (name == "td3-minibatch") return UpdateKind::Td3Minibatch;
    if (name == "gaussian-perturbation") return UpdateKind::GaussianPerturbation;
    if (name == "bc-minibatch") return UpdateKind::BcMinibatch;
    throw std::invalid_argument("unknown update family: " + name);
}

namespace {

ParamVector bc_minibatch_update(const UpdateFamily& fam, const ParamVector& theta,
                                RngStream& rng) {
    if (!fam.bc_teacher || !fam.bc_data) {
        throw std::invalid_argument("bc-minibatch: teacher and data must be set");
    }
    const std::vector<std::size_t> batch =
        fam.bc_data->sample_indices(static_cast<std::size_t>(fam.batch_size), rng);
    std::vector<double> grad(theta.size(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    MlpActivations cache;
    for (std::size_t idx : batch) {
        const std::vector<double>& s = fam.bc_data->at_logical(idx).s;
        const std::vector<double> want = mlp_forward(*fam.bc_teacher, s);
        const std::vector<double> got = mlp_forward_cached(theta, s, cache);
        std::vector<double> dout(got.size());
        for (std::size_t j = 0; j < got.size(); ++j) {
            dout[j] = 2.0 * (got[j] - want[j]) * scale;
        }
        mlp_backward(theta, cache, dout, grad);
    }
    ParamVector out = theta;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= fam.lr * grad[i];
    return out;
}

}  // namespace

ParamVector sample_update(const UpdateFamily& fam, const Td3State& state, RngStream rng) {
    switch (fam.kind) {
        case UpdateKind::GaussianPerturbation:
            return perturb(state.actor, fam.sigma, rng);
        case UpdateKind::BcMinibatch:
            return bc_minibatch_update(fam, state.actor, rng);
        case UpdateKind::Td3Minibatch: {
            if (state.buffer.size() < static_cast<std::size_t>(fam.batch_size)) {
                throw std::invalid_argument(
                    "td3-minibatch: replay buffer smaller than the batch size");
            }
            const std::vector<std::size_t> batch =
                state.buffer.sample_indices(static_cast<std::size_t>(fam.batch_size), rng);
            std::vector<double> grad(state.actor.size(), 0.0);
            actor_loss_and_grad(state.actor, state.critic1, state.buffer, batch, grad);
            ParamVector theta = state.actor;
            AdamState opt = state.actor_opt;  // clone: the live moments are not touched
            AdamParams hp = state.config.adam;
            hp.lr = fam.lr;
            adam_step(theta.values, grad, opt, hp);
            return theta;
        }
    }
    throw std::logic_error("sample_update: bad kind");
}

ParamVector sample_update(const UpdateFamily& fam, const ParamVector& theta, RngStream rng) {
    switch (fam.kind) {
        case UpdateKind::GaussianPerturbation:
            return perturb(theta, fam.sigma, rng);
        case UpdateKind::BcMinibatch:
            return bc_minibatch_update(fam, theta, rng);
        case UpdateKind::Td3Minibatch:
            throw std::invalid_argument("td3-minibatch requires full learner state");
    }
    throw std::logic_error("sample_update: bad kind");
}

// --- gradient check ----------------------------------------------------------

namespace {

struct CheckProblem {
    ParamVector params;
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;  // BcMse only
    ParamVector critic;                        // Td3Actor only
};

void append_rectifier_signs(const MlpActivations& cache, std::vector<bool>* pattern) {
    for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l) {
        for (double z : cache.pre[l]) pattern->push_back(z > 0.0);
    }
}

// Loss at `params`; when `pattern` is given, also records which side of zero
// every rectifier preactivation falls on. The loss is smooth on any
// neighborhood where that pattern is constant.
double check_loss(const CheckProblem& p, CheckedLoss kind, const ParamVector& params,
                  std::vector<bool>* pattern = nullptr) {
    const double scale = 1.0 / static_cast<double>(p.inputs.size());
    if (pattern) pattern->clear();
    MlpActivations cache, critic_cache;
    double loss = 0.0;
    for (std::size_t i = 0; i < p.inputs.size(); ++i) {
        const std::vector<double> out = mlp_forward_cached(params, p.inputs[i], cache);
        if (pattern) append_rectifier_signs(cache, pattern);
        if (kind == CheckedLoss::BcMse) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                const double d = out[j] - p.targets[i][j];
                loss += d * d * scale;
            }
        } else {
            const std::vector<double> in = concat(p.inputs[i], out);
            loss += -mlp_forward_cached(p.critic, in, critic_cache)[0] * scale;
            if (pattern) append_rectifier_signs(critic_cache, pattern);
        }
    }
    return loss;
}

void check_grad_analytic(const CheckProblem& p, CheckedLoss kind, std::vector<double>& grad) {
    const double scale = 1.0 / static_cast<double>(p.inputs.size());
    MlpActivations cache, critic_cache;
    const int action_dim = p.params.shape.output_dim;
    for (std::size_t i = 0; i < p.inputs.size(); ++i) {
        const std::vector<double> out = mlp_forward_cached(p.params, p.inputs[i], cache);
        if (kind == CheckedLoss::BcMse) {
            std::vector<double> dout(out.size());
            for (std::size_t j = 0; j < out.size(); ++j) {
                dout[j] = 2.0 * (out[j] - p.targets[i][j]) * scale;
            }
            mlp_backward(p.params, cache, dout, grad);
        } else {
            const std::vector<double> in = concat(p.inputs[i], out);
            std::vector<double> critic_grad(p.critic.size(), 0.0);
            std::vector<double> din(in.size(), 0.0);
            mlp_forward_cached(p.critic, in, critic_cache);
            const double dq[1] = {-scale};
            mlp_backward(p.critic, critic_cache, dq, critic_grad, &din);
            std::vector<double> da(din.end() - action_dim, din.end());
            mlp_backward(p.params, cache, da, grad);
        }
    }
}

}  // namespace

double gradient_check(const MlpShape& shape, CheckedLoss loss, int n_points,
                      std::uint64_t seed) {
    // Central differences on a rectified network only estimate a derivative
    // while the whole stencil stays inside one linear region of every
    // rectifier. Each coordinate gets a fourth-order five-point stencil; if
    // any stencil point flips a rectifier sign the probe is retried closer,
    // and a coordinate sitting on a boundary is skipped outright.
    constexpr double kSteps[] = {1e-4, 3e-5};
    constexpr double kFloor = 1e-6;
    constexpr int kBatch = 4;

    double worst = 0.0;
    RngStream root(seed);
    for (int point = 0; point < n_points; ++point) {
        RngStream rng = root.split("point", static_cast<std::uint64_t>(point));
        CheckProblem p;
        p.params = init_params(shape, rng.split("params"));
        RngStream in_rng = rng.split("inputs");
        for (int b = 0; b < kBatch; ++b) {
            std::vector<double> x(static_cast<std::size_t>(shape.input_dim));
            for (double& v : x) v = in_rng.uniform(-1.0, 1.0);
            p.inputs.push_back(std::move(x));
        }
        if (loss == CheckedLoss::BcMse) {
            RngStream t_rng = rng.split("targets");
            for (int b = 0; b < kBatch; ++b) {
                std::vector<double> y(static_cast<std::size_t>(shape.output_dim));
                for (double& v : y) {
                    v = t_rng.uniform(-shape.output_scale, shape.output_scale);
                }
                p.targets.push_back(std::move(y));
            }
        } else {
            MlpShape critic_shape;
            critic_shape.input_dim = shape.input_dim + shape.output_dim;
            critic_shape.output_dim = 1;
            critic_shape.hidden = shape.hidden;
            critic_shape.output = OutputKind::Linear;
            p.critic = init_params(critic_shape, rng.split("critic"));
        }

        std::vector<double> analytic(p.params.size(), 0.0);
        check_grad_analytic(p, loss, analytic);
        std::vector<bool> base_pattern;
        check_loss(p, loss, p.params, &base_pattern);

        ParamVector probe = p.params;
        std::vector<bool> pattern;
        for (std::size_t c = 0; c < probe.size(); ++c) {
            const double keep = probe.values[c];
            std::optional<double> numeric;
            for (double step : kSteps) {
                const double h = step * std::max(1.0, std::abs(keep));
                const double offsets[4] = {h, 2.0 * h, -h, -2.0 * h};
                double f[4] = {};
                bool clean = true;
                for (int k = 0; k < 4 && clean; ++k) {
                    probe.values[c] = keep + offsets[k];
                    f[k] = check_loss(p, loss, probe, &pattern);
                    clean = pattern == base_pattern;
                }
                probe.values[c] = keep;
                if (clean) {
                    numeric = (8.0 * (f[0] - f[2]) - (f[1] - f[3])) / (12.0 * h);
                    break;
                }
            }
            if (!numeric) continue;  // coordinate straddles a rectifier boundary
            const double rel = std::abs(analytic[c] - *numeric) /
                               std::max({std::abs(analytic[c]), std::abs(*numeric), kFloor});
            if (rel > worst) worst = rel;
        }
    }
    return worst;
}

// --- behavior cloning ---------------------------------------------------------

ParamVector bc_clone(const ParamVector& teacher, const ReplayBuffer& data, const BcConfig& cfg,
                     std::uint64_t seed) {
    if (data.size() == 0) throw std::invalid_argument("bc_clone: empty data buffer");
    RngStream root(seed);
    ParamVector student = init_params(teacher.shape, root.split("init"));
    if (cfg.steps == 0) return student;

    AdamState opt = AdamState::zeros(student.size());
    MlpActivations cache;
    const std::size_t bsz = static_cast<std::size_t>(
        std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), data.size()));
    for (std::int64_t step = 0; step < cfg.steps; ++step) {
        RngStream rng = root.split("batch", static_cast<std::uint64_t>(step));
        const std::vector<std::size_t> batch = data.sample_indices(bsz, rng);
        std::vector<double> grad(student.size(), 0.0);
        const double scale = 1.0 / static_cast<double>(batch.size());
        for (std::size_t idx : batch) {
            const std::vector<double>& s = data.at_logical(idx).s;
            const std::vector<double> want = mlp_forward(teacher, s);
            const std::vector<double> got = mlp_forward_cached(student, s, cache);
            std::vector<double> dout(got.size());
            for (std::size_t j = 0; j < got.size(); ++j) {
                dout[j] = 2.0 * (got[j] - want[j]) * scale;
            }
            mlp_backward(student, cache, dout, grad);
        }
        adam_step(student.values, grad, opt, cfg.adam);
    }
    return student;
}

double action_error(const ParamVector& a, const ParamVector& b,
                    const std::vector<std::vector<double>>& states) {
    if (states.empty()) throw std::invalid_argument("action_error: no states");
    double acc = 0.0;
    for (const auto& s : states) {
        const std::vector<double> ya = mlp_forward(a, s);
        const std::vector<double> yb = mlp_forward(b, s);
        double d2 = 0.0;
        for (std::size_t j = 0; j < ya.size(); ++j) {
            d2 += (ya[j] - yb[j]) * (ya[j] - yb[j]);
        }
        acc += std::sqrt(d2);
    }
    return acc / static_cast<double>(states.size());
}

}  // namespace rlscape
