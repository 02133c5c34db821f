#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlscape/env.hpp"
#include "rlscape/policy.hpp"
#include "rlscape/replay.hpp"
#include "rlscape/rng.hpp"

namespace rlscape {

// Adam with bias correction. Moment vectors are part of persisted state so
// training continues deterministically across snapshot/restore.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;

    static AdamState zeros(std::size_t n) {
        AdamState a;
        a.m.assign(n, 0.0);
        a.v.assign(n, 0.0);
        return a;
    }
    bool operator==(const AdamState&) const = default;
};

struct AdamParams {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1.5e-4;
};

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& opt,
               const AdamParams& hp);

struct Td3Config {
    std::int64_t total_steps = 200000;
    std::int64_t warmup_steps = 1000;  // uniform-random actions, no updates
    int batch_size = 64;
    std::size_t buffer_capacity = 100000;
    double discount = 0.99;
    AdamParams adam;               // shared by actor and critics
    double tau = 0.995;            // target <- tau * target + (1 - tau) * online
    double exploration_noise = 0.1;
    int actor_delay = 2;
    double policy_noise = 0.2;
    double noise_clip = 0.5;
    int hidden_units = 32;
    int hidden_layers = 2;
    int n_checkpoints = 10;
};

// Full learner state. All stochastic draws are derived from run_seed and the
// counters below, so serializing the fields reproduces the exact stream
// positions and training continues bit-identically after a round-trip.
struct Td3State {
    EnvSpec env;
    Td3Config config;
    std::uint64_t run_seed = 0;

    ParamVector actor, critic1, critic2;
    ParamVector target_actor, target_critic1, target_critic2;
    AdamState actor_opt, critic1_opt, critic2_opt;
    ReplayBuffer buffer{1};

    EnvState cursor;                    // live environment state
    std::int64_t interaction_count = 0; // env steps taken
    std::int64_t update_count = 0;      // critic updates applied
    std::int64_t actor_update_count = 0;
    std::int64_t episode_count = 0;     // resets performed (>= 1)

    // Ephemeral salt mixed into the minibatch and smoothing-noise streams.
    // Zero during plain training and on first proposal attempts, so an
    // all-accepted propose/revert loop is stream-identical to plain training.
    // The stabilizer sets a fresh value only when retrying after a rejection,
    // so the retry draws new minibatches instead of replaying the identical
    // rejected update; interaction noise stays keyed by the (restored)
    // counters, and a revert therefore re-collects the same transitions.
    // Not persisted.
    std::uint64_t stream_salt = 0;
};

// Policy checkpoint: always carries the actor; optionally the complete
// learner state (required to continue training, probe minibatch updates, or
// run the stabilizer).
struct Checkpoint {
    std::string env_name;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::int64_t step = 0;
    ParamVector actor;
    std::shared_ptr<const Td3State> full;  // may be null

    std::string id() const { return "s" + std::to_string(seed) + "-k" + std::to_string(step); }
};

// Steps at which training emits checkpoints: n evenly spaced, the first at
// total/(2n) and the spacing total/n (e.g. total 100000, n 10 -> 5000,
// 15000, ..., 95000).
std::vector<std::int64_t> checkpoint_steps(std::int64_t total_steps, int n_checkpoints);

// Raised when a training loss turns non-finite; carries the state at the
// failing step for diagnostics.
struct TrainingDiverged : std::runtime_error {
    TrainingDiverged(std::string msg, std::shared_ptr<Td3State> at)
        : std::runtime_error(std::move(msg)), state(std::move(at)) {}
    std::shared_ptr<Td3State> state;
};

Td3State td3_init(const EnvSpec& env, const Td3Config& config, std::uint64_t seed);

// One environment interaction plus (after warmup) one critic update and,
// every actor_delay updates, one delayed actor update with target EMA.
void td3_iterate(Td3State& state);

// Runs n iterations; used by training, plain continuation, and the
// stabilizer's accepted path.
void td3_continue(Td3State& state, std::int64_t n_iterations);

// Full training run; returns the checkpoints in step order. When
// full_state_checkpoints is set each checkpoint embeds a deep copy of the
// learner state at that step. episode_returns, when non-null, receives the
// return of every completed episode.
std::vector<Checkpoint> td3_train(const EnvSpec& env, const Td3Config& config,
                                  std::uint64_t seed, bool full_state_checkpoints = false,
                                  std::vector<double>* episode_returns = nullptr,
                                  std::uint64_t config_hash = 0);

Checkpoint make_checkpoint(const Td3State& state, bool with_full_state,
                           std::uint64_t config_hash);

// In-memory snapshot for propose/revert loops. Cheap: network and optimizer
// vectors are copied (small), the replay buffer is rewound through its
// overwrite log instead of being copied.
struct Td3Snapshot {
    ParamVector actor, critic1, critic2;
    ParamVector target_actor, target_critic1, target_critic2;
    AdamState actor_opt, critic1_opt, critic2_opt;
    EnvState cursor;
    std::int64_t interaction_count, update_count, actor_update_count, episode_count;
    ReplayBuffer::Mark buffer_mark;
};

Td3Snapshot snapshot(Td3State& state);               // arms the buffer mark
void restore(Td3State& state, const Td3Snapshot& s); // rewinds to the mark
void commit(Td3State& state, const Td3Snapshot& s);  // accepts, drops the mark

// --- one-update stochasticity families -------------------------------------

enum class UpdateKind { Td3Minibatch, GaussianPerturbation, BcMinibatch };

std::string update_kind_name(UpdateKind k);
UpdateKind update_kind_from_name(const std::string& name);

// A distribution over single updates u(theta, X). Sampling with a fixed
// stream is a pure function of (theta, X); nothing in the learner state is
// mutated by drawing.
struct UpdateFamily {
    UpdateKind kind = UpdateKind::GaussianPerturbation;
    double sigma = 3e-4;  // gaussian-perturbation scale
    int batch_size = 64;  // td3-minibatch / bc-minibatch
    double lr = 3e-4;     // td3-minibatch probe / bc-minibatch step size
    // bc-minibatch: teacher policy and logged states (non-owning).
    const ParamVector* bc_teacher = nullptr;
    const ReplayBuffer* bc_data = nullptr;
};

// td3-minibatch: one actor Adam step from one random minibatch with the
// critics frozen, applied to clones of the actor and its optimizer moments.
// gaussian-perturbation: theta + sigma * N(0, I).
// bc-minibatch: one plain gradient step on the minibatch MSE toward the
// teacher's actions at logged states.
ParamVector sample_update(const UpdateFamily& fam, const Td3State& state, RngStream rng);

// Same, for families that need no learner state (gaussian-perturbation,
// bc-minibatch). td3-minibatch throws std::invalid_argument here.
ParamVector sample_update(const UpdateFamily& fam, const ParamVector& theta, RngStream rng);

// --- verification utilities -------------------------------------------------

enum class CheckedLoss { BcMse, Td3Actor };

// Compares analytic gradients against central finite differences
// (h = 1e-6) at n_points random parameter vectors; returns the maximum
// relative error over coordinates with |analytic| > 1e-8.
double gradient_check(const MlpShape& shape, CheckedLoss loss, int n_points, std::uint64_t seed);

struct BcConfig {
    std::int64_t steps = 2000;
    int batch_size = 64;
    AdamParams adam{.lr = 1e-3};
};

// Trains a fresh policy to match the teacher's actions on states logged in
// data (the teacher's action is recomputed for every sampled state). With
// steps == 0 the fresh initialization is returned untouched.
ParamVector bc_clone(const ParamVector& teacher, const ReplayBuffer& data, const BcConfig& cfg,
                     std::uint64_t seed);

// Mean L2 action error between two policies over the given states.
double action_error(const ParamVector& a, const ParamVector& b,
                    const std::vector<std::vector<double>>& states);

}  // namespace rlscape
