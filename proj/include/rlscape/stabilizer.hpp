#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlscape/connectivity.hpp"
#include "rlscape/learner.hpp"
#include "rlscape/purd.hpp"

namespace rlscape {

// Post-update-CVaR rejection loop configuration. Proposals and CVaR probes
// both draw from `family`: for td3-minibatch a proposal is a real training
// segment (actor_delay environment steps and critic updates plus one delayed
// actor update), for the other families it is a single sampled update of the
// actor alone.
struct RejectionConfig {
    UpdateFamily family{.kind = UpdateKind::Td3Minibatch};
    double cvar_level = 0.1;   // alpha of the CVaR on both sides of the test
    int n_mc = 32;             // post-update samples per side, redrawn every iteration
    double tolerance = 0.05;   // delta: accept iff cvar_after >= (1-delta)*cvar_before
    int budget = 40;           // proposals attempted (accepted and rejected both count)
    bool rejection_enabled = true;
    int ltp_eval_n = 1000;     // sample size of the bracketing left-tail evaluations
    double ltp_alpha = 0.5;
};

// The accept test of the rejection loop. Boundary equality accepts, and the
// outcome is monotone in the tolerance: raising delta never turns an accept
// into a reject.
bool accept_update(double cvar_before, double cvar_after, double tolerance);

struct ProposalRecord {
    int iteration = 0;
    double cvar_before = 0.0;
    double cvar_after = 0.0;
    bool accepted = false;
};

struct StabilizationTrace {
    std::vector<ProposalRecord> proposals;
    int accepted = 0;
    int rejected = 0;
    std::optional<double> ltp_before, ltp_after;  // bracketing evaluations
    double mean_before = 0.0, mean_after = 0.0;
    double cvar_level = 0.0, tolerance = 0.0;
    int n_mc = 0;
    UpdateKind family = UpdateKind::Td3Minibatch;
};

struct StabilizeResult {
    Checkpoint stabilized;  // carries full state when the input did
    StabilizationTrace trace;
};

// Runs the rejection loop for cfg.budget proposals. A rejected proposal
// reverts the networks, the optimizer moments, the environment cursor and
// the replay buffer to their exact pre-proposal state; probe rollouts never
// enter the buffer. td3-minibatch requires a checkpoint with full learner
// state.
StabilizeResult stabilize(const Checkpoint& ckpt, const RejectionConfig& cfg, const EnvSpec& env,
                          std::uint64_t seed);

// Applies the identical proposal sequence without probing or rejection;
// byte-equality of the resulting actor with a rejection-disabled stabilize
// run verifies that CVaR probing leaves training untouched.
ParamVector unchecked_proposal_run(const Checkpoint& ckpt, const RejectionConfig& cfg,
                                   const EnvSpec& env, std::uint64_t seed);

struct RankedCheckpoint {
    std::string checkpoint_id;
    std::int64_t step = 0;
    double cvar = 0.0;
};

// Checkpoints ordered by descending post-update CVaR; ties broken by
// checkpoint id so the ordering is deterministic.
std::vector<RankedCheckpoint> rank_by_cvar(const std::vector<Checkpoint>& ckpts,
                                           const UpdateFamily& fam, int n, double alpha,
                                           const EnvSpec& env, std::uint64_t seed);

struct LtpReductionReport {
    StratifiedEstimate treated;   // rejection enabled
    StratifiedEstimate baseline;  // rejection disabled
    int n_boot = 0;
};

// Stratified (per environment) bootstrap aggregate of left-tail reductions
// (ltp_before - ltp_after per policy) for the treated and baseline arms.
LtpReductionReport ltp_reduction_report(
    const std::map<std::string, std::vector<double>>& treated_by_env,
    const std::map<std::string, std::vector<double>>& baseline_by_env, int n_boot,
    std::uint64_t seed);

// ltp_before - ltp_after when both sides are defined.
std::optional<double> ltp_reduction(const StabilizationTrace& trace);

}  // namespace rlscape
