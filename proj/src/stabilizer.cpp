#include "rlscape/stabilizer.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <utility>

#include "rlscape/parallel.hpp"
#include "rlscape/rollout.hpp"
#include "rlscape/stats.hpp"

namespace rlscape {

namespace {

// n post-update returns of the configured family, one indexed child stream
// per draw so the rollouts can run in parallel. `full` is consulted only by
// td3-minibatch (for its critics, optimizer moments and replay buffer);
// the other families update the bare actor.
std::vector<double> post_update_returns(const UpdateFamily& fam, const Td3State* full,
                                        const ParamVector& actor, const EnvSpec& env,
                                        const RngStream& root, int n) {
    if (n < 1) throw std::invalid_argument("post_update_returns: n must be >= 1");
    const EnvState start = initial_state(env);
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(out.size(), [&](std::size_t i) {
        RngStream rng = root.split(static_cast<std::uint64_t>(i));
        ParamVector updated = fam.kind == UpdateKind::Td3Minibatch
                                  ? sample_update(fam, *full, rng)
                                  : sample_update(fam, actor, rng);
        out[i] = rollout_return(env, updated, start);
    });
    return out;
}

// One proposal = one real training segment: actor_delay environment steps
// and critic updates, containing exactly one delayed actor update. The salt
// is zero on first attempts (so an all-accepted run is stream-identical to
// plain training) and fresh on each retry after a rejection (so the retry
// draws new minibatches instead of replaying the rejected update).
void apply_td3_proposal(Td3State& st, std::uint64_t seed, std::uint64_t retry) {
    st.stream_salt = retry == 0 ? 0 : derive_seed(seed, "retry", retry);
    td3_continue(st, st.config.actor_delay);
}

void check_revert(const Td3State& st, const Td3Snapshot& snap) {
    const bool ok = st.buffer.write_pos() == snap.buffer_mark.next &&
                    st.buffer.size() == snap.buffer_mark.size &&
                    st.buffer.insert_count() == snap.buffer_mark.insert_count &&
                    st.interaction_count == snap.interaction_count &&
                    st.update_count == snap.update_count &&
                    st.actor.values == snap.actor.values;
    if (!ok) throw std::runtime_error("stabilize: revert left the learner state inconsistent");
}

void validate(const RejectionConfig& cfg) {
    if (cfg.n_mc < 1) throw std::invalid_argument("stabilize: n_mc must be >= 1");
    if (cfg.budget < 1) throw std::invalid_argument("stabilize: budget must be >= 1");
    if (cfg.tolerance < 0.0) throw std::invalid_argument("stabilize: tolerance must be >= 0");
    if (!(cfg.cvar_level > 0.0) || cfg.cvar_level > 1.0)
        throw std::invalid_argument("stabilize: cvar_level must be in (0, 1]");
    if (cfg.ltp_eval_n < 1) throw std::invalid_argument("stabilize: ltp_eval_n must be >= 1");
}

}  // namespace

bool accept_update(double cvar_before, double cvar_after, double tolerance) {
    return cvar_after >= (1.0 - tolerance) * cvar_before;
}

StabilizeResult stabilize(const Checkpoint& ckpt, const RejectionConfig& cfg, const EnvSpec& env,
                          std::uint64_t seed) {
    validate(cfg);
    const RngStream root(seed);
    const double lower_bound = env.return_lower_bound();

    StabilizeResult result;
    StabilizationTrace& trace = result.trace;
    trace.cvar_level = cfg.cvar_level;
    trace.tolerance = cfg.tolerance;
    trace.n_mc = cfg.n_mc;
    trace.family = cfg.family.kind;

    const bool td3 = cfg.family.kind == UpdateKind::Td3Minibatch;
    if (td3 && !ckpt.full)
        throw std::invalid_argument(
            "stabilize: the td3-minibatch family needs a checkpoint with full learner state");

    // Working copies. The td3 branch trains the copied learner state; the
    // other families replace the bare actor and touch nothing else.
    Td3State st;
    ParamVector theta = ckpt.actor;
    if (td3) {
        st = *ckpt.full;
        st.env = env;
        st.stream_salt = 0;
    }
    const Td3State* full = td3 ? &st : nullptr;
    const ParamVector& current = td3 ? st.actor : theta;

    {
        const std::vector<double> xs = post_update_returns(cfg.family, full, current, env,
                                                           root.split("ltp-before"), cfg.ltp_eval_n);
        trace.mean_before = mean_of(xs);
        trace.ltp_before = left_tail_probability(xs, cfg.ltp_alpha, lower_bound);
    }

    std::uint64_t retry = 0;  // consecutive rejections at the current state
    for (int iter = 0; iter < cfg.budget; ++iter) {
        const auto it = static_cast<std::uint64_t>(iter);
        const std::vector<double> before = post_update_returns(
            cfg.family, full, current, env, root.split("probe-before", it), cfg.n_mc);
        const double cvar_before = cvar(before, cfg.cvar_level);

        ParamVector proposed;
        Td3Snapshot snap;
        if (td3) {
            snap = snapshot(st);
            apply_td3_proposal(st, seed, retry);
        } else {
            RngStream prop(derive_seed(seed, "proposal", it));
            proposed = sample_update(cfg.family, theta, prop);
        }

        const std::vector<double> after =
            post_update_returns(cfg.family, full, td3 ? st.actor : proposed, env,
                                root.split("probe-after", it), cfg.n_mc);
        const double cvar_after = cvar(after, cfg.cvar_level);

        const bool accepted =
            !cfg.rejection_enabled || accept_update(cvar_before, cvar_after, cfg.tolerance);
        if (accepted) {
            if (td3) {
                commit(st, snap);
            } else {
                theta = std::move(proposed);
            }
            retry = 0;
            ++trace.accepted;
        } else {
            if (td3) {
                restore(st, snap);
                check_revert(st, snap);
            }
            ++retry;
            ++trace.rejected;
        }
        trace.proposals.push_back({iter, cvar_before, cvar_after, accepted});
    }

    {
        const std::vector<double> xs = post_update_returns(cfg.family, full, current, env,
                                                           root.split("ltp-after"), cfg.ltp_eval_n);
        trace.mean_after = mean_of(xs);
        trace.ltp_after = left_tail_probability(xs, cfg.ltp_alpha, lower_bound);
    }

    if (td3) {
        st.stream_salt = 0;
        result.stabilized = make_checkpoint(st, true, ckpt.config_hash);
    } else {
        result.stabilized = ckpt;
        result.stabilized.actor = theta;
        if (ckpt.full) {
            auto updated = std::make_shared<Td3State>(*ckpt.full);
            updated->actor = theta;
            result.stabilized.full = std::move(updated);
        }
    }
    return result;
}

ParamVector unchecked_proposal_run(const Checkpoint& ckpt, const RejectionConfig& cfg,
                                   const EnvSpec& env, std::uint64_t seed) {
    validate(cfg);
    if (cfg.family.kind == UpdateKind::Td3Minibatch) {
        if (!ckpt.full)
            throw std::invalid_argument(
                "unchecked_proposal_run: the td3-minibatch family needs full learner state");
        Td3State st = *ckpt.full;
        st.env = env;
        // Every proposal is a first attempt here (nothing is ever rejected),
        // so the salt stays zero throughout, exactly as in an all-accepted
        // stabilize run.
        for (int iter = 0; iter < cfg.budget; ++iter) apply_td3_proposal(st, seed, 0);
        st.stream_salt = 0;
        return st.actor;
    }
    ParamVector theta = ckpt.actor;
    for (int iter = 0; iter < cfg.budget; ++iter) {
        RngStream prop(derive_seed(seed, "proposal", static_cast<std::uint64_t>(iter)));
        theta = sample_update(cfg.family, theta, prop);
    }
    return theta;
}

std::vector<RankedCheckpoint> rank_by_cvar(const std::vector<Checkpoint>& ckpts,
                                           const UpdateFamily& fam, int n, double alpha,
                                           const EnvSpec& env, std::uint64_t seed) {
    if (ckpts.empty()) throw std::invalid_argument("rank_by_cvar: no checkpoints");
    if (n < 1) throw std::invalid_argument("rank_by_cvar: n must be >= 1");
    const RngStream root(seed);
    std::vector<RankedCheckpoint> ranked;
    ranked.reserve(ckpts.size());
    for (std::size_t i = 0; i < ckpts.size(); ++i) {
        const Checkpoint& c = ckpts[i];
        if (fam.kind == UpdateKind::Td3Minibatch && !c.full)
            throw std::invalid_argument("rank_by_cvar: checkpoint " + c.id() +
                                        " lacks the full learner state td3-minibatch needs");
        const std::vector<double> xs =
            post_update_returns(fam, c.full.get(), c.actor, env,
                                root.split("rank", static_cast<std::uint64_t>(i)), n);
        ranked.push_back({c.id(), c.step, cvar(xs, alpha)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedCheckpoint& a, const RankedCheckpoint& b) {
        if (a.cvar != b.cvar) return a.cvar > b.cvar;
        return a.checkpoint_id < b.checkpoint_id;
    });
    return ranked;
}

LtpReductionReport ltp_reduction_report(
    const std::map<std::string, std::vector<double>>& treated_by_env,
    const std::map<std::string, std::vector<double>>& baseline_by_env, int n_boot,
    std::uint64_t seed) {
    if (treated_by_env.empty() || baseline_by_env.empty())
        throw std::invalid_argument("ltp_reduction_report: both conditions need data");
    const RngStream root(seed);
    LtpReductionReport report;
    report.n_boot = n_boot;
    report.treated = stratified_bootstrap_mean(treated_by_env, n_boot, root.split("treated"));
    report.baseline = stratified_bootstrap_mean(baseline_by_env, n_boot, root.split("baseline"));
    return report;
}

std::optional<double> ltp_reduction(const StabilizationTrace& trace) {
    if (!trace.ltp_before || !trace.ltp_after) return std::nullopt;
    return *trace.ltp_before - *trace.ltp_after;
}

}  // namespace rlscape
