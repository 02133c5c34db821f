#include "rlscape/failure.hpp"

#include <cmath>
#include <stdexcept>

#include "rlscape/stats.hpp"

namespace rlscape {

RaceCurve race_curve(const Trajectory& successful, const Trajectory& failing) {
    const std::size_t len = std::max(successful.length(), failing.length());
    RaceCurve curve;
    curve.points.reserve(len);
    double acc_s = 0.0;
    double acc_f = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        if (t < successful.length()) acc_s += successful.rewards[t];
        if (t < failing.length()) acc_f += failing.rewards[t];
        curve.points.emplace_back(acc_s, acc_f);
    }
    return curve;
}

TrajectoryFetch fetch_from_retained(const ReturnSampleSet& set) {
    if (set.trajectories.size() != set.samples.size()) {
        throw std::invalid_argument("fetch_from_retained: sample set has no trajectories");
    }
    const std::vector<Trajectory>* trajs = &set.trajectories;
    return [trajs](std::size_t i) { return trajs->at(i); };
}

TrajectoryFetch fetch_by_resimulation(const Checkpoint& ckpt, const UpdateFamily& fam,
                                      const EnvSpec& env, std::uint64_t seed,
                                      const PurdOptions& opts) {
    return [ckpt, fam, env, seed, opts](std::size_t i) {
        return resimulate_draw(ckpt, fam, env, seed, opts, i);
    };
}

std::optional<FailurePair> select_pair(const ReturnSampleSet& set, const TrajectoryFetch& fetch,
                                       std::string* diagnostic) {
    if (set.samples.size() < 2) {
        if (diagnostic) *diagnostic = "too few samples";
        return std::nullopt;
    }
    const double mean = mean_of(set.samples);
    if (mean <= 0.0) {
        if (diagnostic) {
            *diagnostic = "mean return is nonpositive; the relative success window is undefined";
        }
        return std::nullopt;
    }
    const double mode = chernoff_mode(set.samples);
    const double fail_threshold = 0.5 * mode;

    std::optional<std::size_t> succ_idx;
    std::optional<std::size_t> fail_idx;
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        const double r = set.samples[i];
        if (!succ_idx && std::abs(r - mean) <= 0.1 * std::abs(mean)) succ_idx = i;
        if (!fail_idx && r < fail_threshold) fail_idx = i;
        if (succ_idx && fail_idx) break;
    }
    if (!succ_idx || !fail_idx) {
        if (diagnostic) {
            *diagnostic = !succ_idx ? "no draw within 10% of the mean"
                                    : "no draw below half the mode";
        }
        return std::nullopt;
    }

    FailurePair pair;
    pair.successful_index = *succ_idx;
    pair.failing_index = *fail_idx;
    pair.successful = fetch(*succ_idx);
    pair.failing = fetch(*fail_idx);
    return pair;
}

std::vector<LtpByState> ltp_over_states(const Checkpoint& ckpt, const UpdateFamily& fam,
                                        const ReplayBuffer& buffer, std::size_t stride, int n,
                                        const EnvSpec& env, std::uint64_t seed,
                                        double ltp_alpha) {
    if (stride == 0) throw std::invalid_argument("ltp_over_states: stride must be >= 1");
    if (buffer.size() == 0) throw std::invalid_argument("ltp_over_states: empty buffer");

    std::vector<LtpByState> rows;
    RngStream root(seed);
    const double lower_bound = env.return_lower_bound();
    for (std::size_t i = 0; i < buffer.size(); i += stride) {
        PurdOptions opts;
        opts.n = n;
        opts.start = state_at(env, buffer.at_logical(i).s);
        const ReturnSampleSet set =
            estimate_purd(ckpt, fam, env, root.split("state", i).seed(), opts);
        LtpByState row;
        row.buffer_index = i;
        row.ltp = left_tail_probability(set.samples, ltp_alpha, lower_bound);
        row.mean_return = mean_of(set.samples);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rlscape
