#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "rlscape/purd.hpp"
#include "rlscape/replay.hpp"
#include "rlscape/rollout.hpp"

namespace rlscape {

// Cumulative-return race between a successful and a failing trajectory:
// point t (1-based) is (sum of the first t successful rewards, sum of the
// first t failing rewards). A trajectory that ended early is padded by
// holding its cumulative return constant, i.e. terminated episodes collect
// zero reward forever after.
struct RaceCurve {
    std::vector<std::pair<double, double>> points;
};

RaceCurve race_curve(const Trajectory& successful, const Trajectory& failing);

// Produces the trajectory of draw i of a sample set, either from retained
// trajectories or by deterministic re-simulation.
using TrajectoryFetch = std::function<Trajectory(std::size_t)>;

TrajectoryFetch fetch_from_retained(const ReturnSampleSet& set);
TrajectoryFetch fetch_by_resimulation(const Checkpoint& ckpt, const UpdateFamily& fam,
                                      const EnvSpec& env, std::uint64_t seed,
                                      const PurdOptions& opts);

struct FailurePair {
    std::size_t successful_index = 0;
    std::size_t failing_index = 0;
    Trajectory successful;
    Trajectory failing;
};

// Picks the first draw (by index) whose return is within 10% of the sample
// mean (successful) and the first whose return is below half the sample
// mode (failing). Returns nullopt when either class is empty; a nonpositive
// mean makes the relative success window meaningless, which is reported via
// the optional diagnostic out-parameter.
std::optional<FailurePair> select_pair(const ReturnSampleSet& set, const TrajectoryFetch& fetch,
                                       std::string* diagnostic = nullptr);

struct LtpByState {
    std::size_t buffer_index = 0;      // logical index, 0 = oldest
    std::optional<double> ltp;
    double mean_return = 0.0;
};

// Left-tail probability of the post-update return distribution started from
// every stride-th replay state (logical order from the oldest). ceil(B /
// stride) rows.
std::vector<LtpByState> ltp_over_states(const Checkpoint& ckpt, const UpdateFamily& fam,
                                        const ReplayBuffer& buffer, std::size_t stride, int n,
                                        const EnvSpec& env, std::uint64_t seed,
                                        double ltp_alpha = 0.5);

}  // namespace rlscape
