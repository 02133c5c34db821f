#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "rlscape/rng.hpp"

namespace rlscape {

double mean_of(std::span<const double> xs);

// Population standard deviation (divide by N, not N-1).
double population_std(std::span<const double> xs);

// Fisher-Pearson moment coefficient g1 = m3 / m2^(3/2); defined as 0 when
// the variance is 0. Requires N >= 2.
double skewness_g1(std::span<const double> xs);

// Chernoff mode estimate: midpoint of the most populated bin of a 100-bin
// histogram over [min, max], ties resolved toward the lowest-index bin. The
// top bin is closed on the right so the maximum lands in bin 99. A constant
// sample returns that constant.
double chernoff_mode(std::span<const double> xs);
inline constexpr int kModeHistogramBins = 100;

// Left-tail probability: #{ y : lower_bound <= y < alpha * mode } / N with
// mode the Chernoff estimate. Undefined (nullopt) when mode <= lower_bound.
// lower_bound defaults to 0 for nonnegative-return tasks; for tasks whose
// returns are merely bounded below, pass that documented bound.
std::optional<double> left_tail_probability(std::span<const double> xs, double alpha,
                                            double lower_bound = 0.0);

// Conditional value at risk: mean of the k = max(1, floor(alpha * N))
// smallest samples, ties by value. cvar(xs, 1) is the plain mean and cvar is
// monotone nondecreasing in alpha. Requires alpha in (0, 1].
double cvar(std::span<const double> xs, double alpha);

// 95% percentile-bootstrap confidence interval for the mean: n_boot
// resamples of size N with replacement, interval given by the 2.5th and
// 97.5th percentiles of the resampled means (linear interpolation between
// order statistics).
std::pair<double, double> bootstrap_mean_ci(std::span<const double> xs, int n_boot,
                                            RngStream rng);

// Pearson correlation; throws std::invalid_argument on length mismatch,
// N < 2, or zero variance in either argument.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct StatsParams {
    double ltp_alpha = 0.5;
    double cvar_alpha = 0.1;
    int n_boot = 1000;
    double lower_bound = 0.0;  // return lower bound used by the left tail
};

// Summary of one empirical return distribution.
struct DistStats {
    double mean = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double mode = 0.0;
    std::optional<double> ltp;  // nullopt when undefined (mode <= lower bound)
    double ltp_alpha = 0.5;
    double cvar_alpha = 0.1;
    double cvar = 0.0;
    std::int64_t n = 0;
    std::pair<double, double> bootstrap_mean_ci{0.0, 0.0};
};

// Computes every DistStats field from raw samples; the bootstrap draws from
// the supplied stream. Requires N >= 2.
DistStats compute_stats(std::span<const double> xs, const StatsParams& params, RngStream boot_rng);

// Quantile of a *sorted* vector by linear interpolation between order
// statistics, q in [0, 1].
double sorted_quantile(std::span<const double> sorted_xs, double q);

}  // namespace rlscape
