#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rlscape/landscape.hpp"
#include "rlscape/policy.hpp"

namespace rlscape {

// Returns along the straight segment theta(alpha) = alpha*p1 + (1-alpha)*p2,
// alpha on a uniform [0, 1] grid (alpha_0 = 0 is p2, alpha_last = 1 is p1,
// both exact). At every point, n_perturb Gaussian perturbations of scale
// sigma are evaluated; mean_returns holds their average and std_returns
// their population spread (zero when n_perturb == 1). sigma = 0 with
// n_perturb = 1 degenerates to the raw return profile.
struct InterpolationProfile {
    std::vector<double> alphas;
    std::vector<double> mean_returns;
    std::vector<double> std_returns;
    std::vector<bool> collapse_flags;  // interior points under the default threshold
    double collapse_threshold = 0.0;   // absolute return threshold the flags used
    int n_perturb = 1;
    double sigma = 0.0;
};

struct InterpolationOptions {
    int n_points = 100;
    double sigma = 3e-4;
    int n_perturb = 16;
    double collapse_frac = 0.1;  // fraction of the lower endpoint return
};

// Point i, perturbation j draws from stream (seed, "point", i, j). Points
// are evaluated in parallel; the two endpoints are included.
InterpolationProfile interpolate_profile(const ParamVector& p1, const ParamVector& p2,
                                         const InterpolationOptions& opts, const ReturnFn& eval,
                                         std::uint64_t seed);

// Below-threshold proportion: the fraction of *interior* profile points
// whose mean return falls below threshold_frac * min(endpoint returns).
// Both endpoints are excluded from numerator and denominator.
double btp(const InterpolationProfile& profile, double threshold_frac);

// Stratified bootstrap of a mean across named groups: the point estimate is
// the unweighted mean over groups of per-group means; each bootstrap
// replicate resamples values within every group (with replacement, group
// sizes preserved) and recomputes that same aggregate. 95% percentile CI.
struct StratifiedEstimate {
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::map<std::string, double> group_means;
};

StratifiedEstimate stratified_bootstrap_mean(
    const std::map<std::string, std::vector<double>>& groups, int n_boot, RngStream rng);

// Aggregate BTP for the two pairing conditions, stratified by environment.
struct BtpReport {
    StratifiedEstimate same_run;
    StratifiedEstimate diff_run;
    int n_boot = 0;
};

BtpReport aggregate_btp(const std::map<std::string, std::vector<double>>& same_run_by_env,
                        const std::map<std::string, std::vector<double>>& diff_run_by_env,
                        int n_boot, std::uint64_t seed);

}  // namespace rlscape
