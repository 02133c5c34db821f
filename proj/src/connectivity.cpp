#include "rlscape/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rlscape/parallel.hpp"
#include "rlscape/stats.hpp"

namespace rlscape {

InterpolationProfile interpolate_profile(const ParamVector& p1, const ParamVector& p2,
                                         const InterpolationOptions& opts, const ReturnFn& eval,
                                         std::uint64_t seed) {
    if (opts.n_points < 2) {
        throw std::invalid_argument("interpolate_profile: need at least the two endpoints");
    }
    if (opts.n_perturb < 1 || opts.sigma < 0.0) {
        throw std::invalid_argument("interpolate_profile: bad perturbation settings");
    }
    if (!p1.same_shape(p2)) {
        throw std::invalid_argument("interpolate_profile: endpoint shapes differ");
    }

    InterpolationProfile prof;
    prof.n_perturb = opts.n_perturb;
    prof.sigma = opts.sigma;
    const std::size_t n = static_cast<std::size_t>(opts.n_points);
    prof.alphas.resize(n);
    prof.mean_returns.resize(n);
    prof.std_returns.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        prof.alphas[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    }

    RngStream root(seed);
    parallel_for(n, [&](std::size_t i) {
        // lerp is endpoint-exact, so alpha = 0 / 1 evaluate p2 / p1 unchanged.
        const ParamVector theta = lerp(p1, p2, prof.alphas[i]);
        std::vector<double> rets(static_cast<std::size_t>(opts.n_perturb));
        for (int j = 0; j < opts.n_perturb; ++j) {
            RngStream rng = root.split("point", i).split(static_cast<std::uint64_t>(j));
            rets[static_cast<std::size_t>(j)] = eval(perturb(theta, opts.sigma, rng));
        }
        prof.mean_returns[i] = mean_of(rets);
        prof.std_returns[i] = rets.size() > 1 ? population_std(rets) : 0.0;
    });

    prof.collapse_threshold =
        opts.collapse_frac * std::min(prof.mean_returns.front(), prof.mean_returns.back());
    prof.collapse_flags.assign(n, false);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        prof.collapse_flags[i] = prof.mean_returns[i] < prof.collapse_threshold;
    }
    return prof;
}

double btp(const InterpolationProfile& profile, double threshold_frac) {
    const std::size_t n = profile.mean_returns.size();
    if (n < 3) return 0.0;  // no interior points
    const double threshold =
        threshold_frac * std::min(profile.mean_returns.front(), profile.mean_returns.back());
    std::size_t below = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (profile.mean_returns[i] < threshold) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(n - 2);
}

StratifiedEstimate stratified_bootstrap_mean(
    const std::map<std::string, std::vector<double>>& groups, int n_boot, RngStream rng) {
    if (groups.empty()) throw std::invalid_argument("stratified_bootstrap_mean: no groups");
    if (n_boot < 1) throw std::invalid_argument("stratified_bootstrap_mean: n_boot must be >= 1");
    for (const auto& [name, values] : groups) {
        if (values.empty()) {
            throw std::invalid_argument("stratified_bootstrap_mean: empty group " + name);
        }
    }

    StratifiedEstimate est;
    double acc = 0.0;
    for (const auto& [name, values] : groups) {
        const double m = mean_of(values);
        est.group_means[name] = m;
        acc += m;
    }
    est.estimate = acc / static_cast<double>(groups.size());

    std::vector<double> replicates(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) {
        RngStream brng = rng.split("replicate", static_cast<std::uint64_t>(b));
        double racc = 0.0;
        std::size_t g = 0;
        for (const auto& [name, values] : groups) {
            RngStream grng = brng.split(g++);
            double gacc = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                gacc += values[grng.uniform_index(values.size())];
            }
            racc += gacc / static_cast<double>(values.size());
        }
        replicates[static_cast<std::size_t>(b)] = racc / static_cast<double>(groups.size());
    }
    std::sort(replicates.begin(), replicates.end());
    est.ci_lo = sorted_quantile(replicates, 0.025);
    est.ci_hi = sorted_quantile(replicates, 0.975);
    return est;
}

BtpReport aggregate_btp(const std::map<std::string, std::vector<double>>& same_run_by_env,
                        const std::map<std::string, std::vector<double>>& diff_run_by_env,
                        int n_boot, std::uint64_t seed) {
    BtpReport report;
    report.n_boot = n_boot;
    RngStream root(seed);
    report.same_run = stratified_bootstrap_mean(same_run_by_env, n_boot, root.split("same-run"));
    report.diff_run = stratified_bootstrap_mean(diff_run_by_env, n_boot, root.split("diff-run"));
    return report;
}

}  // namespace rlscape
