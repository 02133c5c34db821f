#include "rlscape/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rlscape {

namespace {

void require_samples(std::span<const double> xs, std::size_t n_min, const char* who) {
    if (xs.size() < n_min) {
        throw std::invalid_argument(std::string(who) + ": too few samples");
    }
    for (double x : xs) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string(who) + ": non-finite sample");
        }
    }
}

}  // namespace

double mean_of(std::span<const double> xs) {
    require_samples(xs, 1, "mean_of");
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
    require_samples(xs, 2, "population_std");
    const double mu = mean_of(xs);
    double m2 = 0.0;
    for (double x : xs) m2 += (x - mu) * (x - mu);
    m2 /= static_cast<double>(xs.size());
    return std::sqrt(m2);
}

double skewness_g1(std::span<const double> xs) {
    require_samples(xs, 2, "skewness_g1");
    const double mu = mean_of(xs);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : xs) {
        const double d = x - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    const double n = static_cast<double>(xs.size());
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

double chernoff_mode(std::span<const double> xs) {
    require_samples(xs, 1, "chernoff_mode");
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) return lo;

    const double width = (hi - lo) / kModeHistogramBins;
    int counts[kModeHistogramBins] = {0};
    for (double x : xs) {
        int bin = static_cast<int>((x - lo) / width);
        if (bin >= kModeHistogramBins) bin = kModeHistogramBins - 1;  // x == hi
        if (bin < 0) bin = 0;
        ++counts[bin];
    }
    int best = 0;
    for (int b = 1; b < kModeHistogramBins; ++b) {
        if (counts[b] > counts[best]) best = b;  // strict: ties keep the lowest bin
    }
    return lo + (best + 0.5) * width;
}

std::optional<double> left_tail_probability(std::span<const double> xs, double alpha,
                                            double lower_bound) {
    require_samples(xs, 1, "left_tail_probability");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("left_tail_probability: alpha must be positive");
    }
    const double mode = chernoff_mode(xs);
    if (mode <= lower_bound) return std::nullopt;
    const double threshold = alpha * mode;
    std::size_t count = 0;
    for (double x : xs) {
        if (x >= lower_bound && x < threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(xs.size());
}

double cvar(std::span<const double> xs, double alpha) {
    require_samples(xs, 1, "cvar");
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("cvar: alpha must be in (0, 1]");
    }
    const std::size_t n = xs.size();
    std::size_t k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += sorted[i];
    return acc / static_cast<double>(k);
}

double sorted_quantile(std::span<const double> sorted_xs, double q) {
    if (sorted_xs.empty()) throw std::invalid_argument("sorted_quantile: empty");
    if (q <= 0.0) return sorted_xs.front();
    if (q >= 1.0) return sorted_xs.back();
    const double pos = q * static_cast<double>(sorted_xs.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted_xs.size()) return sorted_xs.back();
    return sorted_xs[i] + frac * (sorted_xs[i + 1] - sorted_xs[i]);
}

std::pair<double, double> bootstrap_mean_ci(std::span<const double> xs, int n_boot,
                                            RngStream rng) {
    require_samples(xs, 1, "bootstrap_mean_ci");
    if (n_boot < 1) throw std::invalid_argument("bootstrap_mean_ci: n_boot must be >= 1");
    const std::size_t n = xs.size();
    std::vector<double> means(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) {
        RngStream draw = rng.split(static_cast<std::uint64_t>(b));
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += xs[draw.uniform_index(n)];
        means[static_cast<std::size_t>(b)] = acc / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    return {sorted_quantile(means, 0.025), sorted_quantile(means, 0.975)};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    require_samples(xs, 2, "pearson");
    require_samples(ys, 2, "pearson");
    const double mx = mean_of(xs);
    const double my = mean_of(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::invalid_argument("pearson: zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

DistStats compute_stats(std::span<const double> xs, const StatsParams& params,
                        RngStream boot_rng) {
    require_samples(xs, 2, "compute_stats");
    DistStats st;
    st.n = static_cast<std::int64_t>(xs.size());
    st.mean = mean_of(xs);
    st.std_dev = population_std(xs);
    st.skewness = skewness_g1(xs);
    st.mode = chernoff_mode(xs);
    st.ltp_alpha = params.ltp_alpha;
    st.ltp = left_tail_probability(xs, params.ltp_alpha, params.lower_bound);
    st.cvar_alpha = params.cvar_alpha;
    st.cvar = cvar(xs, params.cvar_alpha);
    st.bootstrap_mean_ci = bootstrap_mean_ci(xs, params.n_boot, boot_rng);
    return st;
}

}  // namespace rlscape
