#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rlscape/connectivity.hpp"
#include "rlscape/policy.hpp"
#include "rlscape/rng.hpp"
#include "rlscape/stats.hpp"

namespace {

using namespace rlscape;

ParamVector two_param_vector(double a, double b) {
    ParamVector p;
    p.shape.input_dim = 1;
    p.shape.output_dim = 1;
    p.shape.hidden = {};
    p.values = {a, b};
    return p;
}

InterpolationOptions raw_profile_options(int n_points) {
    InterpolationOptions opts;
    opts.n_points = n_points;
    opts.sigma = 0.0;
    opts.n_perturb = 1;
    return opts;
}

InterpolationProfile hand_profile(std::vector<double> means) {
    InterpolationProfile prof;
    prof.mean_returns = std::move(means);
    prof.alphas.resize(prof.mean_returns.size());
    for (std::size_t i = 0; i < prof.alphas.size(); ++i) {
        prof.alphas[i] =
            static_cast<double>(i) / static_cast<double>(prof.alphas.size() - 1);
    }
    prof.std_returns.assign(prof.mean_returns.size(), 0.0);
    prof.collapse_flags.assign(prof.mean_returns.size(), false);
    return prof;
}

}  // namespace

TEST_SUITE("connectivity") {
    TEST_CASE("profile endpoints evaluate the endpoint vectors exactly") {
        const auto p1 = two_param_vector(0.8, -0.1);
        const auto p2 = two_param_vector(-0.4, 0.9);
        const auto eval = [](const ParamVector& p) { return 3.0 * p.values[0] - p.values[1]; };
        const auto prof = interpolate_profile(p1, p2, raw_profile_options(9), eval, 1);
        REQUIRE(prof.alphas.size() == 9);
        CHECK(prof.alphas.front() == 0.0);
        CHECK(prof.alphas.back() == 1.0);
        CHECK(prof.mean_returns.front() == eval(p2));  // alpha = 0 is the second argument
        CHECK(prof.mean_returns.back() == eval(p1));
        for (double s : prof.std_returns) CHECK(s == 0.0);
    }

    TEST_CASE("a dyadic grid makes the reversed profile bit-identical") {
        const auto p1 = two_param_vector(1.0, 0.25);
        const auto p2 = two_param_vector(-0.5, 2.0);
        const auto eval = [](const ParamVector& p) {
            return p.values[0] * p.values[0] + 0.3 * p.values[1];
        };
        // n_points 5: alphas i/4 are exact dyadics, so 1 - alpha_i equals
        // alpha_{n-1-i} without rounding and the swap is exact.
        const auto fwd = interpolate_profile(p1, p2, raw_profile_options(5), eval, 3);
        const auto rev = interpolate_profile(p2, p1, raw_profile_options(5), eval, 3);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(fwd.mean_returns[i] == rev.mean_returns[4 - i]);
        }
    }

    TEST_CASE("perturbed profiles are deterministic and spread with sigma") {
        const auto p1 = two_param_vector(1.0, 1.0);
        const auto p2 = two_param_vector(-1.0, -1.0);
        const auto eval = [](const ParamVector& p) { return p.values[0] + p.values[1]; };
        InterpolationOptions opts;
        opts.n_points = 7;
        opts.sigma = 0.2;
        opts.n_perturb = 16;
        const auto a = interpolate_profile(p1, p2, opts, eval, 11);
        const auto b = interpolate_profile(p1, p2, opts, eval, 11);
        CHECK(a.mean_returns == b.mean_returns);
        CHECK(a.std_returns == b.std_returns);
        bool any_spread = false;
        for (double s : a.std_returns) any_spread = any_spread || s > 0.0;
        CHECK(any_spread);
        const auto c = interpolate_profile(p1, p2, opts, eval, 12);
        CHECK(a.mean_returns != c.mean_returns);
    }

    TEST_CASE("option validation") {
        const auto p = two_param_vector(0, 0);
        const auto eval = [](const ParamVector&) { return 0.0; };
        InterpolationOptions bad;
        bad.n_points = 1;
        CHECK_THROWS_AS((void)interpolate_profile(p, p, bad, eval, 1), std::invalid_argument);
        bad = raw_profile_options(5);
        bad.n_perturb = 0;
        CHECK_THROWS_AS((void)interpolate_profile(p, p, bad, eval, 1), std::invalid_argument);
        bad = raw_profile_options(5);
        bad.sigma = -1.0;
        CHECK_THROWS_AS((void)interpolate_profile(p, p, bad, eval, 1), std::invalid_argument);
        ParamVector other;
        other.shape.input_dim = 2;
        other.shape.output_dim = 1;
        other.values = {1, 2, 3};
        CHECK_THROWS_AS((void)interpolate_profile(p, other, raw_profile_options(5), eval, 1),
                        std::invalid_argument);
    }

    TEST_CASE("btp counts interior points only") {
        // Endpoints 10 and 8: threshold = 0.5 * 8 = 4. Interior: 1, 1, 5 ->
        // two of three below.
        const auto prof = hand_profile({10.0, 1.0, 1.0, 5.0, 8.0});
        CHECK(btp(prof, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        // A low endpoint is never counted, even below the threshold.
        const auto edge = hand_profile({0.0, 9.0, 9.0, 9.0, 10.0});
        CHECK(btp(edge, 0.5) == 0.0);
        // No interior points -> 0 by definition.
        CHECK(btp(hand_profile({1.0, 2.0}), 0.5) == 0.0);
        // Everything collapsed.
        CHECK(btp(hand_profile({10.0, 0.0, 0.0, 0.0, 10.0}), 0.5) == 1.0);
    }

    TEST_CASE("collapse flags mirror the documented threshold") {
        const auto p1 = two_param_vector(4.0, 0.0);
        const auto p2 = two_param_vector(8.0, 0.0);
        // Parabola dipping between the endpoints: f = (x - 6)^2.
        const auto eval = [](const ParamVector& p) {
            return (p.values[0] - 6.0) * (p.values[0] - 6.0);
        };
        InterpolationOptions opts = raw_profile_options(9);
        opts.collapse_frac = 0.5;
        const auto prof = interpolate_profile(p1, p2, opts, eval, 1);
        // Endpoint returns are both 4 -> threshold 2.
        CHECK(prof.collapse_threshold == 2.0);
        CHECK_FALSE(prof.collapse_flags.front());
        CHECK_FALSE(prof.collapse_flags.back());
        for (std::size_t i = 1; i + 1 < 9; ++i) {
            CHECK(prof.collapse_flags[i] == (prof.mean_returns[i] < 2.0));
        }
        bool any = false;
        for (bool f : prof.collapse_flags) any = any || f;
        CHECK(any);
    }

    TEST_CASE("stratified bootstrap: two opposite constant groups") {
        const std::map<std::string, std::vector<double>> groups{
            {"a", {0.0, 0.0, 0.0, 0.0}}, {"b", {1.0, 1.0, 1.0, 1.0}}};
        const auto est = stratified_bootstrap_mean(groups, 500, RngStream(1));
        CHECK(est.estimate == 0.5);
        CHECK(est.ci_lo == 0.5);  // resampling constants moves nothing
        CHECK(est.ci_hi == 0.5);
        CHECK(est.group_means.at("a") == 0.0);
        CHECK(est.group_means.at("b") == 1.0);
    }

    TEST_CASE("stratified bootstrap: singleton groups are degenerate points") {
        const std::map<std::string, std::vector<double>> groups{{"x", {0.2}}, {"y", {0.0}}};
        const auto est = stratified_bootstrap_mean(groups, 200, RngStream(2));
        CHECK(est.estimate == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(est.ci_lo == est.estimate);
        CHECK(est.ci_hi == est.estimate);
    }

    TEST_CASE("stratified bootstrap: the interval brackets the estimate") {
        RngStream rng(77);
        std::map<std::string, std::vector<double>> groups;
        for (const char* name : {"env-a", "env-b", "env-c"}) {
            std::vector<double> vals(40);
            for (double& v : vals) v = rng.uniform(0.0, 1.0);
            groups[name] = vals;
        }
        const auto est = stratified_bootstrap_mean(groups, 1000, RngStream(8));
        CHECK(est.ci_lo <= est.estimate);
        CHECK(est.ci_hi >= est.estimate);
        CHECK(est.ci_hi > est.ci_lo);
        // Unweighted mean of group means, not the pooled mean.
        double acc = 0.0;
        for (const auto& [name, vals] : groups) acc += mean_of(vals);
        CHECK(est.estimate == acc / 3.0);
        // Reproducible from the stream.
        const auto again = stratified_bootstrap_mean(groups, 1000, RngStream(8));
        CHECK(again.ci_lo == est.ci_lo);
        CHECK(again.ci_hi == est.ci_hi);
    }

    TEST_CASE("stratified bootstrap input validation") {
        CHECK_THROWS_AS(
            (void)stratified_bootstrap_mean({}, 100, RngStream(1)), std::invalid_argument);
        const std::map<std::string, std::vector<double>> with_empty{{"a", {}}};
        CHECK_THROWS_AS((void)stratified_bootstrap_mean(with_empty, 100, RngStream(1)),
                        std::invalid_argument);
        const std::map<std::string, std::vector<double>> ok{{"a", {1.0}}};
        CHECK_THROWS_AS((void)stratified_bootstrap_mean(ok, 0, RngStream(1)),
                        std::invalid_argument);
    }

    TEST_CASE("aggregate report wires both arms to distinct streams") {
        const std::map<std::string, std::vector<double>> same{{"e", {0.1, 0.2, 0.3, 0.4}}};
        const std::map<std::string, std::vector<double>> diff{{"e", {0.5, 0.6, 0.7, 0.9}}};
        const BtpReport rep = aggregate_btp(same, diff, 400, 55);
        CHECK(rep.n_boot == 400);
        const RngStream root(55);
        const auto s = stratified_bootstrap_mean(same, 400, root.split("same-run"));
        const auto d = stratified_bootstrap_mean(diff, 400, root.split("diff-run"));
        CHECK(rep.same_run.estimate == s.estimate);
        CHECK(rep.same_run.ci_lo == s.ci_lo);
        CHECK(rep.diff_run.ci_hi == d.ci_hi);
        CHECK(rep.diff_run.estimate > rep.same_run.estimate);
    }
}
