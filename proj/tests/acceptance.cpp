// Acceptance gate: nine end-to-end checks, each printing one [PASS]/[FAIL]
// line. Run with a criterion number (1-9) to check one of them, with no
// arguments to check all, or with --write-golden to regenerate the emitter
// fixtures under the golden directory. Exits nonzero when any selected
// criterion fails. Tolerances are pinned next to each check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlscape/cli.hpp"
#include "rlscape/connectivity.hpp"
#include "rlscape/env.hpp"
#include "rlscape/failure.hpp"
#include "rlscape/io/checkpoint.hpp"
#include "rlscape/io/csv.hpp"
#include "rlscape/io/svg.hpp"
#include "rlscape/landscape.hpp"
#include "rlscape/learner.hpp"
#include "rlscape/policy.hpp"
#include "rlscape/purd.hpp"
#include "rlscape/rng.hpp"
#include "rlscape/rollout.hpp"
#include "rlscape/stabilizer.hpp"
#include "rlscape/stats.hpp"

namespace {

using namespace rlscape;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// plumbing

bool expect(bool ok, const std::string& what) {
    if (!ok) std::printf("  failed: %s\n", what.c_str());
    return ok;
}

fs::path acc_tmp() { return fs::path(RLSCAPE_ACCEPT_TMP_DIR); }
fs::path golden_root() { return fs::path(RLSCAPE_GOLDEN_DIR); }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = acc_tmp() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Sorted relative paths of every regular file under root.
std::vector<std::string> tree_files(const fs::path& root) {
    std::vector<std::string> rel;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            rel.push_back(fs::relative(entry.path(), root).generic_string());
        }
    }
    std::sort(rel.begin(), rel.end());
    return rel;
}

// Byte-identical directory trees: same file sets, same contents.
bool trees_identical(const fs::path& a, const fs::path& b, std::string* detail) {
    const std::vector<std::string> fa = tree_files(a);
    const std::vector<std::string> fb = tree_files(b);
    if (fa != fb) {
        *detail = "file sets differ (" + std::to_string(fa.size()) + " vs " +
                  std::to_string(fb.size()) + " files)";
        return false;
    }
    for (const std::string& rel : fa) {
        if (read_bytes(a / rel) != read_bytes(b / rel)) {
            *detail = "bytes differ: " + rel;
            return false;
        }
    }
    return true;
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// ---------------------------------------------------------------------------
// criterion 1: every subcommand, run twice with the same configuration and
// seed into different output directories, produces byte-identical trees.

const char kCommonConfig[] =
    "env = corridor-walk\n"
    "seed = 11\n"
    "[train]\n"
    "total_steps = 1500\n"
    "n_checkpoints = 2\n"
    "warmup_steps = 200\n"
    "buffer_capacity = 4000\n"
    "hidden_units = 16\n"
    "hidden_layers = 1\n"
    "[purd]\n"
    "n = 40\n"
    "[map]\n"
    "grid_res = 7\n"
    "zoom_levels = 1\n"
    "[interpolate]\n"
    "n_points = 15\n"
    "[failures]\n"
    "n = 40\n"
    "stride = 500\n"
    "ltp_n = 60\n"
    "[stabilize]\n"
    "budget = 5\n"
    "n_mc = 8\n"
    "ltp_n = 60\n"
    "[clone]\n"
    "steps = 200\n"
    "eval_states = 50\n"
    "[rank]\n"
    "n = 30\n";

bool criterion_1() {
    bool ok = true;
    const fs::path root = fresh_dir("c1");
    const fs::path cfg = root / "common.cfg";
    write_text_file(cfg, kCommonConfig);

    // The training pair doubles as the checkpoint source for the rest.
    const fs::path train_a = root / "train_a";
    const fs::path train_b = root / "train_b";
    for (const fs::path& out : {train_a, train_b}) {
        const int rc = run_cli({"train", "--config", cfg.string(), "--out", out.string()});
        ok &= expect(rc == 0, "train exited with code " + std::to_string(rc));
    }
    std::string detail;
    ok &= expect(trees_identical(train_a, train_b, &detail), "train reruns: " + detail);

    const std::string ck_early = (train_a / "checkpoints" / "s11-k375.ckpt").string();
    const std::string ck_late = (train_a / "checkpoints" / "s11-k1125.ckpt").string();
    ok &= expect(fs::exists(ck_early) && fs::exists(ck_late),
                 "expected checkpoints s11-k375 and s11-k1125");
    if (!ok) return false;

    struct SubRun {
        const char* name;
        std::vector<std::string> extra;
    };
    const std::vector<SubRun> runs = {
        {"purd", {"--ckpt", ck_late}},
        {"map", {"--ckpt", ck_late}},
        {"interpolate", {"--ckpt", ck_early, "--ckpt", ck_late}},
        {"failures", {"--ckpt", ck_late}},
        {"stabilize", {"--ckpt", ck_late}},
        {"clone", {"--ckpt", ck_late}},
        {"rank", {"--ckpt", ck_early, "--ckpt", ck_late}},
    };
    for (const SubRun& sub : runs) {
        const fs::path out_a = root / (std::string(sub.name) + "_a");
        const fs::path out_b = root / (std::string(sub.name) + "_b");
        for (const fs::path& out : {out_a, out_b}) {
            std::vector<std::string> args = {sub.name, "--config", cfg.string()};
            args.insert(args.end(), sub.extra.begin(), sub.extra.end());
            args.insert(args.end(), {"--out", out.string()});
            const int rc = run_cli(args);
            ok &= expect(rc == 0,
                         std::string(sub.name) + " exited with code " + std::to_string(rc));
        }
        if (!ok) return false;
        ok &= expect(trees_identical(out_a, out_b, &detail),
                     std::string(sub.name) + " reruns: " + detail);
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 2: analytic gradients of both checked losses match central
// finite differences at 120 random points each.

bool criterion_2() {
    constexpr double kTol = 1e-4;
    constexpr int kPoints = 120;
    bool ok = true;

    MlpShape bc_shape;
    bc_shape.input_dim = 4;
    bc_shape.output_dim = 2;
    bc_shape.hidden = {16, 16};
    bc_shape.output = OutputKind::TanhScaled;
    bc_shape.output_scale = 2.0;
    const double bc_err = gradient_check(bc_shape, CheckedLoss::BcMse, kPoints, 901);
    std::printf("  bc-mse max relative error: %.3g\n", bc_err);
    ok &= expect(bc_err <= kTol, "bc-mse gradient error above 1e-4");

    MlpShape actor_shape;
    actor_shape.input_dim = 3;
    actor_shape.output_dim = 1;
    actor_shape.hidden = {8, 8};
    actor_shape.output = OutputKind::TanhScaled;
    actor_shape.output_scale = 1.0;
    const double actor_err = gradient_check(actor_shape, CheckedLoss::Td3Actor, kPoints, 902);
    std::printf("  actor-objective max relative error: %.3g\n", actor_err);
    ok &= expect(actor_err <= kTol, "actor-objective gradient error above 1e-4");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 3: tail statistics agree exactly with brute-force oracles on 50
// randomized sample sets, and std/skewness match closed forms to 1e-12.

double naive_cvar(std::vector<double> xs, double alpha) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    std::size_t k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += xs[i];
    return acc / static_cast<double>(k);
}

// Histogram mode over 100 equal bins of [min, max], midpoint of the first
// most-populated bin.
double naive_mode(const std::vector<double>& xs) {
    double lo = xs[0], hi = xs[0];
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (lo == hi) return lo;
    const int bins = 100;
    const double width = (hi - lo) / bins;
    std::vector<int> counts(bins, 0);
    for (double x : xs) {
        int b = static_cast<int>((x - lo) / width);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++counts[b];
    }
    int best = 0;
    for (int b = 1; b < bins; ++b) {
        if (counts[b] > counts[best]) best = b;
    }
    return lo + (best + 0.5) * width;
}

double naive_ltp(const std::vector<double>& xs, double alpha, double lower_bound) {
    const double threshold = alpha * naive_mode(xs);
    std::size_t count = 0;
    for (double x : xs) {
        if (x >= lower_bound && x < threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(xs.size());
}

std::vector<double> random_sample_set(int kind, std::size_t n, RngStream& rng) {
    std::vector<double> xs(n);
    for (double& x : xs) {
        switch (kind) {
            case 0:  // uniform
                x = rng.uniform(0.0, 100.0);
                break;
            case 1:  // bimodal: a narrow bulk and a low cluster
                x = rng.uniform01() < 0.85 ? rng.uniform(70.0, 90.0) : rng.uniform(0.0, 20.0);
                break;
            default:  // heavily tied lattice values
                x = static_cast<double>(rng.uniform_index(12)) * 7.5;
                break;
        }
    }
    return xs;
}

bool criterion_3() {
    constexpr double kClosedFormTol = 1e-12;
    const double alphas[] = {0.05, 0.1, 0.25, 0.5, 1.0};
    bool ok = true;
    RngStream rng(13579);
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform_index(1996));
        const std::vector<double> xs = random_sample_set(i % 3, n, rng);
        const double alpha = alphas[i % 5];
        const std::string tag = "set " + std::to_string(i) + " (n=" + std::to_string(n) + ")";
        ok &= expect(cvar(xs, alpha) == naive_cvar(xs, alpha), tag + ": cvar mismatch");
        ok &= expect(chernoff_mode(xs) == naive_mode(xs), tag + ": mode mismatch");
        const std::optional<double> ltp = left_tail_probability(xs, 0.5, 0.0);
        ok &= expect(ltp.has_value() && *ltp == naive_ltp(xs, 0.5, 0.0), tag + ": ltp mismatch");
        if (!ok) return false;
    }

    const std::vector<double> sym = {-1.0, 0.0, 1.0};
    const std::vector<double> bern = {0.0, 0.0, 0.0, 1.0};
    ok &= expect(std::fabs(population_std(sym) - std::sqrt(2.0 / 3.0)) <= kClosedFormTol,
                 "std closed form on {-1,0,1}");
    ok &= expect(std::fabs(skewness_g1(sym) - 0.0) <= kClosedFormTol,
                 "skewness closed form on {-1,0,1}");
    ok &= expect(std::fabs(population_std(bern) - std::sqrt(3.0) / 4.0) <= kClosedFormTol,
                 "std closed form on {0,0,0,1}");
    ok &= expect(std::fabs(skewness_g1(bern) - 2.0 / std::sqrt(3.0)) <= kClosedFormTol,
                 "skewness closed form on {0,0,0,1}");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 4: distribution and stabilizer invariants.

bool check_cvar_monotone(RngStream& rng) {
    const double grid[] = {0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0};
    for (int i = 0; i < 25; ++i) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform_index(396));
        const std::vector<double> xs = random_sample_set(i % 3, n, rng);
        double prev = cvar(xs, grid[0]);
        for (std::size_t j = 1; j < std::size(grid); ++j) {
            const double cur = cvar(xs, grid[j]);
            if (cur < prev) return false;
            prev = cur;
        }
        const double full = cvar(xs, 1.0);
        const double mu = mean_of(xs);
        if (std::fabs(full - mu) > 1e-9 * (1.0 + std::fabs(mu))) return false;
    }
    return true;
}

bool check_ltp_scale_invariance(RngStream& rng) {
    for (int i = 0; i < 25; ++i) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform_index(396));
        const std::vector<double> xs = random_sample_set(i % 3, n, rng);
        const std::optional<double> base = left_tail_probability(xs, 0.5, 0.0);
        for (double c : {0.5, 2.0, 1024.0}) {  // binary scales keep arithmetic exact
            std::vector<double> scaled(xs);
            for (double& x : scaled) x *= c;
            if (left_tail_probability(scaled, 0.5, 0.0) != base) return false;
        }
    }
    return true;
}

bool check_mode_shift_equivariance(RngStream& rng) {
    for (int i = 0; i < 25; ++i) {
        const std::size_t n = 6 + static_cast<std::size_t>(rng.uniform_index(395));
        // Dyadic samples anchored at zero keep every histogram quantity exact.
        std::vector<double> xs(n);
        for (double& x : xs) x = static_cast<double>(rng.uniform_index(801)) / 8.0;
        xs[0] = 0.0;
        const double base = chernoff_mode(xs);
        for (double s : {0.25, 4.0, 32.0}) {
            std::vector<double> shifted(xs);
            for (double& x : shifted) x += s;
            if (chernoff_mode(shifted) != base + s) return false;
        }
    }
    return true;
}

bool check_race_padding() {
    Trajectory successful;
    successful.rewards = {1.0, 1.0, 1.0};
    Trajectory failing;
    failing.rewards = {1.0};
    failing.terminated_at = 0;
    const RaceCurve curve = race_curve(successful, failing);
    const std::vector<std::pair<double, double>> want = {{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}};
    return curve.points == want;
}

bool check_acceptance_rule(RngStream& rng) {
    const double deltas[] = {0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0};
    for (int i = 0; i < 200; ++i) {
        const double before = rng.uniform(0.0, 100.0);
        const double after = before * rng.uniform(0.0, 1.2);
        bool prev = false;
        for (double d : deltas) {
            const bool acc = accept_update(before, after, d);
            if (prev && !acc) return false;  // raising the tolerance revoked an accept
            prev = acc;
        }
        // Exactly at the boundary the update must be accepted.
        for (double d : {0.0, 0.05, 0.3}) {
            if (!accept_update(before, (1.0 - d) * before, d)) return false;
        }
    }
    if (!accept_update(0.0, 0.0, 0.0)) return false;
    if (accept_update(100.0, 94.0, 0.05)) return false;
    return true;
}

// A proposal family that always damages the policy: behavior cloning toward
// a constant-torque saboteur with a large step size. Every proposal must be
// rejected and the stabilized checkpoint must equal the input byte for byte.
bool check_forced_rejection_revert() {
    const EnvSpec& env = env_by_name("pendulum-balance");
    Td3Config tc;
    tc.warmup_steps = 300;
    tc.batch_size = 16;
    tc.buffer_capacity = 2000;
    tc.hidden_units = 8;
    tc.hidden_layers = 1;
    Td3State st = td3_init(env, tc, 4);
    td3_continue(st, 300);  // log replay states for the cloning minibatches

    MlpShape lin;
    lin.input_dim = env.state_dim;
    lin.output_dim = env.action_dim;
    lin.output = OutputKind::TanhScaled;
    lin.output_scale = env.action_bound;
    ParamVector balancer;
    balancer.shape = lin;
    balancer.values = {-1.2, -4.0 / 15.0, 0.0};  // proportional-derivative gains
    ParamVector saboteur;
    saboteur.shape = lin;
    saboteur.values = {0.0, 0.0, 5.0};  // constant near-full torque
    st.actor = balancer;
    st.target_actor = balancer;
    st.actor_opt = AdamState::zeros(balancer.values.size());
    const Checkpoint ckpt = make_checkpoint(st, true, 0);

    RejectionConfig cfg;
    cfg.family.kind = UpdateKind::BcMinibatch;
    cfg.family.batch_size = 32;
    cfg.family.lr = 0.3;
    cfg.family.bc_teacher = &saboteur;
    cfg.family.bc_data = &ckpt.full->buffer;
    cfg.tolerance = 0.0;
    cfg.budget = 8;
    cfg.n_mc = 8;
    cfg.ltp_eval_n = 50;
    const StabilizeResult res = stabilize(ckpt, cfg, env, 44);
    if (res.trace.rejected != cfg.budget || res.trace.accepted != 0) return false;
    return serialize_checkpoint(res.stabilized) == serialize_checkpoint(ckpt);
}

bool criterion_4() {
    bool ok = true;
    RngStream rng(24680);
    ok &= expect(check_cvar_monotone(rng), "cvar monotone in alpha / equals mean at alpha 1");
    ok &= expect(check_ltp_scale_invariance(rng), "ltp invariant under positive rescaling");
    ok &= expect(check_mode_shift_equivariance(rng), "mode equivariant under shifts");
    ok &= expect(check_race_padding(), "race curve pads terminated episodes");
    ok &= expect(check_acceptance_rule(rng), "acceptance monotone in tolerance with boundary");
    ok &= expect(check_forced_rejection_revert(), "forced rejection reverts bytes");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 5: linear interpolation separates two synthetic quadratic
// basins: zero below-threshold proportion within a basin, above 0.5 across.

ParamVector basin_endpoint(int sign, RngStream rng) {
    MlpShape shape;
    shape.input_dim = 2;
    shape.output_dim = 2;
    shape.output = OutputKind::Linear;  // six parameters
    ParamVector p;
    p.shape = shape;
    p.values.assign(6, 0.0);
    std::vector<double> g(6);
    double norm = 0.0;
    for (double& x : g) {
        x = rng.normal();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < 6; ++i) p.values[i] = 0.1 * g[i] / norm;
    p.values[0] += sign;  // basin centers at (+1, 0, ...) and (-1, 0, ...)
    return p;
}

bool criterion_5() {
    constexpr double kBasinHeight = 0.04;
    const ReturnFn two_basin = [&](const ParamVector& p) {
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double c = i == 0 ? 1.0 : 0.0;
            d1 += (p[i] - c) * (p[i] - c);
            d2 += (p[i] + c) * (p[i] + c);
        }
        return std::max(0.0, kBasinHeight - d1) + std::max(0.0, kBasinHeight - d2);
    };
    InterpolationOptions opts;
    opts.n_points = 21;
    opts.sigma = 0.0;
    opts.n_perturb = 1;

    RngStream root(17);
    std::map<std::string, std::vector<double>> same, cross;
    for (int i = 0; i < 20; ++i) {
        const int sign = i < 10 ? 1 : -1;
        const ParamVector a = basin_endpoint(sign, root.split("same-a", i));
        const ParamVector b = basin_endpoint(sign, root.split("same-b", i));
        same["two-basin"].push_back(btp(interpolate_profile(a, b, opts, two_basin, 100 + i), 0.1));
    }
    for (int i = 0; i < 20; ++i) {
        const ParamVector a = basin_endpoint(1, root.split("cross-a", i));
        const ParamVector b = basin_endpoint(-1, root.split("cross-b", i));
        cross["two-basin"].push_back(
            btp(interpolate_profile(a, b, opts, two_basin, 200 + i), 0.1));
    }
    const BtpReport report = aggregate_btp(same, cross, 500, 5);
    std::printf("  same-basin btp=%.4f [%.4f, %.4f], cross-basin btp=%.4f [%.4f, %.4f]\n",
                report.same_run.estimate, report.same_run.ci_lo, report.same_run.ci_hi,
                report.diff_run.estimate, report.diff_run.ci_lo, report.diff_run.ci_hi);
    bool ok = true;
    ok &= expect(report.same_run.estimate == 0.0, "same-basin aggregate btp not zero");
    ok &= expect(report.diff_run.estimate > 0.5, "cross-basin aggregate btp not above 0.5");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 6: a 200k-step pendulum-balance training run beats the mean
// return of 1000 random policies by five of their standard deviations.

bool criterion_6() {
    const EnvSpec& env = env_by_name("pendulum-balance");
    const fs::path out = fresh_dir("c6");
    const int rc = run_cli({"train", "--env", "pendulum-balance", "--seed", "1", "--steps",
                            "200000", "--out", out.string()});
    bool ok = expect(rc == 0, "train exited with code " + std::to_string(rc));
    if (!ok) return false;

    const Checkpoint final_ckpt =
        load_checkpoint((out / "checkpoints" / "s1-k190000.ckpt").string());
    const EnvState start = initial_state(env);
    const double trained = rollout_return(env, final_ckpt.actor, start);

    MlpShape shape;
    shape.input_dim = env.state_dim;
    shape.output_dim = env.action_dim;
    shape.hidden = {32, 32};  // matches the trained architecture
    shape.output = OutputKind::TanhScaled;
    shape.output_scale = env.action_bound;
    RngStream root(20260819);
    std::vector<double> returns(1000);
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const ParamVector p = init_params(shape, root.split("net", i));
        returns[i] = rollout_return(env, p, start);
    }
    const double mean = mean_of(returns);
    const double std_dev = population_std(returns);
    const double bar = mean + 5.0 * std_dev;
    std::printf("  trained=%.3f random mean=%.3f std=%.3f bar=%.3f\n", trained, mean, std_dev,
                bar);
    ok &= expect(trained >= bar, "trained return below mean + 5 std of random policies");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 7: across hand-placed checkpoints straddling the corridor-walk
// termination boundary (each with estimated left-tail probability >= 0.02),
// the rejection loop's median left-tail reduction is at least the
// rejection-disabled baseline's, with stratified bootstrap intervals.

Checkpoint place_near_boundary(const Checkpoint& crash, const Checkpoint& survive, double alpha) {
    Td3State st = *survive.full;
    st.actor = lerp(crash.actor, survive.actor, alpha);
    st.target_actor = st.actor;
    st.actor_opt = AdamState::zeros(st.actor.values.size());
    Checkpoint out;
    out.env_name = survive.env_name;
    out.seed = survive.seed;
    out.config_hash = survive.config_hash;
    out.step = survive.step;
    out.actor = st.actor;
    out.full = std::make_shared<const Td3State>(std::move(st));
    return out;
}

bool criterion_7() {
    const EnvSpec& env = env_by_name("corridor-walk");
    const fs::path out = fresh_dir("c7");
    const fs::path cfg = out / "train.cfg";
    write_text_file(cfg,
                    "env = corridor-walk\n"
                    "seed = 2\n"
                    "[train]\n"
                    "total_steps = 60000\n"
                    "n_checkpoints = 40\n");
    const int rc = run_cli({"train", "--config", cfg.string(), "--out", out.string()});
    bool ok = expect(rc == 0, "train exited with code " + std::to_string(rc));
    if (!ok) return false;

    std::vector<Checkpoint> ckpts;
    for (const auto& entry : fs::directory_iterator(out / "checkpoints")) {
        ckpts.push_back(load_checkpoint(entry.path().string()));
    }
    std::sort(ckpts.begin(), ckpts.end(),
              [](const Checkpoint& a, const Checkpoint& b) { return a.step < b.step; });
    const EnvState start = initial_state(env);
    auto ret_of = [&](const ParamVector& p) { return rollout_return(env, p, start); };

    // The last crashing checkpoint right before the run turns into a stable
    // survivor: the segment between the two crosses the termination boundary.
    const Checkpoint* crash = nullptr;
    const Checkpoint* survive = nullptr;
    for (std::size_t i = 0; i + 1 < ckpts.size(); ++i) {
        if (ret_of(ckpts[i].actor) < 200.0 && ret_of(ckpts[i + 1].actor) > 700.0) {
            crash = &ckpts[i];
            survive = &ckpts[i + 1];
            break;
        }
    }
    ok &= expect(crash != nullptr, "no crash-to-survivor transition among checkpoints");
    if (!ok) return false;
    std::printf("  transition %s (%.1f) -> %s (%.1f)\n", crash->id().c_str(),
                ret_of(crash->actor), survive->id().c_str(), ret_of(survive->actor));

    // Bisect the surviving edge along the segment, then place policies a
    // fixed set of depths past it on the crashing side.
    double lo = 0.0, hi = 1.0;  // alpha=0 is the survivor, alpha=1 the crash
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ret_of(lerp(crash->actor, survive->actor, mid)) > 400.0) lo = mid;
        else hi = mid;
    }

    RejectionConfig base;
    base.family.kind = UpdateKind::Td3Minibatch;
    base.family.lr = 1e-2;
    base.family.batch_size = 64;
    base.cvar_level = 0.1;
    base.n_mc = 32;
    base.tolerance = 0.05;
    base.budget = 40;
    base.ltp_eval_n = 1000;
    base.ltp_alpha = 0.5;

    const double depths[] = {0.155, 0.158, 0.161, 0.164, 0.167, 0.170, 0.173, 0.176};
    std::vector<double> red_treated, red_baseline;
    std::map<std::string, std::vector<double>> treated_by_env, baseline_by_env;
    for (std::size_t i = 0; i < std::size(depths); ++i) {
        const Checkpoint placed = place_near_boundary(*crash, *survive, lo + depths[i]);
        RejectionConfig treated = base;
        treated.rejection_enabled = true;
        RejectionConfig control = base;
        control.rejection_enabled = false;
        const std::uint64_t seed = 7000 + i;
        const StabilizeResult rt = stabilize(placed, treated, env, seed);
        const StabilizeResult rb = stabilize(placed, control, env, seed);
        const double before = rt.trace.ltp_before.value_or(0.0);
        ok &= expect(rt.trace.ltp_before == rb.trace.ltp_before,
                     "bracketing evaluations diverged between arms");
        std::printf("  depth %.3f: ltp before=%.4f after treated=%.4f baseline=%.4f%s\n",
                    depths[i], before, rt.trace.ltp_after.value_or(0.0),
                    rb.trace.ltp_after.value_or(0.0), before >= 0.02 ? "" : "  (below gate)");
        if (!rt.trace.ltp_before || before < 0.02) continue;
        red_treated.push_back(before - rt.trace.ltp_after.value_or(0.0));
        red_baseline.push_back(before - rb.trace.ltp_after.value_or(0.0));
        treated_by_env[env.name].push_back(red_treated.back());
        baseline_by_env[env.name].push_back(red_baseline.back());
    }
    std::printf("  qualifying checkpoints: %zu\n", red_treated.size());
    ok &= expect(red_treated.size() >= 5, "fewer than 5 checkpoints passed the 0.02 gate");
    if (!ok) return false;

    const double med_t = median_of(red_treated);
    const double med_b = median_of(red_baseline);
    const LtpReductionReport report =
        ltp_reduction_report(treated_by_env, baseline_by_env, 1000, 5);
    std::printf("  median reduction treated=%.4f baseline=%.4f\n", med_t, med_b);
    std::printf("  stratified bootstrap: treated %.4f [%.4f, %.4f], baseline %.4f [%.4f, %.4f]\n",
                report.treated.estimate, report.treated.ci_lo, report.treated.ci_hi,
                report.baseline.estimate, report.baseline.ci_lo, report.baseline.ci_hi);
    ok &= expect(med_t >= med_b, "treated median reduction below baseline");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 8: the slice's center cell reproduces the checkpoint's return
// bit for bit, and zooming shares bit-identical values at common lattice
// coordinates.

bool criterion_8() {
    const EnvSpec& env = env_by_name("pendulum-balance");
    Td3Config tc;
    tc.total_steps = 800;
    tc.warmup_steps = 200;
    tc.batch_size = 16;
    tc.buffer_capacity = 2000;
    tc.hidden_units = 8;
    tc.hidden_layers = 1;
    tc.n_checkpoints = 1;
    const Checkpoint ckpt = td3_train(env, tc, 21, true).front();

    UpdateFamily fam;
    fam.kind = UpdateKind::Td3Minibatch;
    const LandscapeGrid grid = map_slice(ckpt, fam, 9, 0.05, env, 31);
    bool ok = true;
    ok &= expect(grid.alphas[4] == 0.0 && grid.betas[4] == 0.0, "window center not at (0, 0)");
    const double origin_return = env_return_fn(env)(ckpt.actor);
    ok &= expect(grid.at(4, 4) == origin_return, "center cell differs from the policy's return");

    const LandscapeGrid zoomed = zoom(grid, 0.5, env);
    int shared = 0, equal = 0;
    for (std::size_t ai = 0; ai < zoomed.alphas.size(); ++ai) {
        for (std::size_t bi = 0; bi < zoomed.betas.size(); ++bi) {
            for (std::size_t aj = 0; aj < grid.alphas.size(); ++aj) {
                for (std::size_t bj = 0; bj < grid.betas.size(); ++bj) {
                    if (zoomed.alphas[ai] == grid.alphas[aj] &&
                        zoomed.betas[bi] == grid.betas[bj]) {
                        ++shared;
                        if (zoomed.at(ai, bi) == grid.at(aj, bj)) ++equal;
                    }
                }
            }
        }
    }
    std::printf("  shared lattice cells: %d, bit-identical: %d\n", shared, equal);
    ok &= expect(shared == 25, "expected 25 shared cells after a half-window zoom");
    ok &= expect(equal == shared, "zoomed values differ at shared coordinates");
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 9: the CSV and SVG emitters byte-match checked-in golden
// fixtures.

CsvTable golden_table() {
    CsvTable t;
    t.header = {"id", "note", "value", "flag"};
    t.add_row({"1", "plain", csv_cell(0.1), csv_cell(true)});
    t.add_row({"2", "comma, separated", csv_cell(-1.5e-7), csv_cell(false)});
    t.add_row({"3", "say \"hi\"", csv_cell(2.5851694779399192), csv_cell(true)});
    t.add_row({"4", "line1\nline2", csv_cell(static_cast<std::int64_t>(-4503599627370497LL)),
               csv_cell(false)});
    t.add_row({"5", "", csv_cell(1.0 / 3.0), csv_cell(true)});
    return t;
}

std::string golden_histogram() {
    RngStream rng(7);
    std::vector<double> samples(300);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = i < 240 ? 60.0 + 6.0 * rng.normal() : 12.0 + 2.0 * rng.normal();
    }
    PlotOptions opt;
    opt.title = "post-update returns";
    opt.x_label = "return";
    opt.y_label = "count";
    return svg_histogram(samples, 24, opt);
}

std::string golden_race() {
    RaceCurves curves;
    curves.success = {{{1.0, 1.5}, {2.0, 3.2}, {3.0, 5.0}, {4.0, 6.9}},
                      {{1.0, 1.2}, {2.0, 2.9}, {3.0, 4.8}, {4.0, 6.5}}};
    curves.failure = {{{1.0, 1.4}, {2.0, 2.0}, {3.0, 2.0}, {4.0, 2.0}},
                      {{1.0, 0.9}, {2.0, 1.1}, {3.0, 1.1}, {4.0, 1.1}}};
    PlotOptions opt;
    opt.title = "cumulative return race";
    opt.x_label = "step";
    opt.y_label = "cumulative return";
    return svg_race(curves, opt);
}

struct GoldenFixture {
    const char* file;
    std::string content;
};

std::vector<GoldenFixture> golden_fixtures() {
    return {{"golden_table.csv", to_csv_text(golden_table())},
            {"golden_histogram.svg", golden_histogram()},
            {"golden_race.svg", golden_race()}};
}

bool criterion_9() {
    bool ok = true;
    for (const GoldenFixture& fx : golden_fixtures()) {
        const fs::path path = golden_root() / fx.file;
        if (!fs::exists(path)) {
            ok &= expect(false, std::string(fx.file) + " missing (run --write-golden once)");
            continue;
        }
        ok &= expect(read_bytes(path) == fx.content,
                     std::string(fx.file) + " differs from the emitted bytes");
    }
    return ok;
}

void write_goldens() {
    fs::create_directories(golden_root());
    for (const GoldenFixture& fx : golden_fixtures()) {
        const fs::path path = golden_root() / fx.file;
        write_text_file(path, fx.content);
        std::printf("wrote %s (%zu bytes)\n", path.string().c_str(), fx.content.size());
    }
}

// ---------------------------------------------------------------------------

struct Criterion {
    int num;
    const char* name;
    bool (*run)();
};

const Criterion kCriteria[] = {
    {1, "repeat runs are byte-identical", criterion_1},
    {2, "analytic gradients match finite differences", criterion_2},
    {3, "tail statistics match brute-force oracles", criterion_3},
    {4, "distribution and stabilizer invariants", criterion_4},
    {5, "interpolation separates synthetic basins", criterion_5},
    {6, "training beats the random-policy baseline", criterion_6},
    {7, "rejection matches baseline left-tail reduction", criterion_7},
    {8, "slice anchors and zooms are bit-exact", criterion_8},
    {9, "emitters match golden fixtures", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    if (argc > 1) {
        const std::string arg = argv[1];
        if (arg == "--write-golden") {
            write_goldens();
            return 0;
        }
        selected = std::atoi(arg.c_str());
        if (selected < 1 || selected > 9) {
            std::fprintf(stderr, "usage: %s [1-9 | --write-golden]\n", argv[0]);
            return 2;
        }
    }
    fs::create_directories(acc_tmp());
    bool all_ok = true;
    for (const Criterion& c : kCriteria) {
        if (selected != 0 && c.num != selected) continue;
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            std::printf("  exception: %s\n", e.what());
        }
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", c.num, c.name);
        all_ok &= ok;
    }
    return all_ok ? 0 : 1;
}
