#include "rlscape/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rlscape/connectivity.hpp"
#include "rlscape/env.hpp"
#include "rlscape/failure.hpp"
#include "rlscape/io/checkpoint.hpp"
#include "rlscape/io/config.hpp"
#include "rlscape/io/csv.hpp"
#include "rlscape/io/format.hpp"
#include "rlscape/io/svg.hpp"
#include "rlscape/landscape.hpp"
#include "rlscape/learner.hpp"
#include "rlscape/purd.hpp"
#include "rlscape/stabilizer.hpp"
#include "rlscape/stats.hpp"

namespace rlscape {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Option plumbing: every subcommand reads an optional config file, then
// explicit flags overwrite config keys, so flags > file > built-in defaults.
// ---------------------------------------------------------------------------

struct CommonArgs {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> env_name;
    std::optional<std::string> out_dir;
    std::vector<std::string> ckpts;
};

void add_common_options(CLI::App* cmd, CommonArgs& a, bool with_ckpt) {
    cmd->add_option("--config", a.config_path, "configuration file (key = value with [sections])");
    cmd->add_option("--seed", a.seed, "experiment seed (config key: seed)");
    cmd->add_option("--env", a.env_name, "environment name (config key: env)");
    cmd->add_option("--out", a.out_dir, "output directory (config key: out)");
    if (with_ckpt) cmd->add_option("--ckpt", a.ckpts, "checkpoint file (repeatable)");
}

Config base_config(const CommonArgs& a) {
    Config cfg = a.config_path ? Config::load_file(*a.config_path) : Config();
    if (a.seed) cfg.set_u64("seed", *a.seed);
    if (a.env_name) cfg.set("env", *a.env_name);
    if (a.out_dir) cfg.set("out", *a.out_dir);
    return cfg;
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    std::string cell;
    std::istringstream in(text);
    while (std::getline(in, cell, ',')) out.push_back(parse_double(cell));
    return out;
}

// Overrides the initial-state box of an environment from config keys (a
// "variant", e.g. starts placed near a termination boundary).
EnvSpec apply_env_overrides(EnvSpec env, const Config& cfg) {
    bool variant = false;
    if (cfg.has("env.init_ref")) {
        env.init_ref = parse_vector(cfg.get_string("env.init_ref"));
        variant = true;
    }
    if (cfg.has("env.init_halfwidth")) {
        env.init_halfwidth = parse_vector(cfg.get_string("env.init_halfwidth"));
        variant = true;
    }
    if (env.init_ref.size() != static_cast<std::size_t>(env.state_dim) ||
        env.init_halfwidth.size() != static_cast<std::size_t>(env.state_dim))
        throw std::invalid_argument("env.init_ref / env.init_halfwidth must have " +
                                    std::to_string(env.state_dim) + " entries");
    if (variant) env.name = cfg.get_string("env.variant_name", env.name + "-variant");
    return env;
}

// Environment from config alone: a builtin by name plus overrides.
EnvSpec resolve_env(const Config& cfg) {
    return apply_env_overrides(env_by_name(cfg.get_string("env", "corridor-walk")), cfg);
}

// Environment for analyzing a checkpoint. An explicit `env` key wins; otherwise
// a full-state checkpoint supplies the exact environment it was trained on
// (including any variant initial-state box), and an actor-only checkpoint's
// environment name must be a builtin.
EnvSpec resolve_env_for(const Config& cfg, const Checkpoint& ckpt) {
    if (cfg.has("env")) return resolve_env(cfg);
    return apply_env_overrides(ckpt.full ? ckpt.full->env : env_by_name(ckpt.env_name), cfg);
}

// Analyses of several checkpoints at once only make sense within one
// environment.
void require_same_env(const std::vector<Checkpoint>& ckpts, const char* cmd) {
    for (const Checkpoint& c : ckpts)
        if (c.env_name != ckpts.front().env_name)
            throw std::invalid_argument(std::string(cmd) + ": checkpoints span environments '" +
                                        ckpts.front().env_name + "' and '" + c.env_name + "'");
}

UpdateFamily resolve_family(const Config& cfg) {
    UpdateFamily fam;
    fam.kind = update_kind_from_name(cfg.get_string("family.kind", "td3-minibatch"));
    fam.sigma = cfg.get_double("family.sigma", 3e-4);
    fam.batch_size = cfg.get_int("family.batch_size", 64);
    fam.lr = cfg.get_double("family.lr", 3e-4);
    return fam;
}

// Wires the bc-minibatch family's teacher and data to a checkpoint; the
// other kinds pass through. The checkpoint must outlive the family.
UpdateFamily bind_family(UpdateFamily fam, const Checkpoint& ckpt) {
    if (fam.kind != UpdateKind::BcMinibatch) return fam;
    if (!ckpt.full)
        throw std::invalid_argument(
            "the bc-minibatch family needs a checkpoint with full learner state (its replay "
            "buffer provides the cloning states)");
    fam.bc_teacher = &ckpt.actor;
    fam.bc_data = &ckpt.full->buffer;
    return fam;
}

Td3Config resolve_td3_config(const Config& cfg) {
    Td3Config c;
    c.total_steps = cfg.get_i64("train.total_steps", c.total_steps);
    c.warmup_steps = cfg.get_i64("train.warmup_steps", c.warmup_steps);
    c.batch_size = cfg.get_int("train.batch_size", c.batch_size);
    c.buffer_capacity =
        static_cast<std::size_t>(cfg.get_u64("train.buffer_capacity", c.buffer_capacity));
    c.discount = cfg.get_double("train.discount", c.discount);
    c.adam.lr = cfg.get_double("train.lr", c.adam.lr);
    c.adam.beta1 = cfg.get_double("train.beta1", c.adam.beta1);
    c.adam.beta2 = cfg.get_double("train.beta2", c.adam.beta2);
    c.adam.eps = cfg.get_double("train.eps", c.adam.eps);
    c.tau = cfg.get_double("train.tau", c.tau);
    c.exploration_noise = cfg.get_double("train.exploration_noise", c.exploration_noise);
    c.actor_delay = cfg.get_int("train.actor_delay", c.actor_delay);
    c.policy_noise = cfg.get_double("train.policy_noise", c.policy_noise);
    c.noise_clip = cfg.get_double("train.noise_clip", c.noise_clip);
    c.hidden_units = cfg.get_int("train.hidden_units", c.hidden_units);
    c.hidden_layers = cfg.get_int("train.hidden_layers", c.hidden_layers);
    c.n_checkpoints = cfg.get_int("train.n_checkpoints", c.n_checkpoints);
    return c;
}

std::string out_dir_of(const Config& cfg) {
    const std::string out = cfg.get_string("out", "out");
    fs::create_directories(out);
    return out;
}

// The configuration that identifies the experiment: everything except where
// the results land. Hashes and echoed configs use this, so rerunning the same
// command into a different directory reproduces identical bytes.
Config experiment_config(const Config& cfg) {
    Config exp;
    for (const auto& [key, value] : cfg.entries()) {
        if (key != "out") exp.set(key, value);
    }
    return exp;
}

std::vector<Checkpoint> load_checkpoints(const std::vector<std::string>& paths, std::size_t min_n,
                                         const char* cmd) {
    if (paths.size() < min_n)
        throw std::invalid_argument(std::string(cmd) + ": needs at least " +
                                    std::to_string(min_n) + " --ckpt argument(s)");
    std::vector<Checkpoint> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(load_checkpoint(p));
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string optional_cell(const std::optional<double>& v) {
    return v ? csv_cell(*v) : std::string();
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const Config& cfg) {
    const EnvSpec env = resolve_env(cfg);
    const Td3Config tcfg = resolve_td3_config(cfg);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const bool full_state = cfg.get_bool("train.full_state", true);
    const std::string out = out_dir_of(cfg);
    fs::create_directories(out + "/checkpoints");

    const Config exp = experiment_config(cfg);
    std::vector<double> episode_returns;
    const std::vector<Checkpoint> ckpts =
        td3_train(env, tcfg, seed, full_state, &episode_returns, exp.hash());

    CsvTable episodes;
    episodes.header = {"episode", "return"};
    for (std::size_t i = 0; i < episode_returns.size(); ++i)
        episodes.add_row({csv_cell(i + 1), csv_cell(episode_returns[i])});
    save_csv(out + "/episode_returns.csv", episodes);

    json summary;
    summary["env"] = env.name;
    summary["seed"] = seed;
    summary["config_hash"] = exp.hash();
    summary["total_steps"] = tcfg.total_steps;
    summary["episodes"] = episode_returns.size();
    summary["checkpoints"] = json::array();
    const EnvState start = initial_state(env);
    for (const Checkpoint& c : ckpts) {
        save_checkpoint(out + "/checkpoints/" + c.id() + ".ckpt", c);
        summary["checkpoints"].push_back({{"id", c.id()},
                                          {"step", c.step},
                                          {"file", "checkpoints/" + c.id() + ".ckpt"},
                                          {"return", rollout_return(env, c.actor, start)}});
    }
    write_json(out + "/train_summary.json", summary);
    write_text(out + "/config_used.txt", exp.canonical_text());
    return 0;
}

// ---------------------------------------------------------------------------
// purd
// ---------------------------------------------------------------------------

int cmd_purd(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const std::vector<Checkpoint> ckpts = load_checkpoints(ckpt_paths, 1, "purd");
    require_same_env(ckpts, "purd");
    const EnvSpec env = resolve_env_for(cfg, ckpts.front());
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);

    PurdOptions opts;
    opts.n = cfg.get_int("purd.n", 1000);
    StatsParams sp;
    sp.ltp_alpha = cfg.get_double("purd.ltp_alpha", sp.ltp_alpha);
    sp.cvar_alpha = cfg.get_double("purd.cvar_alpha", sp.cvar_alpha);
    sp.n_boot = cfg.get_int("purd.n_boot", sp.n_boot);
    sp.lower_bound = env.return_lower_bound();

    CsvTable stats;
    stats.header = {"checkpoint_id", "step", "n",    "mean",  "std",   "skewness",
                    "mode",          "ltp",  "cvar", "ci_lo", "ci_hi"};
    CsvTable samples_csv;
    samples_csv.header = {"checkpoint_id", "draw", "return"};

    const RngStream root(seed);
    std::vector<double> means, stds;
    for (std::size_t i = 0; i < ckpts.size(); ++i) {
        const UpdateFamily fam = bind_family(resolve_family(cfg), ckpts[i]);
        const ReturnSampleSet set =
            estimate_purd(ckpts[i], fam, env, root.split("purd", i).seed(), opts);
        const DistStats st = compute_stats(set.samples, sp, root.split("boot", i));
        stats.add_row({ckpts[i].id(), csv_cell(ckpts[i].step), csv_cell(st.n), csv_cell(st.mean),
                       csv_cell(st.std_dev), csv_cell(st.skewness), csv_cell(st.mode),
                       optional_cell(st.ltp), csv_cell(st.cvar),
                       csv_cell(st.bootstrap_mean_ci.first),
                       csv_cell(st.bootstrap_mean_ci.second)});
        for (std::size_t d = 0; d < set.samples.size(); ++d)
            samples_csv.add_row({ckpts[i].id(), csv_cell(d), csv_cell(set.samples[d])});
        means.push_back(st.mean);
        stds.push_back(st.std_dev);

        PlotOptions hist_opt;
        hist_opt.title = "post-update returns " + ckpts[i].id();
        hist_opt.x_label = "return";
        hist_opt.y_label = "count";
        save_svg(out + "/purd_hist_" + ckpts[i].id() + ".svg",
                 svg_histogram(set.samples, 50, hist_opt));
    }
    save_csv(out + "/purd_stats.csv", stats);
    save_csv(out + "/purd_samples.csv", samples_csv);

    PlotOptions sc_opt;
    sc_opt.title = "post-update return spread vs mean";
    sc_opt.x_label = "std of post-update returns";
    sc_opt.y_label = "mean post-update return";
    save_svg(out + "/purd_scatter.svg", svg_scatter(stds, means, sc_opt));
    return 0;
}

// ---------------------------------------------------------------------------
// map
// ---------------------------------------------------------------------------

void write_grid(const std::string& out, const std::string& tag, const LandscapeGrid& grid) {
    CsvTable table;
    table.header = {"alpha_index", "beta_index", "alpha", "beta", "return"};
    for (std::size_t ai = 0; ai < grid.alphas.size(); ++ai) {
        for (std::size_t bi = 0; bi < grid.betas.size(); ++bi) {
            table.add_row({csv_cell(ai), csv_cell(bi), csv_cell(grid.alphas[ai]),
                           csv_cell(grid.betas[bi]), csv_cell(grid.at(ai, bi))});
        }
    }
    save_csv(out + "/map_" + tag + ".csv", table);

    // Rows of the heatmap are beta (drawn bottom-up), columns alpha.
    std::vector<double> cells(grid.alphas.size() * grid.betas.size());
    for (std::size_t bi = 0; bi < grid.betas.size(); ++bi)
        for (std::size_t ai = 0; ai < grid.alphas.size(); ++ai)
            cells[bi * grid.alphas.size() + ai] = grid.at(ai, bi);
    PlotOptions opt;
    opt.title = "return landscape " + tag;
    opt.x_label = "alpha (update direction 1)";
    opt.y_label = "beta (update direction 2)";
    save_svg(out + "/map_" + tag + ".svg",
             svg_heatmap(cells, grid.betas.size(), grid.alphas.size(),
                         {grid.alphas.front(), grid.alphas.back()},
                         {grid.betas.front(), grid.betas.back()}, opt));
}

int cmd_map(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const Checkpoint ckpt = load_checkpoints(ckpt_paths, 1, "map").front();
    const EnvSpec env = resolve_env_for(cfg, ckpt);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);
    const UpdateFamily fam = bind_family(resolve_family(cfg), ckpt);

    const int grid_res = cfg.get_int("map.grid_res", 21);
    const double range = cfg.get_double("map.range", 1.0);
    const int zoom_levels = cfg.get_int("map.zoom_levels", 0);
    const double zoom_factor = cfg.get_double("map.zoom_factor", 0.5);

    LandscapeGrid grid = map_slice(ckpt, fam, grid_res, range, env, seed);
    write_grid(out, ckpt.id(), grid);

    json summary;
    summary["checkpoint"] = ckpt.id();
    summary["grid_res"] = grid_res;
    summary["range"] = range;
    summary["origin_return"] = grid.at(grid.alphas.size() / 2, grid.betas.size() / 2);
    summary["degenerate_dir1"] = grid.degenerate_dir1;
    summary["degenerate_dir2"] = grid.degenerate_dir2;
    summary["zooms"] = json::array();
    for (int z = 1; z <= zoom_levels; ++z) {
        grid = zoom(grid, zoom_factor, env);
        const std::string tag = ckpt.id() + "_zoom" + std::to_string(z);
        write_grid(out, tag, grid);
        summary["zooms"].push_back({{"level", z}, {"halfwidth", grid.halfwidth}});
    }
    write_json(out + "/map_summary.json", summary);
    return 0;
}

// ---------------------------------------------------------------------------
// interpolate
// ---------------------------------------------------------------------------

int cmd_interpolate(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const std::vector<Checkpoint> ckpts = load_checkpoints(ckpt_paths, 2, "interpolate");
    require_same_env(ckpts, "interpolate");
    const EnvSpec env = resolve_env_for(cfg, ckpts.front());
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);

    InterpolationOptions opts;
    opts.n_points = cfg.get_int("interpolate.n_points", opts.n_points);
    opts.sigma = cfg.get_double("interpolate.sigma", opts.sigma);
    opts.n_perturb = cfg.get_int("interpolate.n_perturb", opts.n_perturb);
    opts.collapse_frac = cfg.get_double("interpolate.collapse_frac", opts.collapse_frac);
    const double threshold_frac = cfg.get_double("interpolate.btp_frac", opts.collapse_frac);
    const std::int64_t max_pairs = cfg.get_i64("interpolate.pairs", 0);  // 0 = all adjacent

    const ReturnFn eval = env_return_fn(env);
    const RngStream root(seed);

    CsvTable btp_table;
    btp_table.header = {"pair", "from", "to", "btp", "n_points"};
    json summary;
    summary["pairs"] = json::array();

    std::int64_t n_pairs = static_cast<std::int64_t>(ckpts.size()) - 1;
    if (max_pairs > 0) n_pairs = std::min(n_pairs, max_pairs);
    for (std::int64_t p = 0; p < n_pairs; ++p) {
        const Checkpoint& a = ckpts[static_cast<std::size_t>(p)];
        const Checkpoint& b = ckpts[static_cast<std::size_t>(p) + 1];
        const InterpolationProfile profile =
            interpolate_profile(b.actor, a.actor, opts, eval,
                                root.split("pair", static_cast<std::uint64_t>(p)).seed());
        const double btp_value = btp(profile, threshold_frac);
        const std::string tag = a.id() + "_to_" + b.id();

        CsvTable prof;
        prof.header = {"alpha", "mean_return", "std_return", "collapsed"};
        std::vector<double> lo(profile.alphas.size()), hi(profile.alphas.size());
        for (std::size_t i = 0; i < profile.alphas.size(); ++i) {
            prof.add_row({csv_cell(profile.alphas[i]), csv_cell(profile.mean_returns[i]),
                          csv_cell(profile.std_returns[i]),
                          csv_cell(static_cast<bool>(profile.collapse_flags[i]))});
            lo[i] = profile.mean_returns[i] - profile.std_returns[i];
            hi[i] = profile.mean_returns[i] + profile.std_returns[i];
        }
        save_csv(out + "/interpolate_" + tag + ".csv", prof);

        PlotOptions popt;
        popt.title = "linear interpolation " + tag;
        popt.x_label = "alpha (0 = " + a.id() + ", 1 = " + b.id() + ")";
        popt.y_label = "mean return (band: +-1 std)";
        save_svg(out + "/interpolate_" + tag + ".svg",
                 svg_line_band(profile.alphas, profile.mean_returns, lo, hi, popt));

        btp_table.add_row({csv_cell(p), a.id(), b.id(), csv_cell(btp_value),
                           csv_cell(opts.n_points)});
        summary["pairs"].push_back({{"from", a.id()},
                                    {"to", b.id()},
                                    {"btp", btp_value},
                                    {"collapse_threshold", profile.collapse_threshold}});
    }
    save_csv(out + "/btp.csv", btp_table);
    summary["threshold_frac"] = threshold_frac;
    summary["sigma"] = opts.sigma;
    summary["n_perturb"] = opts.n_perturb;
    write_json(out + "/interpolate_summary.json", summary);
    return 0;
}

// ---------------------------------------------------------------------------
// failures
// ---------------------------------------------------------------------------

int cmd_failures(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const Checkpoint ckpt = load_checkpoints(ckpt_paths, 1, "failures").front();
    const EnvSpec env = resolve_env_for(cfg, ckpt);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);
    const UpdateFamily fam = bind_family(resolve_family(cfg), ckpt);

    PurdOptions opts;
    opts.n = cfg.get_int("failures.n", 1000);
    opts.retain_trajectories = false;

    const std::uint64_t purd_seed = derive_seed(seed, "failures");
    const ReturnSampleSet set = estimate_purd(ckpt, fam, env, purd_seed, opts);
    const TrajectoryFetch fetch = fetch_by_resimulation(ckpt, fam, env, purd_seed, opts);

    json summary;
    summary["checkpoint"] = ckpt.id();
    summary["n"] = opts.n;
    std::string diagnostic;
    const std::optional<FailurePair> pair = select_pair(set, fetch, &diagnostic);
    if (pair) {
        const RaceCurve race = race_curve(pair->successful, pair->failing);
        CsvTable race_csv;
        race_csv.header = {"t", "successful_cumulative", "failing_cumulative"};
        for (std::size_t t = 0; t < race.points.size(); ++t)
            race_csv.add_row({csv_cell(t + 1), csv_cell(race.points[t].first),
                              csv_cell(race.points[t].second)});
        save_csv(out + "/race.csv", race_csv);

        RaceCurves curves;
        curves.success.emplace_back();
        curves.failure.emplace_back();
        for (std::size_t t = 0; t < race.points.size(); ++t) {
            curves.success.back().push_back({static_cast<double>(t + 1), race.points[t].first});
            curves.failure.back().push_back({static_cast<double>(t + 1), race.points[t].second});
        }
        PlotOptions ropt;
        ropt.title = "cumulative-return race " + ckpt.id();
        ropt.x_label = "step";
        ropt.y_label = "cumulative return";
        save_svg(out + "/race.svg", svg_race(curves, ropt));

        summary["successful_index"] = pair->successful_index;
        summary["failing_index"] = pair->failing_index;
        summary["successful_return"] = set.samples[pair->successful_index];
        summary["failing_return"] = set.samples[pair->failing_index];
    } else {
        summary["pair"] = nullptr;
        summary["diagnostic"] = diagnostic;
    }

    const std::size_t stride = static_cast<std::size_t>(cfg.get_u64("failures.stride", 0));
    if (stride > 0) {
        if (!ckpt.full)
            throw std::invalid_argument(
                "failures: --stride needs a checkpoint with full learner state (the replay "
                "buffer supplies the start states)");
        const int ltp_n = cfg.get_int("failures.ltp_n", 200);
        const std::vector<LtpByState> rows =
            ltp_over_states(ckpt, fam, ckpt.full->buffer, stride, ltp_n, env,
                            derive_seed(seed, "ltp-states"),
                            cfg.get_double("purd.ltp_alpha", 0.5));
        CsvTable table;
        table.header = {"buffer_index", "ltp", "mean_return"};
        for (const LtpByState& r : rows)
            table.add_row({csv_cell(r.buffer_index), optional_cell(r.ltp),
                           csv_cell(r.mean_return)});
        save_csv(out + "/ltp_states.csv", table);
        summary["ltp_states_rows"] = rows.size();
    }
    write_json(out + "/failures_summary.json", summary);
    return 0;
}

// ---------------------------------------------------------------------------
// stabilize
// ---------------------------------------------------------------------------

int cmd_stabilize(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const Checkpoint ckpt = load_checkpoints(ckpt_paths, 1, "stabilize").front();
    const EnvSpec env = resolve_env_for(cfg, ckpt);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);

    RejectionConfig rcfg;
    rcfg.family = bind_family(resolve_family(cfg), ckpt);
    rcfg.cvar_level = cfg.get_double("stabilize.cvar_level", rcfg.cvar_level);
    rcfg.n_mc = cfg.get_int("stabilize.n_mc", rcfg.n_mc);
    rcfg.tolerance = cfg.get_double("stabilize.delta", rcfg.tolerance);
    rcfg.budget = cfg.get_int("stabilize.budget", rcfg.budget);
    rcfg.rejection_enabled = cfg.get_bool("stabilize.rejection", true);
    rcfg.ltp_eval_n = cfg.get_int("stabilize.ltp_n", rcfg.ltp_eval_n);
    rcfg.ltp_alpha = cfg.get_double("purd.ltp_alpha", rcfg.ltp_alpha);

    const StabilizeResult result = stabilize(ckpt, rcfg, env, seed);
    const StabilizationTrace& trace = result.trace;

    save_checkpoint(out + "/stabilized_" + result.stabilized.id() + ".ckpt", result.stabilized);

    CsvTable trace_csv;
    trace_csv.header = {"iteration", "cvar_before", "cvar_after", "accepted"};
    std::vector<double> iters, cb, ca;
    for (const ProposalRecord& rec : trace.proposals) {
        trace_csv.add_row({csv_cell(rec.iteration), csv_cell(rec.cvar_before),
                           csv_cell(rec.cvar_after), csv_cell(rec.accepted)});
        iters.push_back(static_cast<double>(rec.iteration));
        cb.push_back(rec.cvar_before);
        ca.push_back(rec.cvar_after);
    }
    save_csv(out + "/stabilize_trace.csv", trace_csv);

    PlotOptions aopt;
    aopt.title = "proposal CVaR before -> after";
    aopt.x_label = "proposal";
    aopt.y_label = "CVaR of post-update returns";
    save_svg(out + "/stabilize_arrows.svg", svg_arrow_scatter(iters, cb, iters, ca, aopt));

    json summary;
    summary["checkpoint"] = ckpt.id();
    summary["stabilized_checkpoint"] = result.stabilized.id();
    summary["family"] = update_kind_name(trace.family);
    summary["cvar_level"] = trace.cvar_level;
    summary["tolerance"] = trace.tolerance;
    summary["n_mc"] = trace.n_mc;
    summary["budget"] = rcfg.budget;
    summary["rejection_enabled"] = rcfg.rejection_enabled;
    summary["accepted"] = trace.accepted;
    summary["rejected"] = trace.rejected;
    summary["mean_before"] = trace.mean_before;
    summary["mean_after"] = trace.mean_after;
    if (trace.ltp_before) summary["ltp_before"] = *trace.ltp_before;
    if (trace.ltp_after) summary["ltp_after"] = *trace.ltp_after;
    if (const auto red = ltp_reduction(trace)) summary["ltp_reduction"] = *red;
    write_json(out + "/stabilize_summary.json", summary);
    return 0;
}

// ---------------------------------------------------------------------------
// clone
// ---------------------------------------------------------------------------

int cmd_clone(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const Checkpoint teacher = load_checkpoints(ckpt_paths, 1, "clone").front();
    const EnvSpec env = resolve_env_for(cfg, teacher);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);
    if (!teacher.full)
        throw std::invalid_argument(
            "clone: needs a checkpoint with full learner state (its replay buffer provides the "
            "cloning states)");

    BcConfig bcfg;
    bcfg.steps = cfg.get_i64("clone.steps", bcfg.steps);
    bcfg.batch_size = cfg.get_int("clone.batch_size", bcfg.batch_size);
    bcfg.adam.lr = cfg.get_double("clone.lr", bcfg.adam.lr);

    const ParamVector student =
        bc_clone(teacher.actor, teacher.full->buffer, bcfg, derive_seed(seed, "clone"));

    Checkpoint cloned;
    cloned.env_name = teacher.env_name;
    cloned.seed = seed;
    cloned.config_hash = experiment_config(cfg).hash();
    cloned.step = 0;
    cloned.actor = student;
    save_checkpoint(out + "/clone_of_" + teacher.id() + ".ckpt", cloned);

    // Action agreement over a deterministic sample of logged states.
    const ReplayBuffer& buffer = teacher.full->buffer;
    const std::size_t n_eval =
        std::min<std::size_t>(buffer.size(), static_cast<std::size_t>(cfg.get_u64("clone.eval_states", 1000)));
    RngStream eval_rng(derive_seed(seed, "clone-eval"));
    std::vector<std::vector<double>> states;
    states.reserve(n_eval);
    const std::vector<std::size_t> idx = buffer.sample_indices(n_eval, eval_rng);
    for (const std::size_t i : idx) states.push_back(buffer.at_logical(i).s);

    const EnvState start = initial_state(env);
    json summary;
    summary["teacher"] = teacher.id();
    summary["steps"] = bcfg.steps;
    summary["action_error"] = action_error(teacher.actor, student, states);
    summary["teacher_return"] = rollout_return(env, teacher.actor, start);
    summary["student_return"] = rollout_return(env, student, start);
    write_json(out + "/clone_summary.json", summary);
    return 0;
}

// ---------------------------------------------------------------------------
// rank
// ---------------------------------------------------------------------------

int cmd_rank(const Config& cfg, const std::vector<std::string>& ckpt_paths) {
    const std::vector<Checkpoint> ckpts = load_checkpoints(ckpt_paths, 1, "rank");
    require_same_env(ckpts, "rank");
    const EnvSpec env = resolve_env_for(cfg, ckpts.front());
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::string out = out_dir_of(cfg);
    // All checkpoints share one family configuration; bc binds to the first.
    const UpdateFamily fam = bind_family(resolve_family(cfg), ckpts.front());

    const int n = cfg.get_int("rank.n", 64);
    const double alpha = cfg.get_double("rank.alpha", 0.1);
    const std::vector<RankedCheckpoint> ranked = rank_by_cvar(ckpts, fam, n, alpha, env, seed);

    CsvTable table;
    table.header = {"rank", "checkpoint_id", "step", "cvar"};
    json items = json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        table.add_row({csv_cell(i + 1), ranked[i].checkpoint_id, csv_cell(ranked[i].step),
                       csv_cell(ranked[i].cvar)});
        items.push_back({{"rank", i + 1},
                         {"checkpoint_id", ranked[i].checkpoint_id},
                         {"step", ranked[i].step},
                         {"cvar", ranked[i].cvar}});
    }
    save_csv(out + "/rank.csv", table);
    write_json(out + "/rank.json",
               json{{"alpha", alpha}, {"n", n}, {"ranking", std::move(items)}});
    return 0;
}

// ---------------------------------------------------------------------------
// error records
// ---------------------------------------------------------------------------

const char* classify(const std::exception& e) {
    if (dynamic_cast<const CheckpointError*>(&e)) return "checkpoint_error";
    if (dynamic_cast<const TrainingDiverged*>(&e)) return "training_diverged";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
    if (dynamic_cast<const std::logic_error*>(&e)) return "logic_error";
    if (dynamic_cast<const std::runtime_error*>(&e)) return "runtime_error";
    return "error";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"deterministic toolkit for training policies and mapping their return "
                 "landscapes"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd = nullptr;
        CommonArgs args;
        std::function<int(const Config&, const std::vector<std::string>&)> run;
    };
    std::vector<Sub> subs(8);

    // The bound option targets live in this frame; CLI11 writes into them
    // during parse and the dispatch below reads them back out.
    std::optional<std::int64_t> opt_steps, opt_pairs, opt_clone_steps;
    std::optional<int> opt_purd_n, opt_grid_res, opt_zoom_levels, opt_interp_points, opt_fail_n,
        opt_budget, opt_n_mc, opt_rank_n;
    std::optional<double> opt_purd_alpha, opt_range, opt_map_sigma, opt_interp_sigma,
        opt_stab_alpha, opt_delta, opt_rank_alpha;
    std::optional<std::uint64_t> opt_stride;

    // train
    subs[0].cmd = app.add_subcommand("train", "train a policy, writing evenly spaced checkpoints");
    add_common_options(subs[0].cmd, subs[0].args, false);
    subs[0].cmd->add_option("--steps", opt_steps, "total environment steps (train.total_steps)");
    subs[0].run = [](const Config& cfg, const std::vector<std::string>&) { return cmd_train(cfg); };

    // purd
    subs[1].cmd = app.add_subcommand(
        "purd", "post-update return distributions and summary statistics per checkpoint");
    add_common_options(subs[1].cmd, subs[1].args, true);
    subs[1].cmd->add_option("--n", opt_purd_n, "post-update samples per checkpoint (purd.n)");
    subs[1].cmd->add_option("--alpha", opt_purd_alpha, "CVaR level (purd.cvar_alpha)");
    subs[1].run = cmd_purd;

    // map
    subs[2].cmd =
        app.add_subcommand("map", "2D return-landscape slice around a checkpoint, with zooms");
    add_common_options(subs[2].cmd, subs[2].args, true);
    subs[2].cmd->add_option("--grid-res", opt_grid_res, "lattice resolution (map.grid_res)");
    subs[2].cmd->add_option("--range", opt_range, "coordinate halfwidth (map.range)");
    subs[2].cmd->add_option("--zoom-levels", opt_zoom_levels, "zoom stages (map.zoom_levels)");
    subs[2].cmd->add_option("--sigma", opt_map_sigma, "update family scale (family.sigma)");
    subs[2].run = cmd_map;

    // interpolate
    subs[3].cmd = app.add_subcommand(
        "interpolate", "returns along straight lines between checkpoints, with BTP");
    add_common_options(subs[3].cmd, subs[3].args, true);
    subs[3].cmd->add_option("--n", opt_interp_points, "points per segment (interpolate.n_points)");
    subs[3].cmd->add_option("--sigma", opt_interp_sigma,
                            "perturbation scale (interpolate.sigma)");
    subs[3].cmd->add_option("--pairs", opt_pairs, "max adjacent pairs (interpolate.pairs)");
    subs[3].run = cmd_interpolate;

    // failures
    subs[4].cmd = app.add_subcommand(
        "failures", "successful/failing trajectory pair, race curve, left tail over states");
    add_common_options(subs[4].cmd, subs[4].args, true);
    subs[4].cmd->add_option("--n", opt_fail_n, "post-update samples (failures.n)");
    subs[4].cmd->add_option("--stride", opt_stride, "replay-state stride (failures.stride)");
    subs[4].run = cmd_failures;

    // stabilize
    subs[5].cmd = app.add_subcommand(
        "stabilize", "post-update-CVaR rejection loop over training proposals");
    add_common_options(subs[5].cmd, subs[5].args, true);
    subs[5].cmd->add_option("--alpha", opt_stab_alpha, "CVaR level (stabilize.cvar_level)");
    subs[5].cmd->add_option("--delta", opt_delta, "acceptance tolerance (stabilize.delta)");
    subs[5].cmd->add_option("--budget", opt_budget, "proposal budget (stabilize.budget)");
    subs[5].cmd->add_option("--n", opt_n_mc, "CVaR samples per side (stabilize.n_mc)");
    subs[5].run = cmd_stabilize;

    // clone
    subs[6].cmd = app.add_subcommand(
        "clone", "behavior-clone a checkpoint's policy from its replay states");
    add_common_options(subs[6].cmd, subs[6].args, true);
    subs[6].cmd->add_option("--steps", opt_clone_steps, "gradient steps (clone.steps)");
    subs[6].run = cmd_clone;

    // rank
    subs[7].cmd = app.add_subcommand("rank", "order checkpoints by post-update-return CVaR");
    add_common_options(subs[7].cmd, subs[7].args, true);
    subs[7].cmd->add_option("--n", opt_rank_n, "post-update samples (rank.n)");
    subs[7].cmd->add_option("--alpha", opt_rank_alpha, "CVaR level (rank.alpha)");
    subs[7].run = cmd_rank;

    std::vector<std::string> argv_like = args;
    std::string command = "(none)";
    try {
        try {
            // CLI11 consumes arguments in reverse.
            std::reverse(argv_like.begin(), argv_like.end());
            app.parse(argv_like);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
            throw std::invalid_argument(std::string("argument error: ") + e.what());
        }
        for (Sub& sub : subs) {
            if (!sub.cmd->parsed()) continue;
            command = sub.cmd->get_name();
            Config cfg = base_config(sub.args);
            // Per-subcommand numeric overrides land on their config keys so
            // the config hash reflects the effective parameters.
            if (command == "train" && opt_steps) cfg.set_i64("train.total_steps", *opt_steps);
            if (command == "purd") {
                if (opt_purd_n) cfg.set_i64("purd.n", *opt_purd_n);
                if (opt_purd_alpha) cfg.set_double("purd.cvar_alpha", *opt_purd_alpha);
            }
            if (command == "map") {
                if (opt_grid_res) cfg.set_i64("map.grid_res", *opt_grid_res);
                if (opt_range) cfg.set_double("map.range", *opt_range);
                if (opt_zoom_levels) cfg.set_i64("map.zoom_levels", *opt_zoom_levels);
                if (opt_map_sigma) cfg.set_double("family.sigma", *opt_map_sigma);
            }
            if (command == "interpolate") {
                if (opt_interp_points) cfg.set_i64("interpolate.n_points", *opt_interp_points);
                if (opt_interp_sigma) cfg.set_double("interpolate.sigma", *opt_interp_sigma);
                if (opt_pairs) cfg.set_i64("interpolate.pairs", *opt_pairs);
            }
            if (command == "failures") {
                if (opt_fail_n) cfg.set_i64("failures.n", *opt_fail_n);
                if (opt_stride) cfg.set_u64("failures.stride", *opt_stride);
            }
            if (command == "stabilize") {
                if (opt_stab_alpha) cfg.set_double("stabilize.cvar_level", *opt_stab_alpha);
                if (opt_delta) cfg.set_double("stabilize.delta", *opt_delta);
                if (opt_budget) cfg.set_i64("stabilize.budget", *opt_budget);
                if (opt_n_mc) cfg.set_i64("stabilize.n_mc", *opt_n_mc);
            }
            if (command == "clone" && opt_clone_steps)
                cfg.set_i64("clone.steps", *opt_clone_steps);
            if (command == "rank") {
                if (opt_rank_n) cfg.set_i64("rank.n", *opt_rank_n);
                if (opt_rank_alpha) cfg.set_double("rank.alpha", *opt_rank_alpha);
            }
            return sub.run(cfg, sub.args.ckpts);
        }
        throw std::logic_error("no subcommand parsed");
    } catch (const std::exception& e) {
        const json record{
            {"error", {{"command", command}, {"type", classify(e)}, {"message", e.what()}}}};
        std::cerr << record.dump() << "\n";
        return 1;
    }
}

}  // namespace rlscape
