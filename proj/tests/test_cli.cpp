#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rlscape/cli.hpp"
#include "rlscape/io/checkpoint.hpp"
#include "rlscape/io/csv.hpp"

namespace {

using namespace rlscape;

std::filesystem::path fresh_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(RLSCAPE_TEST_TMP_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_config(const std::filesystem::path& dir, const std::string& text) {
    const std::filesystem::path path = dir / "run.cfg";
    std::ofstream out(path);
    out << text;
    return path.string();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("train then analyze a checkpoint, all in process") {
        const auto dir = fresh_dir("cli_train");
        const std::string cfg = write_config(dir,
                                             "[train]\n"
                                             "warmup_steps = 40\n"
                                             "batch_size = 16\n"
                                             "buffer_capacity = 500\n"
                                             "hidden_units = 8\n"
                                             "hidden_layers = 1\n"
                                             "n_checkpoints = 2\n"
                                             "[purd]\n"
                                             "n_boot = 60\n");
        const std::string train_out = (dir / "train").string();
        const int rc = run_cli({"train", "--env", "pendulum-balance", "--seed", "5", "--steps",
                                "300", "--config", cfg, "--out", train_out});
        REQUIRE(rc == 0);

        // The run leaves the documented files behind.
        CHECK(std::filesystem::exists(dir / "train" / "episode_returns.csv"));
        CHECK(std::filesystem::exists(dir / "train" / "train_summary.json"));
        CHECK(std::filesystem::exists(dir / "train" / "config_used.txt"));
        const std::string ckpt_path = (dir / "train" / "checkpoints" / "s5-k225.ckpt").string();
        REQUIRE(std::filesystem::exists(ckpt_path));
        const Checkpoint ckpt = load_checkpoint(ckpt_path);
        CHECK(ckpt.step == 225);
        CHECK(ckpt.env_name == "pendulum-balance");

        // Post-update distribution over that checkpoint. The environment is
        // recovered from the checkpoint itself; no --env flag needed.
        const std::string purd_out = (dir / "purd").string();
        const int rc2 = run_cli({"purd", "--ckpt", ckpt_path, "--n", "30", "--seed", "9",
                                 "--config", cfg, "--out", purd_out});
        REQUIRE(rc2 == 0);
        const CsvTable stats = load_csv((dir / "purd" / "purd_stats.csv").string());
        REQUIRE(stats.rows.size() == 1);
        CHECK(stats.rows[0][stats.column("checkpoint_id")] == "s5-k225");
        CHECK(stats.rows[0][stats.column("n")] == "30");
        const CsvTable samples = load_csv((dir / "purd" / "purd_samples.csv").string());
        CHECK(samples.rows.size() == 30);
    }

    TEST_CASE("unknown commands and bad flags fail with exit code 1") {
        CHECK(run_cli({"frobnicate"}) == 1);
        CHECK(run_cli({"train", "--no-such-flag"}) == 1);
        CHECK(run_cli({}) == 1);
        // Analysis without the required checkpoints is a usage error.
        CHECK(run_cli({"purd", "--out", (fresh_dir("cli_err") / "x").string()}) == 1);
    }

    TEST_CASE("help exits cleanly") {
        CHECK(run_cli({"--help"}) == 0);
        CHECK(run_cli({"train", "--help"}) == 0);
    }

    TEST_CASE("a second invocation in the same process is independent") {
        const auto dir = fresh_dir("cli_repeat");
        const std::string cfg = write_config(dir,
                                             "[train]\n"
                                             "warmup_steps = 30\n"
                                             "batch_size = 8\n"
                                             "buffer_capacity = 300\n"
                                             "hidden_units = 6\n"
                                             "hidden_layers = 1\n"
                                             "n_checkpoints = 1\n");
        const std::vector<std::string> args{"train",  "--env", "sticky-ridge", "--seed", "3",
                                            "--steps", "150",  "--config",     cfg};
        REQUIRE(run_cli([&] {
                    auto a = args;
                    a.push_back("--out");
                    a.push_back((dir / "a").string());
                    return a;
                }()) == 0);
        REQUIRE(run_cli([&] {
                    auto a = args;
                    a.push_back("--out");
                    a.push_back((dir / "b").string());
                    return a;
                }()) == 0);
        // Same inputs, same bytes: no state leaks between invocations.
        const auto read_bytes = [](const std::filesystem::path& p) {
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        };
        const std::string ckpt_a = (dir / "a" / "checkpoints" / "s3-k75.ckpt").string();
        const std::string ckpt_b = (dir / "b" / "checkpoints" / "s3-k75.ckpt").string();
        REQUIRE(std::filesystem::exists(ckpt_a));
        CHECK(read_bytes(ckpt_a) == read_bytes(ckpt_b));
        CHECK(read_bytes(dir / "a" / "episode_returns.csv") ==
              read_bytes(dir / "b" / "episode_returns.csv"));
    }
}
