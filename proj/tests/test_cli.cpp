#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "gspr/harness/config_io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(GSPR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("gspr_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_small_config(const fs::path& path) {
  auto cfg = gspr::harness::default_experiment_config();
  cfg.n_train = 80;
  cfg.n_test = 80;
  cfg.equilibrium_grid_n = 300;
  std::ofstream(path) << gspr::harness::to_json(cfg).dump(2);
}

}  // namespace

TEST(Cli, SimulateThenLearn) {
  const auto dir = scratch("learn");
  write_small_config(dir / "cfg.json");
  const std::string common = "--config " + (dir / "cfg.json").string() + " --out " + dir.string();
  ASSERT_EQ(run("simulate " + common), 0);
  EXPECT_TRUE(fs::exists(dir / "train.csv"));
  EXPECT_TRUE(fs::exists(dir / "test.csv.json"));
  EXPECT_EQ(run("learn --method sweep --train " + (dir / "train.csv").string() + " --test " +
                (dir / "test.csv").string() + " --out " + dir.string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "result_sweep.json"));
  EXPECT_TRUE(fs::exists(dir / "timing_sweep.json"));
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const auto dir = scratch("bad");
  std::ofstream(dir / "bad.json") << R"({"auction": {"position_factors": [1.0, 0.45, 1.0]}})";
  EXPECT_EQ(run("table1 --config " + (dir / "bad.json").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run("learn --method sweep --train " + (dir / "missing.csv").string()), 2);
  EXPECT_EQ(run("learn --method nope --train x.csv"), 2);
  EXPECT_EQ(run("convergence --n-list 10,abc --out " + dir.string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST(Cli, TamperedDatasetExitsWithTwo) {
  const auto dir = scratch("tamper");
  write_small_config(dir / "cfg.json");
  ASSERT_EQ(run("simulate --config " + (dir / "cfg.json").string() + " --out " + dir.string()), 0);
  std::ofstream(dir / "train.csv", std::ios::app) << "999,0,1.0\n";
  EXPECT_EQ(run("learn --train " + (dir / "train.csv").string() + " --out " + dir.string()), 2);
}

TEST(Cli, EquilibriumWritesGrid) {
  const auto dir = scratch("eq");
  write_small_config(dir / "cfg.json");
  ASSERT_EQ(run("equilibrium --config " + (dir / "cfg.json").string() + " --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "equilibrium.csv"));
  EXPECT_TRUE(fs::exists(dir / "equilibrium_diagnostics.json"));
}
