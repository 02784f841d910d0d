#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gspr/errors.hpp"
#include "gspr/harness/config_io.hpp"
#include "gspr/harness/dataset.hpp"
#include "gspr/harness/distributions.hpp"
#include "gspr/harness/experiments.hpp"
#include "gspr/reserve_discriminative.hpp"

using namespace gspr;
using namespace gspr::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("gspr_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  auto cfg = default_experiment_config();
  cfg.n_train = 60;
  cfg.n_test = 80;
  cfg.equilibrium_grid_n = 300;
  return cfg;
}

}  // namespace

TEST(Distributions, SeededDrawsRepeat) {
  const auto u = ValuationDistribution::uniform(0.0, 1.0);
  EXPECT_EQ(draw_valuations(u, 4, 9), draw_valuations(u, 4, 9));
  EXPECT_NE(draw_valuations(u, 4, 9), draw_valuations(u, 4, 10));
  const auto s = sample_valuations(u, 50, 9);
  EXPECT_TRUE(std::is_sorted(s.values.begin(), s.values.end()));
}

TEST(Distributions, TruncatedSupport) {
  const auto d = ValuationDistribution::trunc_lognormal(std::log(2.0), 0.1, 2.5);
  for (double x : draw_valuations(d, 20000, 3)) {
    EXPECT_GT(x, 0.0);
    EXPECT_LE(x, 2.5);
  }
  for (double x : draw_valuations(default_mixture(), 20000, 4)) {
    EXPECT_GT(x, 0.0);
    EXPECT_LE(x, 2.5);
  }
}

TEST(Distributions, MixtureSelectionFrequency) {
  const auto d = ValuationDistribution::mixture(
      {{0.5, ValuationDistribution::uniform(0.0, 1.0)}, {0.5, ValuationDistribution::uniform(2.0, 3.0)}});
  const std::size_t n = 10000;
  const auto x = draw_valuations(d, n, 5);
  const auto first = std::count_if(x.begin(), x.end(), [](double v) { return v < 1.5; });
  EXPECT_NEAR(static_cast<double>(first), 0.5 * n, 3.0 * std::sqrt(n * 0.25));
}

TEST(Distributions, Validation) {
  EXPECT_THROW(ValuationDistribution::uniform(1.0, 0.5).validate(), ConfigError);
  EXPECT_THROW(ValuationDistribution::trunc_lognormal(5.0, 0.1, 1.0).validate(), ConfigError);
  EXPECT_THROW(ValuationDistribution::mixture({{0.3, ValuationDistribution::uniform(0.0, 1.0)},
                                               {0.3, ValuationDistribution::uniform(0.0, 1.0)}})
                   .validate(),
               ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const auto cfg = default_experiment_config();
  const auto again = config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(again).dump(), to_json(cfg).dump());
  EXPECT_EQ(config_hash(again), config_hash(cfg));
  EXPECT_EQ(hex64(config_hash(cfg)).size(), 16u);
}

TEST(Config, MissingKeysUseDefaults) {
  const auto cfg = config_from_json(nlohmann::json::object());
  EXPECT_EQ(cfg.n_train, 300u);
  EXPECT_EQ(cfg.auction.n_bidders(), 4);
  EXPECT_EQ(cfg.auction.n_slots(), 3);
}

TEST(Config, InvalidJsonRejected) {
  auto j = to_json(default_experiment_config());
  j["auction"]["position_factors"] = {1.0, 0.45, 1.0};
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(default_experiment_config());
  j["n_train"] = 0;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(default_experiment_config());
  j["valuation_dist"]["type"] = "cauchy";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(default_experiment_config());
  j["auction"]["ranking_rule"] = "rank_by_mood";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(default_experiment_config());
  j["n_test"] = "many";
  EXPECT_THROW(config_from_json(j), ConfigError);

  const auto dir = scratch_dir("badjson");
  std::ofstream(dir / "c.json") << "{ not json";
  EXPECT_THROW(load_config(dir / "c.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(Simulate, ShapeAndMonotoneBids) {
  auto cfg = default_experiment_config();
  cfg.equilibrium_grid_n = 500;
  const auto sim = simulate_auctions(cfg);
  ASSERT_EQ(sim.dataset.size(), 300u);
  for (std::size_t k = 0; k < sim.dataset.size(); ++k) {
    const auto& b = sim.dataset.auctions[k].bids;
    const auto& v = sim.valuations[k];
    ASSERT_EQ(b.size(), 4u);
    for (int i = 0; i < 4; ++i) {
      EXPECT_TRUE(std::isfinite(b[i]));
      EXPECT_GE(b[i], 0.0);
      for (int j = 0; j < 4; ++j)
        if (v[i] < v[j]) EXPECT_LE(b[i], b[j]);
    }
  }
  EXPECT_EQ(sim.dataset.provenance.stream, "train");
  EXPECT_EQ(sim.dataset.provenance.config_hash, config_hash(cfg));
}

TEST(Simulate, SingleSlotIsTruthful) {
  auto cfg = default_experiment_config();
  cfg.auction = AuctionConfig::with_unit_ctr(2, {1.0});
  cfg.valuation_dist = ValuationDistribution::uniform(0.0, 1.0);
  cfg.n_train = 200;
  const auto sim = simulate_auctions(cfg);
  for (std::size_t k = 0; k < sim.dataset.size(); ++k)
    for (int i = 0; i < 2; ++i)
      EXPECT_NEAR(sim.dataset.auctions[k].bids[i], sim.valuations[k][i], 0.05);
}

TEST(Sne, Example) {
  auto cfg = AuctionConfig::with_unit_ctr(4, {1.0, 0.5});
  const std::vector<BidProfile> data{{{0.3, 0.9, 0.1, 0.6}}};
  const auto rec = sne_recover(data, cfg);
  ASSERT_EQ(rec.values.size(), 1u);
  EXPECT_NEAR(rec.values[0], 0.9, 1e-15);
  EXPECT_THROW(sne_recover(data, AuctionConfig::with_unit_ctr(4, {1.0})), ConfigError);
}

TEST(Sne, BaselineMissesTrueValuations) {
  const auto h = run_histograms(default_experiment_config());
  EXPECT_GT(h.ks_sne, 0.1);
  EXPECT_GT(h.ks_sne, h.ks_density);
  const auto csv = histograms_csv(h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_lo,bin_hi,true_count,sne_count,density_count");
}

TEST(Ks, Statistic) {
  const std::vector<double> a{0.1, 0.2, 0.3}, b{0.1, 0.2, 0.3}, c{5.0, 6.0};
  EXPECT_EQ(ks_statistic(a, b), 0.0);
  EXPECT_EQ(ks_statistic(a, c), 1.0);
}

TEST(Dataset, SaveLoadRoundTrip) {
  const auto cfg = small_config();
  auto sim = simulate_auctions(cfg);
  const auto dir = scratch_dir("dataset");
  const auto csv = dir / "train.csv";
  save_dataset(sim.dataset, to_json(cfg), csv);
  EXPECT_TRUE(fs::exists(sidecar_path(csv)));
  EXPECT_EQ(slurp(csv).substr(0, 23), "auction_id,bidder_id,bi");
  const auto loaded = load_dataset(csv);
  ASSERT_EQ(loaded.data.size(), sim.dataset.size());
  for (std::size_t k = 0; k < loaded.data.size(); ++k)
    EXPECT_EQ(loaded.data.auctions[k].bids, sim.dataset.auctions[k].bids);
  EXPECT_EQ(loaded.data.provenance.seed, sim.dataset.provenance.seed);
  EXPECT_EQ(loaded.config.dump(), to_json(cfg).dump());
}

TEST(Dataset, TamperingDetected) {
  const auto cfg = small_config();
  const auto sim = simulate_auctions(cfg);
  const auto dir = scratch_dir("tamper");
  const auto csv = dir / "train.csv";
  save_dataset(sim.dataset, to_json(cfg), csv);
  auto text = slurp(csv);
  const auto pos = text.find('\n', text.find('\n') + 1);  // end of the first data row
  text.insert(pos, "1");
  std::ofstream(csv, std::ios::trunc) << text;
  EXPECT_THROW(load_dataset(csv), ConfigError);
}

TEST(Table1, OracleDominatesAndRecordsVerify) {
  const auto cfg = small_config();
  const auto t = run_table1(cfg);
  EXPECT_LE(t.density.mean_revenue, t.oracle.mean_revenue + 1e-12);
  EXPECT_LE(t.discriminative.mean_revenue, t.oracle.mean_revenue + 1e-12);
  for (const auto* r : {&t.density, &t.discriminative, &t.oracle}) {
    EXPECT_NO_THROW(verify_result(*r, t.test.auctions, cfg.auction));
    EXPECT_NEAR(r->mean_revenue,
                -discriminative::evaluate_reserve(r->reserve, t.test.auctions, cfg.auction), 1e-9);
    const auto back = result_from_json(to_json(*r));
    EXPECT_EQ(to_json(back).dump(), to_json(*r).dump());
  }
  auto forged = t.discriminative;
  forged.mean_revenue += 0.01;
  EXPECT_THROW(verify_result(forged, t.test.auctions, cfg.auction), ConfigError);
}

TEST(Table1, BitIdenticalReruns) {
  const auto cfg = small_config();
  const auto a = to_json(run_table1(cfg), cfg).dump();
  const auto b = to_json(run_table1(cfg), cfg).dump();
  EXPECT_EQ(a, b);
  auto other = cfg;
  other.master_seed += 1;
  EXPECT_NE(to_json(run_table1(other), other).dump(), a);
}

TEST(Convergence, LogNormalUnderEnvelope) {
  auto cfg = default_experiment_config();
  cfg.auction = AuctionConfig::with_unit_ctr(3, {1.0, 0.5});
  cfg.valuation_dist = ValuationDistribution::trunc_lognormal(0.0, 0.4, 1e6);
  const std::vector<std::size_t> n_list{100, 200, 400};
  const auto res = run_convergence(cfg, n_list, 4, 1000);
  ASSERT_EQ(res.summary.size(), 3u);
  for (const auto& s : res.summary) EXPECT_LE(s.mean, res.envelope_constant / std::sqrt(double(s.n)) * (1 + 1e-12));
  const auto csv = convergence_csv(res);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,rep,sup_error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}
