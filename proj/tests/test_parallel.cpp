// Serial and OpenMP execution must agree bit for bit.
#include <gtest/gtest.h>

#include <vector>

#include "gspr/equilibrium.hpp"
#include "gspr/harness/config_io.hpp"
#include "gspr/harness/experiments.hpp"
#include "gspr/random.hpp"
#include "gspr/reserve_density.hpp"
#include "gspr/reserve_discriminative.hpp"

using namespace gspr;

namespace {

std::vector<double> uniform_draws(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

const harness::Simulation& simulated() {
  static const auto sim = harness::simulate_auctions(harness::default_experiment_config());
  return sim;
}

}  // namespace

TEST(Parallel, BuildSystem) {
  const auto cfg = harness::default_experiment_config().auction;
  const auto sample = equilibrium::ValuationSample::from_draws(uniform_draws(700, 1));
  const auto a = equilibrium::build_system(sample, cfg, Execution::Serial);
  const auto b = equilibrium::build_system(sample, cfg, Execution::Parallel);
  EXPECT_EQ(a.u, b.u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ra = a.row(i), rb = b.row(i);
    ASSERT_TRUE(std::equal(ra.begin(), ra.end(), rb.begin())) << "row " << i;
  }
}

TEST(Parallel, RecoverValuations) {
  const auto cfg = harness::default_experiment_config().auction;
  const auto a = density::recover_valuations(simulated().dataset.auctions, cfg, Execution::Serial);
  const auto b = density::recover_valuations(simulated().dataset.auctions, cfg, Execution::Parallel);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.flagged, b.flagged);
}

TEST(Parallel, AuctionLosses) {
  const auto cfg = harness::default_experiment_config().auction;
  for (double r : {0.0, 0.7, 1.3}) {
    EXPECT_EQ(discriminative::auction_losses(r, simulated().dataset.auctions, cfg, Execution::Serial),
              discriminative::auction_losses(r, simulated().dataset.auctions, cfg, Execution::Parallel));
    EXPECT_EQ(discriminative::evaluate_reserve(r, simulated().dataset.auctions, cfg, Execution::Serial),
              discriminative::evaluate_reserve(r, simulated().dataset.auctions, cfg, Execution::Parallel));
  }
}

TEST(Parallel, ConvergenceSweep) {
  const auto cfg = AuctionConfig::with_unit_ctr(3, {1.0, 0.5});
  const std::vector<std::size_t> n_list{60, 120};
  const auto a = equilibrium::convergence_sweep(uniform_draws, n_list, 4, cfg, 300, 3, Execution::Serial);
  const auto b = equilibrium::convergence_sweep(uniform_draws, n_list, 4, cfg, 300, 3, Execution::Parallel);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].sup_error, b.rows[k].sup_error);
  EXPECT_EQ(a.envelope_constant, b.envelope_constant);
}
