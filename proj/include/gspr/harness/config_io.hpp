#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "gspr/auction_model.hpp"
#include "gspr/harness/distributions.hpp"

namespace gspr::harness {

struct ExperimentConfig {
  AuctionConfig auction;
  ValuationDistribution valuation_dist;
  std::size_t n_train = 300;
  std::size_t n_test = 500;
  std::uint64_t master_seed = 20150101;
  std::size_t equilibrium_grid_n = 2000;

  /// Throws ConfigError when n_train, n_test or the grid size is too small,
  /// or the distribution is invalid.
  void validate() const;
};

/// N = 4, S = 3, c = (1, 0.45, 0.1), unit CTRs, rank-by-revenue, the
/// two-component truncated log-normal mixture, 300 training and 500 test
/// auctions, a 2000-point equilibrium grid.
ExperimentConfig default_experiment_config();

nlohmann::json to_json(const AuctionConfig& config);
nlohmann::json to_json(const ValuationDistribution& dist);
nlohmann::json to_json(const ExperimentConfig& config);

/// Missing keys fall back to default_experiment_config(). Schema and value
/// errors raise ConfigError.
AuctionConfig auction_from_json(const nlohmann::json& j);
ValuationDistribution distribution_from_json(const nlohmann::json& j);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical (sorted-key) JSON dump.
std::uint64_t config_hash(const ExperimentConfig& config);

std::string hex64(std::uint64_t value);

}  // namespace gspr::harness
