#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gspr/auction_model.hpp"

namespace gspr::harness {

inline constexpr const char* kGeneratorVersion = "gspr-sim/1";

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string generator_version = kGeneratorVersion;
  std::string stream;  // "train", "test", ...
};

/// n auctions x N bids.
struct Dataset {
  int n_bidders = 0;
  std::vector<BidProfile> auctions;
  Provenance provenance;

  std::size_t size() const { return auctions.size(); }
};

/// Canonical CSV text: header `auction_id,bidder_id,bid`, one row per bid,
/// bids printed with 17 significant digits.
std::string to_csv(const Dataset& data);

/// Writes `csv_path` and the sidecar `csv_path + ".json"` holding the
/// provenance record, the experiment config and a content hash of the CSV.
void save_dataset(const Dataset& data, const nlohmann::json& config_json,
                  const std::filesystem::path& csv_path);

struct LoadedDataset {
  Dataset data;
  nlohmann::json config;
};

/// Reads a dataset and its sidecar. Throws ConfigError when the CSV is
/// malformed or its content hash differs from the sidecar (tampered file).
LoadedDataset load_dataset(const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace gspr::harness
