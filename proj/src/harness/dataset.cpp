#include "gspr/harness/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gspr/errors.hpp"
#include "gspr/harness/config_io.hpp"
#include "gspr/numeric.hpp"

namespace gspr::harness {

using nlohmann::json;

std::string to_csv(const Dataset& data) {
  std::string out = "auction_id,bidder_id,bid\n";
  char buf[64];
  for (std::size_t a = 0; a < data.auctions.size(); ++a) {
    const auto& bids = data.auctions[a].bids;
    for (std::size_t i = 0; i < bids.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", a, i, bids[i]);
      out += buf;
    }
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  return std::filesystem::path(csv_path.string() + ".json");
}

void save_dataset(const Dataset& data, const json& config_json,
                  const std::filesystem::path& csv_path) {
  const auto text = to_csv(data);
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + csv_path.string());
    out << text;
  }
  json side{{"config", config_json},
            {"provenance",
             {{"config_hash", hex64(data.provenance.config_hash)},
              {"seed", data.provenance.seed},
              {"generator_version", data.provenance.generator_version},
              {"stream", data.provenance.stream}}},
            {"n_auctions", data.auctions.size()},
            {"n_bidders", data.n_bidders},
            {"content_hash", hex64(fnv1a64(text))}};
  std::ofstream out(sidecar_path(csv_path));
  if (!out) throw ConfigError("cannot write " + sidecar_path(csv_path).string());
  out << side.dump(2) << '\n';
}

LoadedDataset load_dataset(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset " + csv_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::ifstream side_in(sidecar_path(csv_path));
  if (!side_in) throw ConfigError("missing dataset sidecar " + sidecar_path(csv_path).string());
  json side;
  try {
    side_in >> side;
  } catch (const json::exception& e) {
    throw ConfigError("dataset sidecar is not valid JSON: " + std::string(e.what()));
  }

  LoadedDataset loaded;
  try {
    if (side.at("content_hash").get<std::string>() != hex64(fnv1a64(text))) {
      throw ConfigError("dataset " + csv_path.string() +
                        " does not match its provenance hash (tampered or truncated)");
    }
    loaded.config = side.at("config");
    const auto& prov = side.at("provenance");
    loaded.data.provenance.config_hash =
        std::stoull(prov.at("config_hash").get<std::string>(), nullptr, 16);
    loaded.data.provenance.seed = prov.at("seed").get<std::uint64_t>();
    loaded.data.provenance.generator_version = prov.at("generator_version").get<std::string>();
    loaded.data.provenance.stream = prov.value("stream", "");
    loaded.data.n_bidders = side.at("n_bidders").get<int>();
    loaded.data.auctions.resize(side.at("n_auctions").get<std::size_t>());
  } catch (const json::exception& e) {
    throw ConfigError("dataset sidecar: " + std::string(e.what()));
  }

  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  if (line != "auction_id,bidder_id,bid") throw ConfigError("unexpected dataset header: " + line);
  for (auto& a : loaded.data.auctions) a.bids.assign(static_cast<std::size_t>(loaded.data.n_bidders), NAN);
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::size_t a = 0;
    std::size_t i = 0;
    double bid = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf", &a, &i, &bid) != 3 ||
        a >= loaded.data.auctions.size() || i >= static_cast<std::size_t>(loaded.data.n_bidders)) {
      throw ConfigError("malformed dataset row: " + line);
    }
    if (!std::isfinite(bid) || bid < 0.0) throw ConfigError("dataset bid must be finite and >= 0");
    loaded.data.auctions[a].bids[i] = bid;
    ++rows;
  }
  if (rows != loaded.data.auctions.size() * static_cast<std::size_t>(loaded.data.n_bidders)) {
    throw ConfigError("dataset row count disagrees with its sidecar");
  }
  return loaded;
}

}  // namespace gspr::harness
