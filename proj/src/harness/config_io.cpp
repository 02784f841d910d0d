#include "gspr/harness/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>

#include "gspr/errors.hpp"
#include "gspr/numeric.hpp"

namespace gspr::harness {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (n_train < 1 || n_test < 1) throw ConfigError("n_train and n_test must be >= 1");
  if (equilibrium_grid_n < 2) throw ConfigError("equilibrium_grid_n must be >= 2");
  if (auction.n_bidders() < 2) throw ConfigError("experiments need N >= 2 bidders");
  valuation_dist.validate();
}

ExperimentConfig default_experiment_config() {
  return ExperimentConfig{
      AuctionConfig::with_unit_ctr(4, {1.0, 0.45, 0.1}, RankingRule::ByRevenue),
      default_mixture(), 300, 500, 20150101, 2000};
}

json to_json(const AuctionConfig& config) {
  return json{{"n_bidders", config.n_bidders()},
              {"position_factors", std::vector<double>(config.position_factors().begin(),
                                                       config.position_factors().end())},
              {"ctr", std::vector<double>(config.raw_ctr().begin(), config.raw_ctr().end())},
              {"ranking_rule",
               config.ranking_rule() == RankingRule::ByBid ? "rank_by_bid" : "rank_by_revenue"}};
}

json to_json(const ValuationDistribution& dist) {
  switch (dist.kind) {
    case ValuationDistribution::Kind::Uniform:
      return json{{"type", "uniform"}, {"a", dist.a}, {"b", dist.b}};
    case ValuationDistribution::Kind::TruncLogNormal: {
      json j{{"type", "trunc_lognormal"}, {"mu", dist.mu}, {"sigma", dist.sigma}};
      if (std::isfinite(dist.hi)) j["hi"] = dist.hi;
      return j;
    }
    case ValuationDistribution::Kind::Mixture: {
      json comps = json::array();
      for (const auto& c : dist.components) {
        comps.push_back(json{{"weight", c.weight}, {"dist", to_json(c.dist)}});
      }
      return json{{"type", "mixture"}, {"components", comps}};
    }
  }
  return {};
}

json to_json(const ExperimentConfig& config) {
  return json{{"auction", to_json(config.auction)},
              {"valuation_dist", to_json(config.valuation_dist)},
              {"n_train", config.n_train},
              {"n_test", config.n_test},
              {"master_seed", config.master_seed},
              {"equilibrium_grid_n", config.equilibrium_grid_n}};
}

AuctionConfig auction_from_json(const json& j) {
  try {
    const auto c = j.at("position_factors").get<std::vector<double>>();
    RankingRule rule = RankingRule::ByRevenue;
    if (j.contains("ranking_rule")) {
      const auto name = j.at("ranking_rule").get<std::string>();
      if (name == "rank_by_bid") {
        rule = RankingRule::ByBid;
      } else if (name != "rank_by_revenue") {
        throw ConfigError("unknown ranking_rule '" + name + "'");
      }
    }
    if (j.contains("ctr")) {
      auto ctr = j.at("ctr").get<std::vector<double>>();
      if (j.contains("n_bidders") && j.at("n_bidders").get<int>() != static_cast<int>(ctr.size())) {
        throw ConfigError("n_bidders disagrees with the length of ctr");
      }
      return AuctionConfig(c, std::move(ctr), rule);
    }
    return AuctionConfig::with_unit_ctr(j.at("n_bidders").get<int>(), c, rule);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("auction config: ") + e.what());
  }
}

ValuationDistribution distribution_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "uniform") {
      return ValuationDistribution::uniform(j.value("a", 0.0), j.value("b", 1.0));
    }
    if (type == "trunc_lognormal") {
      const double hi = j.contains("hi") ? j.at("hi").get<double>()
                                         : std::numeric_limits<double>::infinity();
      return ValuationDistribution::trunc_lognormal(j.at("mu").get<double>(),
                                                    j.at("sigma").get<double>(), hi);
    }
    if (type == "mixture") {
      std::vector<MixtureComponent> comps;
      for (const auto& c : j.at("components")) {
        comps.push_back({c.at("weight").get<double>(), distribution_from_json(c.at("dist"))});
      }
      return ValuationDistribution::mixture(std::move(comps));
    }
    throw ConfigError("unknown valuation distribution type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("valuation distribution: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j) {
  auto config = default_experiment_config();
  try {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    if (j.contains("auction")) config.auction = auction_from_json(j.at("auction"));
    if (j.contains("valuation_dist")) {
      config.valuation_dist = distribution_from_json(j.at("valuation_dist"));
    }
    if (j.contains("n_train")) config.n_train = j.at("n_train").get<std::size_t>();
    if (j.contains("n_test")) config.n_test = j.at("n_test").get<std::size_t>();
    if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("equilibrium_grid_n")) {
      config.equilibrium_grid_n = j.at("equilibrium_grid_n").get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const auto text = to_json(config).dump();
  return fnv1a64(text);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace gspr::harness
