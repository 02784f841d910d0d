#include "gspr/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gspr/errors.hpp"
#include "gspr/numeric.hpp"
#include "gspr/random.hpp"
#include "gspr/reserve_discriminative.hpp"

namespace gspr::harness {

using nlohmann::json;

equilibrium::EmpiricalBidFunction fit_bid_function(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const auto sample = sample_valuations(config.valuation_dist, config.equilibrium_grid_n,
                                        derive_seed(config.master_seed, "equilibrium_grid"));
  return equilibrium::solve_equilibrium(sample, config.auction, exec);
}

Simulation simulate_auctions(const ExperimentConfig& config, std::size_t n,
                             const std::string& stream,
                             const equilibrium::EmpiricalBidFunction& beta) {
  config.validate();
  const int big_n = config.auction.n_bidders();
  const std::uint64_t seed = derive_seed(config.master_seed, stream);
  const auto draws = draw_valuations(config.valuation_dist, n * static_cast<std::size_t>(big_n), seed);

  Simulation sim;
  sim.dataset.n_bidders = big_n;
  sim.dataset.provenance = Provenance{config_hash(config), seed, kGeneratorVersion, stream};
  sim.dataset.auctions.resize(n);
  sim.valuations.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto& bids = sim.dataset.auctions[a].bids;
    auto& vals = sim.valuations[a];
    bids.resize(static_cast<std::size_t>(big_n));
    vals.resize(static_cast<std::size_t>(big_n));
    for (int i = 0; i < big_n; ++i) {
      const double v = draws[a * static_cast<std::size_t>(big_n) + static_cast<std::size_t>(i)];
      vals[static_cast<std::size_t>(i)] = v;
      bids[static_cast<std::size_t>(i)] =
          std::max(0.0, equilibrium::bid_at(beta, v)) / config.auction.effective_ctr(i);
    }
  }
  return sim;
}

Simulation simulate_auctions(const ExperimentConfig& config) {
  const auto beta = fit_bid_function(config);
  return simulate_auctions(config, config.n_train, "train", beta);
}

density::RecoveredValuations sne_recover(std::span<const BidProfile> dataset,
                                         const AuctionConfig& config) {
  const int n_slots = config.n_slots();
  if (n_slots < 2) throw ConfigError("the symmetric-Nash inversion needs at least two slots");
  density::RecoveredValuations out;
  for (const auto& profile : dataset) {
    const auto sorted = sorted_unreserved_scores(config, profile);  // padded with b^(N+1) = 0
    const auto& b = sorted.scores;
    for (int s = 1; s <= n_slots - 1; ++s) {
      const double c_s = config.position_factor(s - 1);
      const double c_next = config.position_factor(s);
      const double b_next = b[static_cast<std::size_t>(s)];
      const double b_after = static_cast<std::size_t>(s + 1) < b.size() ? b[static_cast<std::size_t>(s + 1)] : 0.0;
      out.values.push_back((c_s * b_next - c_next * b_after) / (c_s - c_next));
      out.bids.push_back(b_next);
      out.flagged.push_back(false);
    }
  }
  return out;
}

ResultRecord score_reserve(std::string method, double reserve, std::span<const BidProfile> eval,
                           const AuctionConfig& config) {
  ResultRecord rec;
  rec.method = std::move(method);
  rec.reserve = reserve;
  rec.reserves = density::reserve_vector(reserve, config).reserves;
  const auto losses = discriminative::auction_losses(reserve, eval, config, Execution::Parallel);
  const double n = static_cast<double>(losses.size());
  rec.mean_revenue = -discriminative::evaluate_reserve(reserve, eval, config, Execution::Parallel);
  std::vector<double> sq(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const double d = -losses[i] - rec.mean_revenue;
    sq[i] = d * d;
  }
  rec.std_dev = losses.size() > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0)) : 0.0;
  rec.standard_error = rec.std_dev / std::sqrt(n);
  return rec;
}

ResultRecord learn(const std::string& method, std::span<const BidProfile> train,
                   std::span<const BidProfile> eval, const AuctionConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  double reserve = 0.0;
  bool warning = false;
  std::string note;
  if (method == "sweep" || method == "discriminative") {
    const auto sol = discriminative::learn_reserve(train, config);
    reserve = sol.reserve;
    note = "candidates=" + std::to_string(sol.candidates_evaluated);
  } else if (method == "density") {
    const auto recovered = density::recover_valuations(train, config);
    const auto est = density::solve_reserve(recovered, train, &config);
    reserve = std::max(0.0, est.reserve);
    warning = !est.is_root;
    note = "roots=" + std::to_string(est.roots.size()) +
           " flagged=" + std::to_string(recovered.flagged_count());
    if (!est.is_root) note += " no sign change; argmin |h| used";
  } else {
    throw ConfigError("unknown method '" + method + "' (expected sweep or density)");
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  auto rec = score_reserve(method == "discriminative" ? "sweep" : method, reserve, eval, config);
  rec.runtime_seconds = std::chrono::duration<double>(elapsed).count();
  rec.numerical_warning = warning;
  rec.note = note;
  return rec;
}

void verify_result(const ResultRecord& record, std::span<const BidProfile> eval,
                   const AuctionConfig& config) {
  const double recomputed = -discriminative::evaluate_reserve(record.reserve, eval, config);
  if (std::abs(recomputed - record.mean_revenue) > 1e-9) {
    throw ConfigError("stored revenue " + std::to_string(record.mean_revenue) +
                      " does not match recomputed " + std::to_string(recomputed));
  }
}

json to_json(const ResultRecord& r) {
  return json{{"method", r.method},
              {"reserve", r.reserve},
              {"reserves", r.reserves},
              {"mean_revenue", r.mean_revenue},
              {"standard_error", r.standard_error},
              {"std_dev", r.std_dev},
              {"numerical_warning", r.numerical_warning},
              {"note", r.note}};
}

ResultRecord result_from_json(const json& j) {
  try {
    ResultRecord r;
    r.method = j.at("method").get<std::string>();
    r.reserve = j.at("reserve").get<double>();
    r.reserves = j.at("reserves").get<std::vector<double>>();
    r.mean_revenue = j.at("mean_revenue").get<double>();
    r.standard_error = j.at("standard_error").get<double>();
    r.std_dev = j.at("std_dev").get<double>();
    r.numerical_warning = j.value("numerical_warning", false);
    r.note = j.value("note", "");
    r.runtime_seconds = j.value("runtime_seconds", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw ConfigError("result record: " + std::string(e.what()));
  }
}

Table1Result run_table1(const ExperimentConfig& config) {
  config.validate();
  const auto beta = fit_bid_function(config);
  auto train = simulate_auctions(config, config.n_train, "train", beta);
  auto test = simulate_auctions(config, config.n_test, "test", beta);
  const auto& tr = train.dataset.auctions;
  const auto& te = test.dataset.auctions;

  Table1Result out;
  out.density = learn("density", tr, te, config.auction);
  out.discriminative = learn("sweep", tr, te, config.auction);
  const auto oracle = discriminative::learn_reserve(te, config.auction);
  out.oracle = score_reserve("test_oracle", oracle.reserve, te, config.auction);
  out.train = std::move(train.dataset);
  out.test = std::move(test.dataset);
  return out;
}

json to_json(const Table1Result& result, const ExperimentConfig& config) {
  return json{{"config", to_json(config)},
              {"config_hash", hex64(config_hash(config))},
              {"generator_version", kGeneratorVersion},
              {"results", json::array({to_json(result.density), to_json(result.discriminative),
                                       to_json(result.oracle)})}};
}

std::string table1_csv(const Table1Result& result) {
  std::string out = "method,reserve,mean_revenue,standard_error,std_dev\n";
  char buf[256];
  for (const auto* r : {&result.density, &result.discriminative, &result.oracle}) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n", r->method.c_str(), r->reserve,
                  r->mean_revenue, r->standard_error, r->std_dev);
    out += buf;
  }
  return out;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("KS statistic needs two non-empty samples");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

namespace {

std::vector<std::size_t> histogram(std::span<const double> xs, std::span<const double> edges) {
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (double x : xs) {
    if (!std::isfinite(x) || x < edges.front() || x > edges.back()) continue;
    auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    k = std::min(k, counts.size());
    ++counts[k - 1];
  }
  return counts;
}

}  // namespace

HistogramResult run_histograms(const ExperimentConfig& config, std::size_t bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  const auto sim = simulate_auctions(config);
  std::vector<double> truth;
  for (const auto& vals : sim.valuations) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      truth.push_back(vals[i] * config.auction.effective_ctr(static_cast<int>(i)));
    }
  }
  const auto sne = sne_recover(sim.dataset.auctions, config.auction).unflagged();
  const auto recovered = density::recover_valuations(sim.dataset.auctions, config.auction);
  const auto dens = recovered.unflagged();

  HistogramResult h;
  h.ks_sne = ks_statistic(truth, sne);
  h.ks_density = ks_statistic(truth, dens);
  h.density_flagged = recovered.flagged_count();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const std::vector<double>* set :
       std::initializer_list<const std::vector<double>*>{&truth, &sne, &dens}) {
    for (double x : *set) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  lo = std::min(lo, 0.0);
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  h.true_counts = histogram(truth, h.edges);
  h.sne_counts = histogram(sne, h.edges);
  h.density_counts = histogram(dens, h.edges);
  return h;
}

std::string histograms_csv(const HistogramResult& h) {
  std::string out = "bin_lo,bin_hi,true_count,sne_count,density_count\n";
  char buf[160];
  for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%zu,%zu\n", h.edges[k], h.edges[k + 1],
                  h.true_counts[k], h.sne_counts[k], h.density_counts[k]);
    out += buf;
  }
  return out;
}

equilibrium::ConvergenceResult run_convergence(const ExperimentConfig& config,
                                               std::span<const std::size_t> n_list,
                                               std::size_t reps, std::size_t reference_n,
                                               Execution exec) {
  config.validate();
  const auto dist = config.valuation_dist;
  equilibrium::ValuationSampler sampler = [dist](std::size_t n, std::uint64_t seed) {
    return draw_valuations(dist, n, seed);
  };
  return equilibrium::convergence_sweep(sampler, n_list, reps, config.auction, reference_n,
                                        config.master_seed, exec);
}

std::string convergence_csv(const equilibrium::ConvergenceResult& result) {
  std::string out = "n,rep,sup_error\n";
  char buf[96];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", row.n, row.rep, row.sup_error);
    out += buf;
  }
  return out;
}

json convergence_summary_json(const equilibrium::ConvergenceResult& result) {
  json rows = json::array();
  for (const auto& s : result.summary) {
    rows.push_back(json{{"n", s.n}, {"mean", s.mean}, {"median", s.median}, {"min", s.min},
                        {"max", s.max}});
  }
  return json{{"summary", rows}, {"envelope_constant", result.envelope_constant},
              {"reference_n", result.reference.grid_values.size()}};
}

std::string equilibrium_csv(const equilibrium::EmpiricalBidFunction& beta) {
  std::string out = "value,bid\n";
  char buf[96];
  for (std::size_t i = 0; i < beta.grid_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", beta.grid_values[i], beta.grid_bids[i]);
    out += buf;
  }
  return out;
}

}  // namespace gspr::harness
