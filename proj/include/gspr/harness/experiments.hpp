#pragma once

// Experiment drivers. Everything here is a pure function of the config.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gspr/equilibrium.hpp"
#include "gspr/harness/config_io.hpp"
#include "gspr/harness/dataset.hpp"
#include "gspr/reserve_density.hpp"

namespace gspr::harness {

struct Simulation {
  Dataset dataset;
  std::vector<std::vector<double>> valuations;  // per auction, aligned with bids
};

/// Equilibrium bid function on `equilibrium_grid_n` fresh valuations drawn
/// from the stream "equilibrium_grid".
equilibrium::EmpiricalBidFunction fit_bid_function(const ExperimentConfig& config,
                                                   Execution exec = Execution::Parallel);

/// `n` auctions from the named stream: N valuations per auction, bids
/// b_i = beta(v_i) / e_i.
Simulation simulate_auctions(const ExperimentConfig& config, std::size_t n,
                             const std::string& stream,
                             const equilibrium::EmpiricalBidFunction& beta);

/// Fits the bid function and simulates the n_train training auctions.
Simulation simulate_auctions(const ExperimentConfig& config);

/// Symmetric-Nash baseline: per auction, with bids sorted descending,
///   v^(s) = (c_s b^(s+1) - c_{s+1} b^(s+2)) / (c_s - c_{s+1}),  s = 1..S-1,
/// and b^(N+1) = 0. Requires S >= 2.
density::RecoveredValuations sne_recover(std::span<const BidProfile> dataset,
                                         const AuctionConfig& config);

struct ResultRecord {
  std::string method;
  double reserve = 0.0;           // scalar score-space reserve
  std::vector<double> reserves;   // per-bidder r_i = reserve / e_i
  double mean_revenue = 0.0;      // -mean simplified loss on the evaluation set
  double standard_error = 0.0;
  double std_dev = 0.0;
  double runtime_seconds = 0.0;   // excluded from the canonical JSON
  bool numerical_warning = false; // e.g. the density route found no root
  std::string note;
};

/// Trains `method` ("sweep" or "density") on `train`, scores on `eval`.
ResultRecord learn(const std::string& method, std::span<const BidProfile> train,
                   std::span<const BidProfile> eval, const AuctionConfig& config);

/// Scores a fixed scalar reserve on a dataset (mean, sd, standard error).
ResultRecord score_reserve(std::string method, double reserve, std::span<const BidProfile> eval,
                           const AuctionConfig& config);

/// Recomputes the revenue of `record` on `eval`; throws ConfigError if it
/// differs from the stored value by more than 1e-9.
void verify_result(const ResultRecord& record, std::span<const BidProfile> eval,
                   const AuctionConfig& config);

nlohmann::json to_json(const ResultRecord& record);
ResultRecord result_from_json(const nlohmann::json& j);

struct Table1Result {
  ResultRecord density;
  ResultRecord discriminative;
  ResultRecord oracle;  // best reserve on the test set itself
  Dataset train;
  Dataset test;
};

Table1Result run_table1(const ExperimentConfig& config);
nlohmann::json to_json(const Table1Result& result, const ExperimentConfig& config);
std::string table1_csv(const Table1Result& result);

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct HistogramResult {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> true_counts;
  std::vector<std::size_t> sne_counts;
  std::vector<std::size_t> density_counts;
  double ks_sne = 0.0;
  double ks_density = 0.0;
  std::size_t density_flagged = 0;
};

/// Simulates n_train auctions and compares the pooled true valuations with the
/// baseline and density-recovered valuations.
HistogramResult run_histograms(const ExperimentConfig& config, std::size_t bins = 40);
std::string histograms_csv(const HistogramResult& h);

/// Convergence of the discrete equilibrium towards a large-sample reference,
/// with valuations drawn from the configured distribution.
equilibrium::ConvergenceResult run_convergence(const ExperimentConfig& config,
                                               std::span<const std::size_t> n_list,
                                               std::size_t reps, std::size_t reference_n,
                                               Execution exec = Execution::Parallel);
std::string convergence_csv(const equilibrium::ConvergenceResult& result);
nlohmann::json convergence_summary_json(const equilibrium::ConvergenceResult& result);

std::string equilibrium_csv(const equilibrium::EmpiricalBidFunction& beta);

}  // namespace gspr::harness
