#pragma once

// Density-estimation route to the reserve price:
//   1. estimate the bid CDF (empirical) and density (triangular KDE);
//   2. invert the equilibrium bid function bid by bid to recover valuations;
//   3. re-estimate the valuation CDF and density;
//   4. solve r = (1 - F(r)) / f(r).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gspr/auction_model.hpp"
#include "gspr/execution.hpp"

namespace gspr::density {

/// Denominators of the bid inversion below this value are floored and the
/// recovered valuation is flagged.
inline constexpr double kDenominatorFloor = 1e-8;
/// Minimum number of usable observations for recovery and reserve fitting.
inline constexpr std::size_t kMinObservations = 10;

class EmpiricalCdf {
public:
  explicit EmpiricalCdf(std::vector<double> sample);

  /// Fraction of sample points <= x.
  double operator()(double x) const;
  std::span<const double> points() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

private:
  std::vector<double> sorted_;
};

enum class KernelType { Triangular };

/// K(u) = (1 - |u|) 1{|u| <= 1}.
double triangular_kernel(double u);

class Kde {
public:
  Kde(std::vector<double> sample, double bandwidth, KernelType kernel = KernelType::Triangular);

  /// (1 / (n h)) sum_i K((x - x_i) / h).
  double operator()(double x) const;
  double bandwidth() const { return h_; }
  std::span<const double> points() const { return sorted_; }
  KernelType kernel() const { return kernel_; }

private:
  std::vector<double> sorted_;
  double h_;
  KernelType kernel_;
};

/// Rule-of-thumb bandwidth 1.06 * sd * n^(-1/5). Throws ConfigError for n < 2
/// or a zero standard deviation.
double bandwidth(std::span<const double> sample);

double kde_eval(const Kde& kde, double x);

/// Kde with the rule-of-thumb bandwidth.
Kde fit_kde(std::vector<double> sample);

struct Inversion {
  double value = 0.0;
  bool flagged = false;  // the denominator fell below kDenominatorFloor
};

/// Recovers the valuation behind bid b. Direct evaluation: the partial
/// integral is summed over `sorted_bids` on every call (O(n)). This is the
/// reference for BidInverter.
Inversion invert_bid(double b, const EmpiricalCdf& ghat, const Kde& gdens,
                     const AuctionConfig& config, std::span<const double> sorted_bids);

/// Same formula as invert_bid with the partial integrals precomputed as prefix
/// sums over the sorted bids, so each inversion costs O(S + log n).
class BidInverter {
public:
  BidInverter(std::vector<double> bids, const AuctionConfig& config);

  Inversion operator()(double b) const;
  const EmpiricalCdf& cdf() const { return cdf_; }
  const Kde& density() const { return kde_; }

private:
  AuctionConfig config_;
  EmpiricalCdf cdf_;
  Kde kde_;
  // prefix_[s][k] = (1/n) sum_{j < k} p G(b_j)^(p-1) b_j over sorted bids.
  std::vector<std::vector<double>> prefix_;
};

struct RecoveredValuations {
  std::vector<double> values;
  std::vector<double> bids;   // the score each value was recovered from
  std::vector<bool> flagged;

  std::vector<double> unflagged() const;
  std::size_t flagged_count() const;
};

/// Pools the n * N scores e_i b_i, fits the bid CDF and KDE and inverts every
/// observation. Throws ConfigError with fewer than kMinObservations bids.
RecoveredValuations recover_valuations(std::span<const BidProfile> dataset,
                                       const AuctionConfig& config,
                                       Execution exec = Execution::Parallel);

struct ReserveEstimate {
  double reserve = 0.0;
  bool is_root = true;        // false: no sign change, argmin |h| on the grid
  std::vector<double> roots;  // every bracketed root, ascending
};

inline constexpr std::size_t kRootScanPoints = 2000;
inline constexpr double kRootTolerance = 1e-6;

/// Roots of h(r) = r f(r) - (1 - F(r)) on [lo, hi]: sign scan on a
/// kRootScanPoints grid, then bisection to kRootTolerance. Among several roots
/// `score` (lower is better) picks one; without it the smallest root wins.
ReserveEstimate solve_fixed_point(const std::function<double(double)>& cdf,
                                  const std::function<double(double)>& pdf, double lo, double hi,
                                  const std::function<double(double)>& score = {});

/// Fits F and f on the unflagged recovered valuations and solves the fixed
/// point over [min v, max v]. With training data, multiple roots are ranked by
/// the mean simplified loss on it.
ReserveEstimate solve_reserve(const RecoveredValuations& values,
                              std::span<const BidProfile> training = {},
                              const AuctionConfig* config = nullptr);

/// r_i = r_bar / e_i with the effective CTR (1 under rank-by-bid).
ReserveVector reserve_vector(double r_bar, const AuctionConfig& config);

}  // namespace gspr::density
