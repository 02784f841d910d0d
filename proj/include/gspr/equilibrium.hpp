#pragma once

// Symmetric equilibrium bidding function of the discrete GSP auction.
//
// Given a sorted valuation sample v_1 < ... < v_n the bidding function at the
// sample points solves a lower-triangular system M beta = u, where M(s)_ij is
// the probability that a bidder valued v_i lands in slot s while the next-
// ranked competitor is valued v_j, and u_i is the equilibrium expected payment.
// Slot ranks passed to the z-functions are 1-based; sample indices are 1-based
// in the formulas (F_0 = 0) and 0-based in containers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gspr/auction_model.hpp"
#include "gspr/execution.hpp"

namespace gspr::equilibrium {

/// Separation added to the j-th repeat of a tied valuation.
inline constexpr double kTieSeparation = 1e-12;
/// Slack allowed when checking that the solved bids are non-decreasing.
inline constexpr double kMonotoneTolerance = 1e-9;

struct ValuationSample {
  std::vector<double> values;  // strictly increasing, finite, >= 0

  /// Sorts `draws` and separates ties by j * kTieSeparation.
  static ValuationSample from_draws(std::vector<double> draws);
};

struct EmpiricalGrids {
  std::vector<double> F;  // F[i] = i / n for i = 0..n (F[0] = 0)
  std::vector<double> G;  // G[i] = 1 - F[i]

  explicit EmpiricalGrids(std::size_t n);
  std::size_t size() const { return F.size() - 1; }
};

/// Dense lower-triangular matrix in packed row-major storage plus the
/// right-hand side. `values` carries the grid the system was built on.
class TriangularSystem {
public:
  explicit TriangularSystem(std::size_t n);

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return packed_[offset(i) + j]; }
  double at(std::size_t i, std::size_t j) const { return j > i ? 0.0 : packed_[offset(i) + j]; }
  std::span<const double> row(std::size_t i) const { return {packed_.data() + offset(i), i + 1}; }
  std::span<double> row(std::size_t i) { return {packed_.data() + offset(i), i + 1}; }

  std::vector<double> u;
  std::vector<double> values;

private:
  static std::size_t offset(std::size_t i) { return i * (i + 1) / 2; }
  std::size_t n_;
  std::vector<double> packed_;
};

struct SolveDiagnostics {
  std::size_t negative_bids = 0;
  std::size_t monotonicity_violations = 0;  // drops larger than kMonotoneTolerance
  double largest_drop = 0.0;
  double max_increment = 0.0;               // max_i (beta_i - beta_{i-1})

  bool clean() const { return negative_bids == 0 && monotonicity_violations == 0; }
  std::string describe() const;
};

struct EmpiricalBidFunction {
  std::vector<double> grid_values;
  std::vector<double> grid_bids;
  SolveDiagnostics diagnostics;
};

/// z_s(v) = C(N-1, s-1) (1 - F)^(s-1) F^(N-s) with F = F(v); `slot` is 1-based
/// in [1, N].
double z_continuous(int slot, double cdf_value, const AuctionConfig& config);

/// Probability that a bidder valued v_i takes slot `slot` when all bidders
/// draw from the empirical distribution of n points (ties broken uniformly).
double z_hat(int slot, std::size_t i, std::size_t n, const AuctionConfig& config);

/// Left limit of z_hat at v_i: C(N-1, s-1) F_{i-1}^(N-s) G_{i-1}^(s-1).
double z_hat_minus(int slot, std::size_t i, std::size_t n, const AuctionConfig& config);

/// Diagonal entry M_ii(s): the z_hat sum restricted to j <= N - s - 1.
double diagonal_entry(int slot, std::size_t i, std::size_t n, const AuctionConfig& config);

/// Off-diagonal entry M_ij(s), i > j: -C(N-1, s-1) n dF_j^p dG_i^s / s.
double off_diagonal_entry(int slot, std::size_t i, std::size_t j, std::size_t n,
                          const AuctionConfig& config);

/// Assembles M = sum_s c_s M(s) and u. Throws ConfigError if n < 2, the sample
/// is not strictly increasing, N < 2, or c_S = 0.
TriangularSystem build_system(const ValuationSample& sample, const AuctionConfig& config,
                              Execution exec = Execution::Parallel);

/// Forward substitution. Throws NumericalError naming the first diagonal
/// entry that is not strictly positive.
EmpiricalBidFunction solve(const TriangularSystem& system);

/// build_system followed by solve.
EmpiricalBidFunction solve_equilibrium(const ValuationSample& sample, const AuctionConfig& config,
                                       Execution exec = Execution::Parallel);

/// ||M beta - u||_inf.
double residual_inf(const TriangularSystem& system, std::span<const double> beta);

/// Piecewise-linear interpolation on the grid, clamped outside [v_1, v_n].
double bid_at(const EmpiricalBidFunction& f, double v);

/// Produces a fresh sample of `n` valuations from the stream keyed by `seed`.
using ValuationSampler = std::function<std::vector<double>(std::size_t n, std::uint64_t seed)>;

struct ConvergenceRow {
  std::size_t n;
  std::size_t rep;
  double sup_error;
};

struct ConvergenceSummary {
  std::size_t n;
  double mean;
  double median;
  double min;
  double max;
};

struct ConvergenceResult {
  EmpiricalBidFunction reference;
  std::vector<ConvergenceRow> rows;          // ordered by (n, rep)
  std::vector<EmpiricalBidFunction> fits;    // same order as rows
  std::vector<ConvergenceSummary> summary;   // one per n, in n_list order
  /// Smallest c with mean_error(n) <= c / sqrt(n) for every n.
  double envelope_constant = 0.0;
};

/// Solves a reference system on `reference_n` points, then for every n in
/// `n_list` and every rep solves on a fresh sample and records
/// sup_i |beta_n(v_i) - beta_ref(v_i)|. Per-rep seeds derive from
/// `master_seed`, so output is independent of execution order.
ConvergenceResult convergence_sweep(const ValuationSampler& sampler,
                                    std::span<const std::size_t> n_list, std::size_t reps,
                                    const AuctionConfig& config, std::size_t reference_n,
                                    std::uint64_t master_seed,
                                    Execution exec = Execution::Parallel);

}  // namespace gspr::equilibrium
