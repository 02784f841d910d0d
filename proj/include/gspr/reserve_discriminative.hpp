#pragma once

// Exact empirical risk minimisation of the simplified GSP loss over a scalar
// reserve. Each (auction, slot) pair contributes a broken-V function
//
//   l(r) = -w p2   if r <= p2
//          -w r    if p2 < r <= p1
//           0      if r > p1
//
// with p1 = q^(s), p2 = q^(s+1) and w = c_s / e^(s). The sum is piecewise
// linear with knots at the p-values, so sweeping the sorted knots while
// maintaining the running coefficients of L(r) = d1 - r d2 finds the global
// minimum in O(m log m) for m = nS pairs.

#include <cstddef>
#include <span>
#include <vector>

#include "gspr/auction_model.hpp"
#include "gspr/execution.hpp"

namespace gspr::discriminative {

/// Parameters of a general v-function
///   V(r) = -a1 1{r <= q2} - a2 r 1{q2 < r <= q1} + (r/eta - a3) 1{q1 < r < (1+eta) q1}.
/// GSP slot losses have eta = 0 (a3 unused) and a1 = a2 q2.
struct VFunctionParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double eta = 0.0;
};

struct VFunction {
  VFunctionParams params;
  double q1 = 0.0;
  double q2 = 0.0;
};

struct Breakpoint {
  double p1;      // upper knot q^(s)
  double p2;      // lower knot q^(s+1)
  double weight;  // c_s / e^(s)
};

struct VBreakpoints {
  std::vector<Breakpoint> pairs;
};

struct ReserveSolution {
  double reserve = 0.0;
  double loss_value = 0.0;  // summed (not averaged) loss at `reserve`
  std::size_t candidates_evaluated = 0;
};

/// The v-function of one slot loss: a1 = w q2, a2 = w, eta = 0.
VFunction slot_v_function(double weight, double upper_score, double lower_score);

/// One (p1, p2, weight) triple per auction and slot, auction-major.
VBreakpoints extract_breakpoints(std::span<const BidProfile> dataset, const AuctionConfig& config);

/// Converts GSP-shaped v-functions to breakpoints. Throws ConfigError on
/// eta > 0 (not supported by the sweep) or when a1 != a2 q2.
VBreakpoints breakpoints_from_v_functions(std::span<const VFunction> functions);

/// Sum over pairs of the broken-V loss at r, summed in input order.
double empirical_loss(const VBreakpoints& bp, double r);

/// One linear piece of the summed loss: L(r) = d1 - r * d2 for r in
/// (lower, upper]. The first piece has lower = -inf, the last upper = +inf.
struct LossSegment {
  double lower;
  double upper;
  double d1;
  double d2;
};

/// The sweep's running coefficients, one segment per distinct knot plus the
/// tail beyond the largest knot.
std::vector<LossSegment> loss_segments(const VBreakpoints& bp);

/// Sorted-knot sweep. Ties in the minimal loss resolve to the smallest reserve.
ReserveSolution minimize(const VBreakpoints& bp);

/// O(m^2) oracle: direct evaluation at 0 and every knot.
ReserveSolution brute_force(const VBreakpoints& bp);

/// 1/sqrt(n) + sqrt(log(e n)/n) + sqrt(M log(1/delta) / (2 m n)), with
/// M = sum_s c_s and m = min_i e_i.
double generalization_bound(double sum_position_factors, double min_ctr, std::size_t n,
                            double delta);

/// Mean simplified loss of the scalar reserve r over the dataset. The
/// per-auction losses are reduced in a fixed order, so Serial and Parallel
/// agree bit for bit.
double evaluate_reserve(double r, std::span<const BidProfile> dataset, const AuctionConfig& config,
                        Execution exec = Execution::Parallel);

/// Per-auction simplified losses (the kernel behind evaluate_reserve).
std::vector<double> auction_losses(double r, std::span<const BidProfile> dataset,
                                   const AuctionConfig& config,
                                   Execution exec = Execution::Parallel);

/// Convenience: breakpoints + sweep.
ReserveSolution learn_reserve(std::span<const BidProfile> dataset, const AuctionConfig& config);

}  // namespace gspr::discriminative
