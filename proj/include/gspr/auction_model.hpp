#pragma once

// GSP auction mechanics. The scalar-reserve simplified loss at the bottom is
// what the discriminative learner minimises.
//
// Indexing: bidders and slots are 0-based in containers. Formulas that use the
// slot rank arithmetically (binomials, powers) take a 1-based `slot` argument
// and say so.

#include <cstdint>
#include <span>
#include <vector>

namespace gspr {

enum class RankingRule { ByBid, ByRevenue };

class AuctionConfig {
public:
  /// Throws ConfigError unless 1 <= S <= N, c is strictly decreasing with
  /// c_S > 0 and every c_s <= 1, and every CTR lies in (0, 1].
  AuctionConfig(std::vector<double> position_factors, std::vector<double> ctr,
                RankingRule rule = RankingRule::ByRevenue);

  /// N bidders, all with CTR 1.
  static AuctionConfig with_unit_ctr(int n_bidders, std::vector<double> position_factors,
                                     RankingRule rule = RankingRule::ByRevenue);

  int n_bidders() const { return static_cast<int>(ctr_.size()); }
  int n_slots() const { return static_cast<int>(position_factors_.size()); }
  RankingRule ranking_rule() const { return rule_; }

  std::span<const double> position_factors() const { return position_factors_; }
  double position_factor(int slot_index) const { return position_factors_.at(slot_index); }

  /// The CTR as configured.
  std::span<const double> raw_ctr() const { return ctr_; }
  /// The CTR used for scoring: e_i under ByRevenue, 1 under ByBid.
  double effective_ctr(int bidder) const;

  /// min_i e_i over the effective CTRs.
  double min_ctr() const;
  /// Sum of the position factors.
  double sum_position_factors() const;

private:
  std::vector<double> position_factors_;
  std::vector<double> ctr_;
  RankingRule rule_;
};

struct BidProfile {
  std::vector<double> bids;
};

struct ReserveVector {
  std::vector<double> reserves;
};

struct Allocation {
  /// slot_to_bidder[s] is the bidder shown in slot s (length S).
  std::vector<int> slot_to_bidder;
  /// Bidders ordered by descending score; order[0..S) equals slot_to_bidder.
  std::vector<int> order;
  /// Sorted scores q^(1) >= ... >= q^(N), followed by the q^(N+1) = 0 pad.
  std::vector<double> scores;
};

/// q_i = e_i b_i 1{b_i >= r_i} with e_i the effective CTR.
std::vector<double> quality_scores(const AuctionConfig& config, const ReserveVector& reserves,
                                   const BidProfile& bids);

/// Sorts bidders by score, descending. Groups of equal scores are shuffled
/// uniformly with a generator keyed by `tie_seed`.
Allocation rank(std::span<const double> scores, int n_slots, std::uint64_t tie_seed);

/// Rev(r, b) = sum_s c_s ( q^(s+1)/e^(s) 1{q^(s+1) >= e^(s) r^(s)}
///                        + r^(s) 1{q^(s+1) < e^(s) r^(s) <= q^(s)} ).
double revenue(const AuctionConfig& config, const ReserveVector& reserves, const BidProfile& bids,
               std::uint64_t tie_seed);

double loss(const AuctionConfig& config, const ReserveVector& reserves, const BidProfile& bids,
            std::uint64_t tie_seed);

/// Loss under the common scalar reserve r_i = r / e_i, computed from the
/// unreserved scores e_i b_i. Score ties are broken by bidder index.
double simplified_loss(double r, const AuctionConfig& config, const BidProfile& bids);

/// Unreserved scores sorted descending (index tie-break) with the bidder order.
/// Used by the simplified loss and by breakpoint extraction.
struct SortedScores {
  std::vector<int> order;       // length N
  std::vector<double> scores;   // length N + 1, padded with 0
};
SortedScores sorted_unreserved_scores(const AuctionConfig& config, const BidProfile& bids);

void check_dimensions(const AuctionConfig& config, const BidProfile& bids);

}  // namespace gspr
