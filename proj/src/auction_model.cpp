#include "gspr/auction_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gspr/errors.hpp"
#include "gspr/random.hpp"

namespace gspr {

AuctionConfig::AuctionConfig(std::vector<double> position_factors, std::vector<double> ctr,
                             RankingRule rule)
    : position_factors_(std::move(position_factors)), ctr_(std::move(ctr)), rule_(rule) {
  const auto n = ctr_.size();
  const auto s = position_factors_.size();
  if (n < 1) throw ConfigError("auction needs at least one bidder");
  if (s < 1 || s > n) {
    throw ConfigError("number of slots must lie in [1, N]; got S=" + std::to_string(s) +
                      ", N=" + std::to_string(n));
  }
  for (std::size_t k = 0; k < s; ++k) {
    const double c = position_factors_[k];
    if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
      throw ConfigError("position factor c_" + std::to_string(k + 1) + " outside [0, 1]");
    }
    if (k > 0 && !(position_factors_[k - 1] > c)) {
      throw ConfigError("position factors must be strictly decreasing (c_" + std::to_string(k) +
                        " <= c_" + std::to_string(k + 1) + ")");
    }
  }
  if (!(position_factors_.back() > 0.0)) throw ConfigError("last position factor c_S must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ctr_[i];
    if (!std::isfinite(e) || !(e > 0.0) || e > 1.0) {
      throw ConfigError("click-through rate e_" + std::to_string(i + 1) + " outside (0, 1]");
    }
  }
}

AuctionConfig AuctionConfig::with_unit_ctr(int n_bidders, std::vector<double> position_factors,
                                           RankingRule rule) {
  if (n_bidders < 1) throw ConfigError("auction needs at least one bidder");
  return AuctionConfig(std::move(position_factors),
                       std::vector<double>(static_cast<std::size_t>(n_bidders), 1.0), rule);
}

double AuctionConfig::effective_ctr(int bidder) const {
  return rule_ == RankingRule::ByBid ? 1.0 : ctr_.at(static_cast<std::size_t>(bidder));
}

double AuctionConfig::min_ctr() const {
  if (rule_ == RankingRule::ByBid) return 1.0;
  return *std::min_element(ctr_.begin(), ctr_.end());
}

double AuctionConfig::sum_position_factors() const {
  return std::accumulate(position_factors_.begin(), position_factors_.end(), 0.0);
}

void check_dimensions(const AuctionConfig& config, const BidProfile& bids) {
  if (static_cast<int>(bids.bids.size()) != config.n_bidders()) {
    throw ConfigError("bid profile has " + std::to_string(bids.bids.size()) +
                      " entries, expected N=" + std::to_string(config.n_bidders()));
  }
  for (double b : bids.bids) {
    if (!std::isfinite(b) || b < 0.0) throw ConfigError("bids must be finite and >= 0");
  }
}

namespace {

void check_dimensions(const AuctionConfig& config, const ReserveVector& reserves,
                      const BidProfile& bids) {
  check_dimensions(config, bids);
  if (static_cast<int>(reserves.reserves.size()) != config.n_bidders()) {
    throw ConfigError("reserve vector has " + std::to_string(reserves.reserves.size()) +
                      " entries, expected N=" + std::to_string(config.n_bidders()));
  }
}

}  // namespace

std::vector<double> quality_scores(const AuctionConfig& config, const ReserveVector& reserves,
                                   const BidProfile& bids) {
  check_dimensions(config, reserves, bids);
  std::vector<double> q(bids.bids.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double b = bids.bids[i];
    q[i] = b >= reserves.reserves[i] ? config.effective_ctr(static_cast<int>(i)) * b : 0.0;
  }
  return q;
}

Allocation rank(std::span<const double> scores, int n_slots, std::uint64_t tie_seed) {
  const auto n = static_cast<int>(scores.size());
  if (n_slots < 0 || n_slots > n) throw ConfigError("slot count outside [0, N]");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });

  CounterRng rng(tie_seed);
  for (int lo = 0; lo < n;) {
    int hi = lo + 1;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    // Fisher-Yates on the tied run [lo, hi).
    for (int k = hi - lo - 1; k > 0; --k) {
      const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
      std::swap(order[lo + k], order[lo + j]);
    }
    lo = hi;
  }

  Allocation alloc;
  alloc.order = order;
  alloc.slot_to_bidder.assign(order.begin(), order.begin() + n_slots);
  alloc.scores.reserve(order.size() + 1);
  for (int i : order) alloc.scores.push_back(scores[i]);
  alloc.scores.push_back(0.0);
  return alloc;
}

double revenue(const AuctionConfig& config, const ReserveVector& reserves, const BidProfile& bids,
               std::uint64_t tie_seed) {
  const auto q = quality_scores(config, reserves, bids);
  const auto alloc = rank(q, config.n_slots(), tie_seed);
  double total = 0.0;
  for (int s = 0; s < config.n_slots(); ++s) {
    const int bidder = alloc.slot_to_bidder[s];
    const double e = config.effective_ctr(bidder);
    const double r = reserves.reserves[bidder];
    const double q_this = alloc.scores[s];
    const double q_next = alloc.scores[s + 1];
    double payment = 0.0;
    if (q_next >= e * r) {
      payment = q_next / e;
    } else if (e * r <= q_this) {
      payment = r;
    }
    total += config.position_factor(s) * payment;
  }
  return total;
}

double loss(const AuctionConfig& config, const ReserveVector& reserves, const BidProfile& bids,
            std::uint64_t tie_seed) {
  return -revenue(config, reserves, bids, tie_seed);
}

SortedScores sorted_unreserved_scores(const AuctionConfig& config, const BidProfile& bids) {
  check_dimensions(config, bids);
  const auto n = static_cast<std::size_t>(config.n_bidders());
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = config.effective_ctr(static_cast<int>(i)) * bids.bids[i];
  SortedScores out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) { return q[a] > q[b]; });
  out.scores.reserve(n + 1);
  for (int i : out.order) out.scores.push_back(q[i]);
  out.scores.push_back(0.0);
  return out;
}

double simplified_loss(double r, const AuctionConfig& config, const BidProfile& bids) {
  if (!(r >= 0.0)) throw ConfigError("scalar reserve must be non-negative");
  const auto sorted = sorted_unreserved_scores(config, bids);
  double total = 0.0;
  for (int s = 0; s < config.n_slots(); ++s) {
    const double weight = config.position_factor(s) / config.effective_ctr(sorted.order[s]);
    const double q_this = sorted.scores[s];
    const double q_next = sorted.scores[s + 1];
    if (q_next >= r) {
      total += weight * q_next;
    } else if (r <= q_this) {
      total += weight * r;
    }
  }
  return -total;
}

}  // namespace gspr
