#include "gspr/reserve_discriminative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gspr/errors.hpp"
#include "gspr/numeric.hpp"

namespace gspr::discriminative {

namespace {

// Neumaier-compensated accumulator for the sweep coefficients.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double pair_loss(const Breakpoint& bp, double r) {
  if (bp.p2 >= r) return -bp.weight * bp.p2;
  if (r <= bp.p1) return -bp.weight * r;
  return 0.0;
}

void check_pairs(const VBreakpoints& bp) {
  if (bp.pairs.empty()) throw ConfigError("reserve minimisation needs at least one breakpoint pair");
  for (const auto& p : bp.pairs) {
    if (!(std::isfinite(p.p1) && std::isfinite(p.p2) && std::isfinite(p.weight)) || p.p2 < 0.0 ||
        p.p1 < p.p2 || !(p.weight > 0.0)) {
      throw ConfigError("breakpoint pair violates p1 >= p2 >= 0, weight > 0");
    }
  }
}

std::vector<double> distinct_candidates(const VBreakpoints& bp) {
  std::vector<double> c;
  c.reserve(2 * bp.pairs.size() + 1);
  c.push_back(0.0);
  for (const auto& p : bp.pairs) {
    c.push_back(p.p1);
    c.push_back(p.p2);
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

}  // namespace

VFunction slot_v_function(double weight, double upper_score, double lower_score) {
  return VFunction{VFunctionParams{weight * lower_score, weight, 0.0, 0.0}, upper_score,
                   lower_score};
}

VBreakpoints extract_breakpoints(std::span<const BidProfile> dataset, const AuctionConfig& config) {
  if (dataset.empty()) throw ConfigError("dataset is empty");
  VBreakpoints out;
  out.pairs.reserve(dataset.size() * static_cast<std::size_t>(config.n_slots()));
  for (const auto& bids : dataset) {
    const auto sorted = sorted_unreserved_scores(config, bids);
    for (int s = 0; s < config.n_slots(); ++s) {
      const double weight = config.position_factor(s) / config.effective_ctr(sorted.order[s]);
      out.pairs.push_back(Breakpoint{sorted.scores[s], sorted.scores[s + 1], weight});
    }
  }
  return out;
}

VBreakpoints breakpoints_from_v_functions(std::span<const VFunction> functions) {
  VBreakpoints out;
  out.pairs.reserve(functions.size());
  for (std::size_t k = 0; k < functions.size(); ++k) {
    const auto& f = functions[k];
    if (f.params.eta != 0.0) {
      throw ConfigError("v-function " + std::to_string(k) +
                        " has eta > 0; only the eta = 0 (GSP) case is supported");
    }
    const double expected_a1 = f.params.a2 * f.q2;
    if (std::abs(f.params.a1 - expected_a1) > 1e-12 * std::max(1.0, std::abs(expected_a1))) {
      throw ConfigError("v-function " + std::to_string(k) + " violates a1 = a2 * q2");
    }
    out.pairs.push_back(Breakpoint{f.q1, f.q2, f.params.a2});
  }
  return out;
}

double empirical_loss(const VBreakpoints& bp, double r) {
  double total = 0.0;
  for (const auto& p : bp.pairs) total += pair_loss(p, r);
  return total;
}

std::vector<LossSegment> loss_segments(const VBreakpoints& bp) {
  check_pairs(bp);

  struct Event {
    double value;
    double weight;
    double lower;  // p2 for lower-knot events
    bool is_lower;
  };
  std::vector<Event> events;
  events.reserve(2 * bp.pairs.size());
  CompensatedSum d1;
  for (const auto& p : bp.pairs) {
    events.push_back(Event{p.p2, p.weight, p.p2, true});
    events.push_back(Event{p.p1, p.weight, 0.0, false});
    d1.add(-p.weight * p.p2);  // every pair sits in its flat -w p2 regime for r <= p2
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.value < b.value; });

  std::vector<LossSegment> segments;
  CompensatedSum d2;
  double lower = -std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  while (k < events.size()) {
    const double t = events[k].value;
    segments.push_back(LossSegment{lower, t, d1.value(), d2.value()});
    for (; k < events.size() && events[k].value == t; ++k) {
      const auto& e = events[k];
      if (e.is_lower) {
        d1.add(e.weight * e.lower);
        d2.add(e.weight);
      } else {
        d2.add(-e.weight);
      }
    }
    lower = t;
  }
  segments.push_back(LossSegment{lower, std::numeric_limits<double>::infinity(), d1.value(),
                                 d2.value()});
  return segments;
}

ReserveSolution minimize(const VBreakpoints& bp) {
  const auto segments = loss_segments(bp);
  double scale = 0.0;
  for (const auto& p : bp.pairs) scale += p.weight * p.p1;

  // Running-sum losses may differ from direct summation by rounding, so every
  // candidate within `tol` of the running best is re-evaluated directly.
  const double tol = 1e-10 * std::max(1.0, scale);
  double best_running = std::numeric_limits<double>::infinity();
  std::vector<double> near_best;
  std::size_t visited = 0;

  auto visit = [&](double r, const LossSegment& seg) {
    ++visited;
    const double l = seg.d1 - r * seg.d2;
    if (visited == 1) {
      const double direct = empirical_loss(bp, r);
      if (std::abs(direct - l) > tol) {
        throw NumericalError("sweep initialisation disagrees with direct evaluation at r = " +
                             std::to_string(r));
      }
    }
    if (l < best_running - tol) {
      best_running = l;
      near_best.clear();
      near_best.push_back(r);
    } else if (l <= best_running + tol) {
      best_running = std::min(best_running, l);
      near_best.push_back(r);
    }
  };

  // Knots are >= 0; r = 0 lies in the first segment when the smallest knot is positive.
  if (segments.front().upper > 0.0) visit(0.0, segments.front());
  for (std::size_t k = 0; k + 1 < segments.size(); ++k) visit(segments[k].upper, segments[k]);

  ReserveSolution sol;
  sol.candidates_evaluated = visited;
  sol.loss_value = std::numeric_limits<double>::infinity();
  for (double r : near_best) {  // ascending, so the first exact minimum is the smallest reserve
    const double l = empirical_loss(bp, r);
    if (l < sol.loss_value) {
      sol.loss_value = l;
      sol.reserve = r;
    }
  }
  return sol;
}

ReserveSolution brute_force(const VBreakpoints& bp) {
  check_pairs(bp);
  const auto candidates = distinct_candidates(bp);
  ReserveSolution sol;
  sol.candidates_evaluated = candidates.size();
  sol.loss_value = std::numeric_limits<double>::infinity();
  for (double r : candidates) {
    const double l = empirical_loss(bp, r);
    if (l < sol.loss_value) {
      sol.loss_value = l;
      sol.reserve = r;
    }
  }
  return sol;
}

double generalization_bound(double sum_position_factors, double min_ctr, std::size_t n,
                            double delta) {
  if (n < 1) throw ConfigError("generalization bound needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(min_ctr > 0.0)) throw ConfigError("minimum CTR must be > 0");
  if (!(sum_position_factors >= 0.0)) throw ConfigError("sum of position factors must be >= 0");
  const double dn = static_cast<double>(n);
  return 1.0 / std::sqrt(dn) + std::sqrt(std::log(std::exp(1.0) * dn) / dn) +
         std::sqrt(sum_position_factors * std::log(1.0 / delta) / (2.0 * min_ctr * dn));
}

std::vector<double> auction_losses(double r, std::span<const BidProfile> dataset,
                                   const AuctionConfig& config, Execution exec) {
  std::vector<double> losses(dataset.size());
  if (exec == Execution::Parallel) {
    const auto count = static_cast<std::ptrdiff_t>(dataset.size());
    // Exceptions must not escape an OpenMP region; validate up front.
    for (const auto& b : dataset) check_dimensions(config, b);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      losses[static_cast<std::size_t>(i)] =
          simplified_loss(r, config, dataset[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::size_t i = 0; i < dataset.size(); ++i) losses[i] = simplified_loss(r, config, dataset[i]);
  }
  return losses;
}

double evaluate_reserve(double r, std::span<const BidProfile> dataset, const AuctionConfig& config,
                        Execution exec) {
  if (dataset.empty()) throw ConfigError("dataset is empty");
  if (!(r >= 0.0)) throw ConfigError("scalar reserve must be non-negative");
  const auto losses = auction_losses(r, dataset, config, exec);
  return pairwise_sum(losses) / static_cast<double>(dataset.size());
}

ReserveSolution learn_reserve(std::span<const BidProfile> dataset, const AuctionConfig& config) {
  return minimize(extract_breakpoints(dataset, config));
}

}  // namespace gspr::discriminative
