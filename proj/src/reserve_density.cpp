#include "gspr/reserve_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gspr/errors.hpp"
#include "gspr/numeric.hpp"
#include "gspr/reserve_discriminative.hpp"

namespace gspr::density {

namespace {

std::vector<double> sorted_copy(std::vector<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw ConfigError("sample contains a non-finite value");
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

// p G^(p-1), zero when p = 0.
double power_derivative(int p, double g) { return p == 0 ? 0.0 : p * int_pow(g, p - 1); }

// (s-1) (1-G)^(s-2), zero when s = 1.
double survival_derivative(int s, double g) { return s == 1 ? 0.0 : (s - 1) * int_pow(1.0 - g, s - 2); }

struct InversionTerms {
  double numerator_bid = 0.0;    // A(b)
  double numerator_integral = 0.0;  // B(b)
  double denominator = 0.0;      // D(b)
};

// `partial_integral(s)` returns (1/n) sum_{b_j <= b} p G(b_j)^(p-1) b_j.
template <typename PartialIntegral>
Inversion combine(double b, double cdf_b, double dens_b, const AuctionConfig& config,
                  PartialIntegral&& partial_integral) {
  const int big_n = config.n_bidders();
  InversionTerms t;
  for (int s = 1; s <= config.n_slots(); ++s) {
    const int p = big_n - s;
    const double weight = config.position_factor(s - 1) * binomial(big_n - 1, s - 1);
    const double survival = int_pow(1.0 - cdf_b, s - 1);
    t.numerator_bid += weight * survival * b * power_derivative(p, cdf_b) * dens_b;
    if (s > 1) {
      t.numerator_integral += weight * survival_derivative(s, cdf_b) * dens_b * partial_integral(s);
    }
    t.denominator += weight * dens_b *
                     (power_derivative(p, cdf_b) * survival -
                      survival_derivative(s, cdf_b) * int_pow(cdf_b, p));
  }
  Inversion out;
  double denom = t.denominator;
  if (!(denom >= kDenominatorFloor)) {
    out.flagged = true;
    denom = kDenominatorFloor;
  }
  out.value = (t.numerator_bid - t.numerator_integral) / denom;
  return out;
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample) : sorted_(sorted_copy(std::move(sample))) {
  if (sorted_.empty()) throw ConfigError("empirical CDF needs a non-empty sample");
}

double EmpiricalCdf::operator()(double x) const {
  const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(k) / static_cast<double>(sorted_.size());
}

double triangular_kernel(double u) {
  const double a = std::abs(u);
  return a <= 1.0 ? 1.0 - a : 0.0;
}

Kde::Kde(std::vector<double> sample, double bandwidth, KernelType kernel)
    : sorted_(sorted_copy(std::move(sample))), h_(bandwidth), kernel_(kernel) {
  if (sorted_.empty()) throw ConfigError("kernel density estimate needs a non-empty sample");
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw ConfigError("bandwidth must be positive and finite");
}

double Kde::operator()(double x) const {
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x - h_);
  const auto last = std::upper_bound(first, sorted_.end(), x + h_);
  double total = 0.0;
  for (auto it = first; it != last; ++it) total += triangular_kernel((x - *it) / h_);
  return total / (static_cast<double>(sorted_.size()) * h_);
}

double bandwidth(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw ConfigError("bandwidth needs at least two observations");
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  if (*lo == *hi) throw ConfigError("bandwidth undefined for a constant sample");
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : sample) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw ConfigError("bandwidth undefined for a constant sample");
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

double kde_eval(const Kde& kde, double x) { return kde(x); }

Kde fit_kde(std::vector<double> sample) {
  const double h = bandwidth(sample);
  return Kde(std::move(sample), h);
}

Inversion invert_bid(double b, const EmpiricalCdf& ghat, const Kde& gdens,
                     const AuctionConfig& config, std::span<const double> sorted_bids) {
  const int big_n = config.n_bidders();
  const double n = static_cast<double>(sorted_bids.size());
  auto partial = [&](int s) {
    const int p = big_n - s;
    double acc = 0.0;
    for (double bj : sorted_bids) {
      if (bj > b) break;
      acc += power_derivative(p, ghat(bj)) * bj;
    }
    return acc / n;
  };
  return combine(b, ghat(b), gdens(b), config, partial);
}

BidInverter::BidInverter(std::vector<double> bids, const AuctionConfig& config)
    : config_(config), cdf_(bids), kde_(fit_kde(std::move(bids))) {
  const auto pts = cdf_.points();
  const int big_n = config_.n_bidders();
  const double n = static_cast<double>(pts.size());
  prefix_.assign(static_cast<std::size_t>(config_.n_slots()) + 1,
                 std::vector<double>(pts.size() + 1, 0.0));
  for (int s = 2; s <= config_.n_slots(); ++s) {
    auto& pre = prefix_[static_cast<std::size_t>(s)];
    const int p = big_n - s;
    double acc = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      acc += power_derivative(p, cdf_(pts[k])) * pts[k];
      pre[k + 1] = acc;
    }
    for (double& x : pre) x /= n;
  }
}

Inversion BidInverter::operator()(double b) const {
  const auto pts = cdf_.points();
  const auto upto = static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), b) - pts.begin());
  auto partial = [&](int s) { return prefix_[static_cast<std::size_t>(s)][upto]; };
  return combine(b, cdf_(b), kde_(b), config_, partial);
}

std::vector<double> RecoveredValuations::unflagged() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!flagged[i] && std::isfinite(values[i])) out.push_back(values[i]);
  }
  return out;
}

std::size_t RecoveredValuations::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

RecoveredValuations recover_valuations(std::span<const BidProfile> dataset,
                                       const AuctionConfig& config, Execution exec) {
  std::vector<double> scores;
  scores.reserve(dataset.size() * static_cast<std::size_t>(config.n_bidders()));
  for (const auto& profile : dataset) {
    check_dimensions(config, profile);
    for (int i = 0; i < config.n_bidders(); ++i) {
      const double b = profile.bids[static_cast<std::size_t>(i)];
      if (!std::isfinite(b) || b < 0.0) throw ConfigError("bids must be finite and >= 0");
      scores.push_back(config.effective_ctr(i) * b);
    }
  }
  if (scores.size() < kMinObservations) {
    throw ConfigError("valuation recovery needs at least " + std::to_string(kMinObservations) +
                      " bids, got " + std::to_string(scores.size()));
  }

  const BidInverter inverter(scores, config);
  RecoveredValuations out;
  out.bids = scores;
  out.values.assign(scores.size(), 0.0);
  std::vector<char> flags(scores.size(), 0);
  auto invert_one = [&](std::size_t k) {
    const auto inv = inverter(scores[k]);
    out.values[k] = inv.value;
    flags[k] = inv.flagged ? 1 : 0;
  };
  if (exec == Execution::Parallel) {
    const auto count = static_cast<std::ptrdiff_t>(scores.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) invert_one(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < scores.size(); ++k) invert_one(k);
  }
  out.flagged.assign(flags.begin(), flags.end());
  return out;
}

ReserveEstimate solve_fixed_point(const std::function<double(double)>& cdf,
                                  const std::function<double(double)>& pdf, double lo, double hi,
                                  const std::function<double(double)>& score) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("fixed-point search needs a finite interval with hi > lo");
  }
  auto h = [&](double r) { return r * pdf(r) - (1.0 - cdf(r)); };

  std::vector<double> grid(kRootScanPoints);
  std::vector<double> values(kRootScanPoints);
  for (std::size_t k = 0; k < kRootScanPoints; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kRootScanPoints - 1);
    values[k] = h(grid[k]);
  }

  ReserveEstimate est;
  for (std::size_t k = 0; k + 1 < kRootScanPoints; ++k) {
    const double ha = values[k];
    const double hb = values[k + 1];
    if (ha == 0.0) {
      est.roots.push_back(grid[k]);
      continue;
    }
    if ((ha < 0.0) == (hb < 0.0) || hb == 0.0) continue;
    double a = grid[k];
    double b = grid[k + 1];
    const bool rising = ha < 0.0;
    while (b - a > kRootTolerance) {
      const double mid = 0.5 * (a + b);
      const double hm = h(mid);
      if ((hm < 0.0) == rising) {
        a = mid;
      } else {
        b = mid;
      }
    }
    est.roots.push_back(0.5 * (a + b));
  }
  if (values.back() == 0.0) est.roots.push_back(grid.back());

  if (est.roots.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kRootScanPoints; ++k) {
      if (std::abs(values[k]) < std::abs(values[best])) best = k;
    }
    est.reserve = grid[best];
    est.is_root = false;
    return est;
  }

  est.reserve = est.roots.front();
  if (score && est.roots.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (double r : est.roots) {
      const double s = score(r);
      if (s < best) {
        best = s;
        est.reserve = r;
      }
    }
  }
  return est;
}

ReserveEstimate solve_reserve(const RecoveredValuations& values,
                              std::span<const BidProfile> training, const AuctionConfig* config) {
  auto usable = values.unflagged();
  if (usable.size() < kMinObservations) {
    throw NumericalError("reserve fixed point needs at least " + std::to_string(kMinObservations) +
                         " unflagged valuations, got " + std::to_string(usable.size()));
  }
  const EmpiricalCdf fhat(usable);
  const Kde fdens = fit_kde(usable);
  const double lo = fhat.points().front();
  const double hi = fhat.points().back();

  std::function<double(double)> score;
  if (!training.empty() && config != nullptr) {
    score = [&](double r) {
      return discriminative::evaluate_reserve(std::max(r, 0.0), training, *config,
                                              Execution::Serial);
    };
  }
  return solve_fixed_point([&](double x) { return fhat(x); }, [&](double x) { return fdens(x); },
                           lo, hi, score);
}

ReserveVector reserve_vector(double r_bar, const AuctionConfig& config) {
  if (!(r_bar >= 0.0) || !std::isfinite(r_bar)) throw ConfigError("reserve must be finite and >= 0");
  ReserveVector out;
  out.reserves.resize(static_cast<std::size_t>(config.n_bidders()));
  for (int i = 0; i < config.n_bidders(); ++i) {
    out.reserves[static_cast<std::size_t>(i)] = r_bar / config.effective_ctr(i);
  }
  return out;
}

}  // namespace gspr::density
