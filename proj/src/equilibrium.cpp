#include "gspr/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gspr/errors.hpp"
#include "gspr/numeric.hpp"
#include "gspr/random.hpp"

namespace gspr::equilibrium {

ValuationSample ValuationSample::from_draws(std::vector<double> draws) {
  for (double v : draws) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("valuations must be finite and >= 0");
  }
  std::sort(draws.begin(), draws.end());
  // A run of equal values x becomes x, x + eps, x + 2 eps, ...
  for (std::size_t i = 1; i < draws.size(); ++i) {
    if (draws[i] <= draws[i - 1]) {
      const double bumped = draws[i - 1] + kTieSeparation;
      draws[i] = bumped > draws[i - 1] ? bumped
                                       : std::nextafter(draws[i - 1], std::numeric_limits<double>::infinity());
    }
  }
  return ValuationSample{std::move(draws)};
}

EmpiricalGrids::EmpiricalGrids(std::size_t n) : F(n + 1), G(n + 1) {
  for (std::size_t i = 0; i <= n; ++i) {
    F[i] = static_cast<double>(i) / static_cast<double>(n);
    G[i] = 1.0 - F[i];
  }
}

TriangularSystem::TriangularSystem(std::size_t n)
    : u(n, 0.0), values(n, 0.0), n_(n), packed_(n * (n + 1) / 2, 0.0) {}

std::string SolveDiagnostics::describe() const {
  std::ostringstream os;
  os << "negative_bids=" << negative_bids << " monotonicity_violations=" << monotonicity_violations
     << " largest_drop=" << largest_drop << " max_increment=" << max_increment;
  return os.str();
}

namespace {

void check_slot(int slot, const AuctionConfig& config) {
  if (slot < 1 || slot > config.n_bidders()) {
    throw ConfigError("slot rank " + std::to_string(slot) + " outside [1, N=" +
                      std::to_string(config.n_bidders()) + "]");
  }
}

void check_index(std::size_t i, std::size_t n) {
  if (n < 1 || i < 1 || i > n) throw ConfigError("sample index outside [1, n]");
}

double grid_f(std::size_t i, std::size_t n) {
  return static_cast<double>(i) / static_cast<double>(n);
}

// Sum over j in [0, j_max], k in [0, s-1] of the tie-resolved slot probability.
double slot_probability_sum(int slot, int j_max, std::size_t i, std::size_t n, int n_bidders) {
  const double f_prev = grid_f(i - 1, n);
  const double g_this = 1.0 - grid_f(i, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    for (int k = 0; k <= slot - 1; ++k) {
      const int tied = n_bidders - 1 - j - k;
      total += multinomial3(j, k, tied) * int_pow(f_prev, j) * int_pow(g_this, k) *
               int_pow(inv_n, tied) / static_cast<double>(n_bidders - j - k);
    }
  }
  return total;
}

}  // namespace

double z_continuous(int slot, double cdf_value, const AuctionConfig& config) {
  check_slot(slot, config);
  if (!(cdf_value >= 0.0 && cdf_value <= 1.0)) throw ConfigError("CDF value outside [0, 1]");
  const int n = config.n_bidders();
  return binomial(n - 1, slot - 1) * int_pow(1.0 - cdf_value, slot - 1) *
         int_pow(cdf_value, n - slot);
}

double z_hat(int slot, std::size_t i, std::size_t n, const AuctionConfig& config) {
  check_slot(slot, config);
  check_index(i, n);
  const int big_n = config.n_bidders();
  return slot_probability_sum(slot, big_n - slot, i, n, big_n);
}

double z_hat_minus(int slot, std::size_t i, std::size_t n, const AuctionConfig& config) {
  check_slot(slot, config);
  check_index(i, n);
  const int big_n = config.n_bidders();
  return binomial(big_n - 1, slot - 1) * int_pow(grid_f(i - 1, n), big_n - slot) *
         int_pow(1.0 - grid_f(i - 1, n), slot - 1);
}

double diagonal_entry(int slot, std::size_t i, std::size_t n, const AuctionConfig& config) {
  check_slot(slot, config);
  check_index(i, n);
  const int big_n = config.n_bidders();
  return slot_probability_sum(slot, big_n - slot - 1, i, n, big_n);
}

double off_diagonal_entry(int slot, std::size_t i, std::size_t j, std::size_t n,
                          const AuctionConfig& config) {
  check_slot(slot, config);
  check_index(i, n);
  check_index(j, n);
  if (j >= i) throw ConfigError("off-diagonal entry requires i > j");
  const int big_n = config.n_bidders();
  const int p = big_n - slot;
  const double d_f = int_pow(grid_f(j, n), p) - int_pow(grid_f(j - 1, n), p);
  const double d_g = int_pow(1.0 - grid_f(i, n), slot) - int_pow(1.0 - grid_f(i - 1, n), slot);
  return -binomial(big_n - 1, slot - 1) * static_cast<double>(n) * d_f * d_g / slot;
}

TriangularSystem build_system(const ValuationSample& sample, const AuctionConfig& config,
                              Execution exec) {
  const auto& v = sample.values;
  const std::size_t n = v.size();
  if (n < 2) throw ConfigError("equilibrium system needs at least two sample points");
  if (config.n_bidders() < 2) throw ConfigError("equilibrium system needs N >= 2 bidders");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) throw ConfigError("valuations must be finite and >= 0");
    if (i > 0 && !(v[i] > v[i - 1])) {
      throw ConfigError("valuation sample must be strictly increasing (index " +
                        std::to_string(i + 1) + ")");
    }
  }
  const int big_n = config.n_bidders();
  const int n_slots = config.n_slots();
  if (!(config.position_factor(n_slots - 1) > 0.0)) throw ConfigError("c_S must be > 0");

  TriangularSystem sys(n);
  sys.values = v;
  const double dn = static_cast<double>(n);

  // Per-slot factors of the separable off-diagonal entries:
  //   c_s M_ij(s) = row_coef[s][i] * col_diff[s][j].
  std::vector<std::vector<double>> row_coef(n_slots, std::vector<double>(n + 1, 0.0));
  std::vector<std::vector<double>> col_diff(n_slots, std::vector<double>(n + 1, 0.0));
  for (int s = 1; s <= n_slots; ++s) {
    const int p = big_n - s;
    const double scale = -config.position_factor(s - 1) * binomial(big_n - 1, s - 1) * dn / s;
    for (std::size_t k = 1; k <= n; ++k) {
      const double g_k = 1.0 - grid_f(k, n);
      const double g_prev = 1.0 - grid_f(k - 1, n);
      row_coef[s - 1][k] = scale * (int_pow(g_k, s) - int_pow(g_prev, s));
      col_diff[s - 1][k] = int_pow(grid_f(k, n), p) - int_pow(grid_f(k - 1, n), p);
    }
  }

  // Right-hand side: running sums of z_hat_minus(v_j) * dv_j are inherently
  // sequential and cheap, so u is assembled serially.
  std::vector<double> running(n_slots, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double dv = v[i - 1] - (i > 1 ? v[i - 2] : 0.0);
    double u_i = 0.0;
    for (int s = 1; s <= n_slots; ++s) {
      running[s - 1] += z_hat_minus(s, i, n, config) * dv;
      u_i += config.position_factor(s - 1) *
             (z_hat(s, i, n, config) * v[i - 1] - running[s - 1]);
    }
    sys.u[i - 1] = u_i;
  }

  auto fill_row = [&](std::size_t i) {
    auto row = sys.row(i - 1);
    double diag = 0.0;
    for (int s = 1; s <= n_slots; ++s) {
      diag += config.position_factor(s - 1) * diagonal_entry(s, i, n, config);
    }
    row[i - 1] = diag;
    for (std::size_t j = 1; j < i; ++j) {
      double m = 0.0;
      for (int s = 0; s < n_slots; ++s) m += row_coef[s][i] * col_diff[s][j];
      row[j - 1] = m;
    }
  };

  if (exec == Execution::Parallel) {
    const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 1; i <= rows; ++i) fill_row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 1; i <= n; ++i) fill_row(i);
  }
  return sys;
}

EmpiricalBidFunction solve(const TriangularSystem& system) {
  const std::size_t n = system.size();
  EmpiricalBidFunction f;
  f.grid_values = system.values;
  f.grid_bids.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = system.row(i);
    const double diag = row[i];
    if (!(diag > 0.0)) {
      throw NumericalError("triangular system has non-positive diagonal at row " +
                           std::to_string(i + 1) + " (M_ii = " + std::to_string(diag) + ")");
    }
    double acc = system.u[i];
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * f.grid_bids[j];
    f.grid_bids[i] = acc / diag;
  }

  auto& d = f.diagnostics;
  for (std::size_t i = 0; i < n; ++i) {
    if (f.grid_bids[i] < 0.0) ++d.negative_bids;
    if (i > 0) {
      const double step = f.grid_bids[i] - f.grid_bids[i - 1];
      d.max_increment = std::max(d.max_increment, step);
      if (-step > kMonotoneTolerance) {
        ++d.monotonicity_violations;
        d.largest_drop = std::max(d.largest_drop, -step);
      }
    } else {
      d.max_increment = f.grid_bids[0];
    }
  }
  return f;
}

EmpiricalBidFunction solve_equilibrium(const ValuationSample& sample, const AuctionConfig& config,
                                       Execution exec) {
  return solve(build_system(sample, config, exec));
}

double residual_inf(const TriangularSystem& system, std::span<const double> beta) {
  double worst = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto row = system.row(i);
    double acc = -system.u[i];
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * beta[j];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

double bid_at(const EmpiricalBidFunction& f, double v) {
  const auto& xs = f.grid_values;
  const auto& ys = f.grid_bids;
  if (xs.empty()) throw ConfigError("bid_at on an empty bid function");
  if (v <= xs.front()) return ys.front();
  if (v >= xs.back()) return ys.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), v) - xs.begin());
  const std::size_t lo = hi - 1;
  if (v == xs[lo]) return ys[lo];
  const double t = (v - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

namespace {

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

}  // namespace

ConvergenceResult convergence_sweep(const ValuationSampler& sampler,
                                    std::span<const std::size_t> n_list, std::size_t reps,
                                    const AuctionConfig& config, std::size_t reference_n,
                                    std::uint64_t master_seed, Execution exec) {
  if (n_list.empty() || reps == 0) throw ConfigError("convergence sweep needs sizes and reps");
  if (reference_n < *std::max_element(n_list.begin(), n_list.end())) {
    throw ConfigError("reference_n must be at least max(n_list)");
  }

  ConvergenceResult result;
  const auto ref_sample =
      ValuationSample::from_draws(sampler(reference_n, derive_seed(master_seed, "reference")));
  result.reference = solve_equilibrium(ref_sample, config, exec);

  const std::uint64_t sweep_seed = derive_seed(master_seed, "convergence");
  const std::size_t tasks = n_list.size() * reps;
  result.rows.resize(tasks);
  result.fits.resize(tasks);

  auto run_task = [&](std::size_t t) {
    const std::size_t n = n_list[t / reps];
    const std::size_t rep = t % reps;
    const std::uint64_t seed = derive_seed(derive_seed(sweep_seed, n), rep);
    const auto sample = ValuationSample::from_draws(sampler(n, seed));
    auto fit = solve_equilibrium(sample, config, Execution::Serial);
    double sup = 0.0;
    for (std::size_t i = 0; i < fit.grid_values.size(); ++i) {
      sup = std::max(sup, std::abs(fit.grid_bids[i] - bid_at(result.reference, fit.grid_values[i])));
    }
    result.rows[t] = ConvergenceRow{n, rep, sup};
    result.fits[t] = std::move(fit);
  };

  if (exec == Execution::Parallel) {
    const auto count = static_cast<std::ptrdiff_t>(tasks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < count; ++t) run_task(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  }

  for (std::size_t k = 0; k < n_list.size(); ++k) {
    std::vector<double> errs;
    for (std::size_t r = 0; r < reps; ++r) errs.push_back(result.rows[k * reps + r].sup_error);
    ConvergenceSummary s{n_list[k], pairwise_sum(errs) / static_cast<double>(reps),
                         median_of(errs), *std::min_element(errs.begin(), errs.end()),
                         *std::max_element(errs.begin(), errs.end())};
    result.summary.push_back(s);
    result.envelope_constant =
        std::max(result.envelope_constant, s.mean * std::sqrt(static_cast<double>(s.n)));
  }
  return result;
}

}  // namespace gspr::equilibrium
