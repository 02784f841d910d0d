#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "gspr/equilibrium.hpp"
#include "gspr/random.hpp"

namespace gspr::harness {

/// Truncated draws are made by rejection; a distribution whose acceptance
/// probability falls below this is refused.
inline constexpr double kMinAcceptanceRate = 1e-3;

struct MixtureComponent;

struct ValuationDistribution {
  enum class Kind { Uniform, TruncLogNormal, Mixture };

  Kind kind = Kind::Uniform;
  double a = 0.0;  // Uniform lower bound
  double b = 1.0;  // Uniform upper bound
  double mu = 0.0;
  double sigma = 1.0;
  double hi = std::numeric_limits<double>::infinity();  // truncation point
  std::vector<MixtureComponent> components;

  static ValuationDistribution uniform(double a, double b);
  static ValuationDistribution trunc_lognormal(double mu, double sigma, double hi);
  static ValuationDistribution mixture(std::vector<MixtureComponent> components);

  /// Throws ConfigError on invalid parameters, weights that do not sum to 1,
  /// or an acceptance rate below kMinAcceptanceRate.
  void validate() const;
  /// P(accept) of one rejection-sampling attempt (1 for Uniform).
  double acceptance_probability() const;
  double draw(CounterRng& rng) const;
};

struct MixtureComponent {
  double weight;
  ValuationDistribution dist;
};

/// The two-component truncated log-normal mixture used in the experiments.
ValuationDistribution default_mixture();

/// n i.i.d. draws in generation order.
std::vector<double> draw_valuations(const ValuationDistribution& dist, std::size_t n,
                                    std::uint64_t seed);

/// n i.i.d. draws, sorted, ties separated.
equilibrium::ValuationSample sample_valuations(const ValuationDistribution& dist, std::size_t n,
                                               std::uint64_t seed);

}  // namespace gspr::harness
