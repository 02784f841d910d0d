#include "gspr/harness/distributions.hpp"

#include <cmath>
#include <string>

#include "gspr/errors.hpp"

namespace gspr::harness {

ValuationDistribution ValuationDistribution::uniform(double a, double b) {
  ValuationDistribution d;
  d.kind = Kind::Uniform;
  d.a = a;
  d.b = b;
  return d;
}

ValuationDistribution ValuationDistribution::trunc_lognormal(double mu, double sigma, double hi) {
  ValuationDistribution d;
  d.kind = Kind::TruncLogNormal;
  d.mu = mu;
  d.sigma = sigma;
  d.hi = hi;
  return d;
}

ValuationDistribution ValuationDistribution::mixture(std::vector<MixtureComponent> components) {
  ValuationDistribution d;
  d.kind = Kind::Mixture;
  d.components = std::move(components);
  return d;
}

double ValuationDistribution::acceptance_probability() const {
  switch (kind) {
    case Kind::Uniform:
      return 1.0;
    case Kind::TruncLogNormal: {
      if (std::isinf(hi)) return 1.0;
      const double z = (std::log(hi) - mu) / sigma;
      return 0.5 * std::erfc(-z / std::sqrt(2.0));
    }
    case Kind::Mixture: {
      double worst = 1.0;
      for (const auto& c : components) worst = std::min(worst, c.dist.acceptance_probability());
      return worst;
    }
  }
  return 1.0;
}

void ValuationDistribution::validate() const {
  switch (kind) {
    case Kind::Uniform:
      if (!(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && b > a)) {
        throw ConfigError("uniform valuation distribution needs 0 <= a < b");
      }
      break;
    case Kind::TruncLogNormal:
      if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma) || !(hi > 0.0)) {
        throw ConfigError("truncated log-normal needs finite mu, sigma > 0 and hi > 0");
      }
      break;
    case Kind::Mixture: {
      if (components.empty()) throw ConfigError("mixture needs at least one component");
      double total = 0.0;
      for (const auto& c : components) {
        if (!(c.weight > 0.0)) throw ConfigError("mixture weights must be positive");
        c.dist.validate();
        total += c.weight;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("mixture weights sum to " + std::to_string(total) + ", expected 1");
      }
      break;
    }
  }
  const double acc = acceptance_probability();
  if (acc < kMinAcceptanceRate) {
    throw ConfigError("truncation acceptance rate " + std::to_string(acc) + " below " +
                      std::to_string(kMinAcceptanceRate));
  }
}

double ValuationDistribution::draw(CounterRng& rng) const {
  switch (kind) {
    case Kind::Uniform:
      return a + (b - a) * rng.uniform();
    case Kind::TruncLogNormal:
      for (;;) {
        const double x = std::exp(mu + sigma * rng.normal());
        if (x <= hi) return x;
      }
    case Kind::Mixture: {
      const double u = rng.uniform();
      double cumulative = 0.0;
      for (const auto& c : components) {
        cumulative += c.weight;
        if (u < cumulative) return c.dist.draw(rng);
      }
      return components.back().dist.draw(rng);
    }
  }
  return 0.0;
}

ValuationDistribution default_mixture() {
  return ValuationDistribution::mixture({
      {0.5, ValuationDistribution::trunc_lognormal(std::log(0.5), 0.8, 1.5)},
      {0.5, ValuationDistribution::trunc_lognormal(std::log(2.0), 0.1, 2.5)},
  });
}

std::vector<double> draw_valuations(const ValuationDistribution& dist, std::size_t n,
                                    std::uint64_t seed) {
  dist.validate();
  CounterRng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = dist.draw(rng);
  return out;
}

equilibrium::ValuationSample sample_valuations(const ValuationDistribution& dist, std::size_t n,
                                               std::uint64_t seed) {
  return equilibrium::ValuationSample::from_draws(draw_valuations(dist, n, seed));
}

}  // namespace gspr::harness
