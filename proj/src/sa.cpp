#include "catfour/sa.hpp"

#include <algorithm>
#include <cmath>

namespace catfour {

double sa_temperature(double decay, int t, int n) {
  return std::exp(-decay * static_cast<double>(t) / static_cast<double>(n));
}

std::vector<double> gibbs_probabilities(std::span<const double> values, double temperature) {
  std::vector<double> probs(values.size());
  if (values.empty()) return probs;
  if (!(temperature > 0.0)) throw InvalidArgument("Gibbs temperature must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("Gibbs values must be finite");
  }
  // Largest logit -v/s belongs to the smallest value.
  const double best = *std::min_element(values.begin(), values.end());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = std::exp(-(values[i] - best) / temperature);
    total += probs[i];
  }
  for (auto& p : probs) p /= total;
  return probs;
}

int sample_gibbs(std::span<const double> values, double temperature, Rng& rng) {
  const auto probs = gibbs_probabilities(values, temperature);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding can leave acc slightly below 1; fall back to the last level with mass.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

CategoricalPoint sa_minimize(const SurrogateFn& surrogate, const CategoricalSpace& space, const SaConfig& config,
                             Rng& rng) {
  if (!(config.decay > 0.0)) throw InvalidArgument("SA decay must be positive");
  if (config.iterations < 1) throw InvalidArgument("SA needs at least one iteration");

  CategoricalPoint x;
  if (config.warm_start) {
    require_valid(*config.warm_start, space);
    x = *config.warm_start;
  } else {
    x = random_point(space, rng);
  }

  std::uniform_int_distribution<int> pick(0, space.n - 1);
  std::vector<double> values(static_cast<std::size_t>(space.k));
  for (int t = 0; t < config.iterations; ++t) {
    const int i = pick(rng);
    for (int level = 0; level < space.k; ++level) {
      x[i] = level;
      values[level] = surrogate(x);
      if (!std::isfinite(values[level])) throw InvalidArgument("surrogate returned a non-finite value");
    }
    x[i] = sample_gibbs(values, sa_temperature(config.decay, t, space.n), rng);
  }
  return x;
}

}  // namespace catfour
