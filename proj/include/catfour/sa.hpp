#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "catfour/domain.hpp"

namespace catfour {

using SurrogateFn = std::function<double(const CategoricalPoint&)>;

struct SaConfig {
  double decay = 3.0;  // s(t) = exp(-decay * t / n)
  int iterations = 1;  // single-variable moves
  std::optional<CategoricalPoint> warm_start;
};

/// exp(-decay * t / n)
double sa_temperature(double decay, int t, int n);

/// Softmax over -values/temperature, computed with max-subtraction.
std::vector<double> gibbs_probabilities(std::span<const double> values, double temperature);

/// Draws an index from gibbs_probabilities(values, temperature).
int sample_gibbs(std::span<const double> values, double temperature, Rng& rng);

/// Simulated annealing with single-variable softmax Gibbs moves. Each move
/// picks a variable uniformly, evaluates the surrogate at all k of its levels
/// and resamples it. Calls `surrogate` exactly k * iterations times.
CategoricalPoint sa_minimize(const SurrogateFn& surrogate, const CategoricalSpace& space, const SaConfig& config,
                             Rng& rng);

}  // namespace catfour
