#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "catfour/basis.hpp"

namespace catfour {

/// Regularized-horseshoe hyperparameters.
///   alpha_i ~ N(0, tau^2 lt_i^2),  lt_i^2 = c^2 l_i^2 / (c^2 + tau^2 l_i^2)
///   l_i ~ C+(0, 1),  c^2 ~ IG(nu/2, nu s^2/2),  tau ~ C+(0, tau0)
///   tau0 = d0/(d - d0) * sigma/sqrt(t),  sigma ~ Exp(1),  y - f(x) ~ N(0, sigma^2)
struct HorseshoeHyper {
  double nu = 1.0;
  double s2 = 1.0;
  std::optional<double> d0;  // default max(1, ceil(d/100))
  /// Fit on standardized observations and map the draw back.
  bool standardize = true;

  double expected_relevant(std::size_t d) const;
  double tau0(std::size_t d, double sigma, std::size_t t) const;
};

struct McmcConfig {
  int warmup_draws = 200;  // sweeps before the first draw
  int refresh_draws = 20;  // sweeps per later draw; the chain is warm-started from the previous state
  int kept_draws = 1;      // sweeps whose final state becomes the returned draw
  RngSeed chain_seed{};
};

/// Sparse Bayesian regression over a zero_one one-hot basis. The sampler is
/// Gibbs over the coefficients (blocked Cholesky draw for small d, single-site
/// otherwise) with slice-sampling updates of log l_i, log tau, log c^2 and
/// log sigma.
class TcoModel {
 public:
  TcoModel(std::shared_ptr<const BasisSpec> spec, HorseshoeHyper hyper = {}, McmcConfig mcmc = {});

  const BasisSpec& spec() const { return *spec_; }
  const HorseshoeHyper& hyper() const { return hyper_; }
  std::size_t observations() const { return y_.size(); }

  void observe(const CategoricalPoint& point, double value);

  /// tau0 at the current number of observations for a given sigma.
  double tau0(double sigma) const;

  /// One posterior draw of the d coefficients (original units).
  std::vector<double> sample_coefficients();

  /// `draws` consecutive chain states after the usual warm-up; for posterior
  /// summaries.
  std::vector<std::vector<double>> sample_posterior(int draws);

  /// Restarts the chain from its initial state and seed.
  void reset_chain();

  /// Current noise scale (standardized units); exposed for diagnostics.
  double sigma() const { return state_.sigma; }

 private:
  struct Chain {
    std::vector<double> alpha;
    std::vector<double> log_local;
    double log_tau = 0.0;
    double log_c2 = 0.0;
    double sigma = 1.0;
    bool started = false;
  };

  void prepare_data();
  void sweep();
  void draw_alpha_blocked();
  void draw_alpha_single_site();
  std::vector<double> current_draw() const;
  double prior_variance(std::size_t i) const;

  std::shared_ptr<const BasisSpec> spec_;
  HorseshoeHyper hyper_;
  McmcConfig mcmc_;

  std::vector<std::vector<int>> column_rows_;  // rows where term j equals 1
  std::vector<double> y_;
  std::vector<double> ys_;        // standardized observations
  std::vector<double> residual_;  // ys - X alpha
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;

  Chain state_;
  Rng rng_;
};

/// <coeffs, psi(point)> + reg_lambda * (number of one-hot indicators equal to 1).
double acquisition(std::span<const double> coeffs, const BasisSpec& spec, const CategoricalPoint& point,
                   double reg_lambda);

}  // namespace catfour
