#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "catfour/basis.hpp"

namespace catfour {

/// State of the anytime learning-rate schedule.
struct LrState {
  /// sqrt(2 (sqrt 2 - 1) / (e - 2))
  static const double c_const;

  double e_prev = 0.0;  // dyadic bound on the range of per-expert gains seen so far; 0 = none yet
  double v_prev = 0.0;  // cumulative weighted variance of the gains
  std::size_t steps = 0;

  /// eta_t = min(1/e_{t-1}, c sqrt(ln(2d)/v_{t-1})), with the t=1 fallback
  /// min(1, c sqrt(ln 2d)) while neither bound is defined.
  double eta(std::size_t d) const;
};

/// Smallest power of two >= x (0 for x == 0).
double dyadic_ceil(double x);

/// Online exponential-weights regression over a basis. Each term j is an
/// expert with a split coefficient alpha_j = alpha_plus[j] - alpha_minus[j];
/// total mass is held at lambda.
class EcoModel {
 public:
  explicit EcoModel(std::shared_ptr<const BasisSpec> spec, double lambda = 1.0);

  const BasisSpec& spec() const { return *spec_; }
  double lambda() const { return lambda_; }
  std::span<const double> alpha_plus() const { return alpha_plus_; }
  std::span<const double> alpha_minus() const { return alpha_minus_; }
  const LrState& lr_state() const { return lr_; }
  double total_mass() const;

  /// alpha_plus - alpha_minus.
  std::span<const double> coefficients() const { return coeffs_; }

  double predict(const CategoricalPoint& point) const;
  double predict(std::span<const int> point) const { return spec_->dot(coeffs_, point); }

  /// One exponential-weights step on (point, observed). Returns the mixture
  /// loss predict(point) - observed. `forced_eta` bypasses the schedule.
  double update(const CategoricalPoint& point, double observed, std::optional<double> forced_eta = std::nullopt);

  /// Replaces the weights; both vectors must be nonnegative with length d.
  void set_weights(std::vector<double> plus, std::vector<double> minus);

  /// Debug dump `term,alpha_plus,alpha_minus`.
  void write_snapshot_csv(std::ostream& out) const;

 private:
  void refresh_coefficients();

  std::shared_ptr<const BasisSpec> spec_;
  double lambda_;
  std::vector<double> alpha_plus_;
  std::vector<double> alpha_minus_;
  std::vector<double> coeffs_;
  std::vector<double> psi_;  // scratch
  LrState lr_;
};

}  // namespace catfour
