#include "catfour/eco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace catfour {

const double LrState::c_const = std::sqrt(2.0 * (std::numbers::sqrt2 - 1.0) / (std::numbers::e - 2.0));

double LrState::eta(std::size_t d) const {
  const double log2d = std::log(2.0 * static_cast<double>(d));
  const double inf = std::numeric_limits<double>::infinity();
  const double range_bound = e_prev > 0.0 ? 1.0 / e_prev : inf;
  const double variance_bound = v_prev > 0.0 ? c_const * std::sqrt(log2d / v_prev) : inf;
  const double eta = std::min(range_bound, variance_bound);
  if (std::isinf(eta)) return std::min(1.0, c_const * std::sqrt(log2d));
  return eta;
}

double dyadic_ceil(double x) {
  if (!(x > 0.0)) return 0.0;
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent, mantissa in [0.5, 1)
  return mantissa == 0.5 ? std::ldexp(1.0, exponent - 1) : std::ldexp(1.0, exponent);
}

EcoModel::EcoModel(std::shared_ptr<const BasisSpec> spec, double lambda) : spec_(std::move(spec)), lambda_(lambda) {
  if (!spec_) throw InvalidArgument("ECO model needs a basis");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw InvalidArgument("ECO sparsity lambda must be positive");
  const std::size_t d = spec_->size();
  const double init = lambda_ / (2.0 * static_cast<double>(d));
  alpha_plus_.assign(d, init);
  alpha_minus_.assign(d, init);
  coeffs_.assign(d, 0.0);
  psi_.resize(d);
}

double EcoModel::total_mass() const {
  double total = 0.0;
  for (std::size_t j = 0; j < alpha_plus_.size(); ++j) total += alpha_plus_[j] + alpha_minus_[j];
  return total;
}

double EcoModel::predict(const CategoricalPoint& point) const {
  require_valid(point, spec_->space());
  return spec_->dot(coeffs_, point.values());
}

double EcoModel::update(const CategoricalPoint& point, double observed, std::optional<double> forced_eta) {
  if (!std::isfinite(observed)) throw InvalidArgument("ECO update needs a finite observation");
  require_valid(point, spec_->space());
  const std::size_t d = spec_->size();
  spec_->eval_into(point.values(), psi_);

  double prediction = 0.0;
  for (std::size_t j = 0; j < d; ++j) prediction += coeffs_[j] * psi_[j];
  const double mixture_loss = prediction - observed;

  const double eta = forced_eta ? *forced_eta : lr_.eta(d);

  // Gains z_j^+ = -L_j and z_j^- = +L_j with L_j = 2 lambda loss psi_j; the
  // variance uses the pre-update weights on the probability simplex.
  const double scale = 2.0 * lambda_ * mixture_loss;
  double max_abs = 0.0;
  double mean = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double l = scale * psi_[j];
    max_abs = std::max(max_abs, std::abs(l));
    mean += (alpha_minus_[j] - alpha_plus_[j]) * l;
  }
  mean /= lambda_;
  double variance = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double l = scale * psi_[j];
    const double dp = -l - mean;
    const double dm = l - mean;
    variance += alpha_plus_[j] * dp * dp + alpha_minus_[j] * dm * dm;
  }
  variance /= lambda_;
  lr_.e_prev = std::max(lr_.e_prev, dyadic_ceil(2.0 * max_abs));
  lr_.v_prev += variance;
  ++lr_.steps;

  // Every exponent is shifted by the largest one so no factor exceeds 1;
  // the common scale cancels in the normalization.
  constexpr double kFloor = 1e-300;
  const double shift = eta * max_abs;
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double l = scale * psi_[j];
    alpha_plus_[j] = std::max(alpha_plus_[j] * std::exp(-eta * l - shift), kFloor);
    alpha_minus_[j] = std::max(alpha_minus_[j] * std::exp(eta * l - shift), kFloor);
    total += alpha_plus_[j] + alpha_minus_[j];
  }
  const double renorm = lambda_ / total;
  for (std::size_t j = 0; j < d; ++j) {
    alpha_plus_[j] *= renorm;
    alpha_minus_[j] *= renorm;
  }
  refresh_coefficients();
  return mixture_loss;
}

void EcoModel::set_weights(std::vector<double> plus, std::vector<double> minus) {
  const std::size_t d = spec_->size();
  if (plus.size() != d || minus.size() != d) throw DimensionMismatch("ECO weights must have length d");
  auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!std::all_of(plus.begin(), plus.end(), nonneg) || !std::all_of(minus.begin(), minus.end(), nonneg)) {
    throw InvalidArgument("ECO weights must be finite and nonnegative");
  }
  alpha_plus_ = std::move(plus);
  alpha_minus_ = std::move(minus);
  refresh_coefficients();
}

void EcoModel::refresh_coefficients() {
  for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] = alpha_plus_[j] - alpha_minus_[j];
}

void EcoModel::write_snapshot_csv(std::ostream& out) const {
  std::ostringstream buf;
  buf.precision(17);
  buf << "term,alpha_plus,alpha_minus\n";
  for (std::size_t j = 0; j < alpha_plus_.size(); ++j) {
    buf << j << ',' << alpha_plus_[j] << ',' << alpha_minus_[j] << '\n';
  }
  out << buf.str();
}

}  // namespace catfour
