#include "catfour/tco.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

namespace catfour {

namespace {

// Blocked coefficient draws are used up to this many terms.
constexpr std::size_t kBlockedLimit = 400;
constexpr double kMaxExp = 700.0;

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

// Univariate slice sampler with stepping out and shrinkage.
template <class LogDensity>
double slice_sample(LogDensity&& log_density, double x0, double width, Rng& rng, int max_steps = 32) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double threshold = log_density(x0) - std::exponential_distribution<double>(1.0)(rng);
  double left = x0 - width * unif(rng);
  double right = left + width;
  int j = static_cast<int>(std::floor(max_steps * unif(rng)));
  int k = max_steps - 1 - j;
  while (j-- > 0 && log_density(left) > threshold) left -= width;
  while (k-- > 0 && log_density(right) > threshold) right += width;
  for (int iter = 0; iter < 200; ++iter) {
    const double x1 = left + unif(rng) * (right - left);
    if (log_density(x1) > threshold) return x1;
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  return x0;
}

}  // namespace

double HorseshoeHyper::expected_relevant(std::size_t d) const {
  const double value = d0 ? *d0 : std::max(1.0, std::ceil(static_cast<double>(d) / 100.0));
  if (value < 1.0 || value >= static_cast<double>(d)) {
    throw InvalidArgument("expected relevant coefficients d0 must satisfy 1 <= d0 < d");
  }
  return value;
}

double HorseshoeHyper::tau0(std::size_t d, double sigma, std::size_t t) const {
  const double d0v = expected_relevant(d);
  return d0v / (static_cast<double>(d) - d0v) * sigma / std::sqrt(static_cast<double>(std::max<std::size_t>(t, 1)));
}

TcoModel::TcoModel(std::shared_ptr<const BasisSpec> spec, HorseshoeHyper hyper, McmcConfig mcmc)
    : spec_(std::move(spec)), hyper_(hyper), mcmc_(mcmc), rng_(make_rng(mcmc.chain_seed, 4)) {
  if (!spec_) throw InvalidArgument("TCO model needs a basis");
  if (spec_->kind() != BasisKind::one_hot_fourier || spec_->encoding() != OneHotEncoding::zero_one) {
    throw InvalidArgument("TCO model needs a one-hot Fourier basis with the zero_one encoding");
  }
  if (!(hyper_.nu > 0.0) || !(hyper_.s2 > 0.0)) throw InvalidArgument("horseshoe nu and s2 must be positive");
  hyper_.expected_relevant(spec_->size());
  if (mcmc_.warmup_draws < 50) throw InvalidArgument("MCMC warm-up needs at least 50 draws");
  if (mcmc_.refresh_draws < 1 || mcmc_.kept_draws < 1) throw InvalidArgument("MCMC draw counts must be >= 1");
  column_rows_.resize(spec_->size());
  reset_chain();
}

void TcoModel::reset_chain() {
  const std::size_t d = spec_->size();
  state_ = Chain{};
  state_.alpha.assign(d, 0.0);
  state_.log_local.assign(d, 0.0);
  state_.log_c2 = std::log(hyper_.s2);
  state_.sigma = 1.0;
  rng_ = make_rng(mcmc_.chain_seed, 4);
}

void TcoModel::observe(const CategoricalPoint& point, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("TCO observation must be finite");
  require_valid(point, spec_->space());
  std::vector<std::size_t> active;
  spec_->active_terms(point.values(), active);
  const int row = static_cast<int>(y_.size());
  for (auto j : active) column_rows_[j].push_back(row);
  y_.push_back(value);
}

double TcoModel::tau0(double sigma) const { return hyper_.tau0(spec_->size(), sigma, y_.size()); }

double TcoModel::prior_variance(std::size_t i) const {
  const double e = std::min(-2.0 * (state_.log_tau + state_.log_local[i]), kMaxExp);
  return 1.0 / (std::exp(e) + std::exp(-state_.log_c2));
}

void TcoModel::prepare_data() {
  const std::size_t t = y_.size();
  y_mean_ = 0.0;
  y_scale_ = 1.0;
  if (hyper_.standardize) {
    for (double v : y_) y_mean_ += v;
    y_mean_ /= static_cast<double>(t);
    if (t >= 2) {
      double ss = 0.0;
      for (double v : y_) ss += (v - y_mean_) * (v - y_mean_);
      const double sd = std::sqrt(ss / static_cast<double>(t - 1));
      if (sd > 1e-12) y_scale_ = sd;
    }
  }
  ys_.resize(t);
  for (std::size_t r = 0; r < t; ++r) ys_[r] = (y_[r] - y_mean_) / y_scale_;
  residual_ = ys_;
  for (std::size_t j = 0; j < column_rows_.size(); ++j) {
    const double a = state_.alpha[j];
    if (a == 0.0) continue;
    for (int r : column_rows_[j]) residual_[r] -= a;
  }
}

void TcoModel::draw_alpha_single_site() {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_s2 = 1.0 / (state_.sigma * state_.sigma);
  for (std::size_t i = 0; i < column_rows_.size(); ++i) {
    const auto& rows = column_rows_[i];
    const double old = state_.alpha[i];
    double proj = 0.0;
    for (int r : rows) proj += residual_[r];
    proj += old * static_cast<double>(rows.size());
    const double precision = static_cast<double>(rows.size()) * inv_s2 + 1.0 / prior_variance(i);
    const double mean = proj * inv_s2 / precision;
    const double fresh = mean + normal(rng_) / std::sqrt(precision);
    const double delta = fresh - old;
    if (delta != 0.0) {
      for (int r : rows) residual_[r] -= delta;
    }
    state_.alpha[i] = fresh;
  }
}

void TcoModel::draw_alpha_blocked() {
  const auto d = static_cast<Eigen::Index>(column_rows_.size());
  const auto t = static_cast<Eigen::Index>(y_.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(t, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (int r : column_rows_[j]) x(r, j) = 1.0;
  }
  const Eigen::Map<const Eigen::VectorXd> ys(ys_.data(), t);
  const double inv_s2 = 1.0 / (state_.sigma * state_.sigma);
  Eigen::MatrixXd precision = (x.transpose() * x) * inv_s2;
  for (Eigen::Index j = 0; j < d; ++j) precision(j, j) += 1.0 / prior_variance(static_cast<std::size_t>(j));
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    draw_alpha_single_site();
    return;
  }
  const Eigen::VectorXd mean = llt.solve(x.transpose() * ys * inv_s2);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(rng_);
  const Eigen::VectorXd draw = mean + llt.matrixU().solve(z);
  for (Eigen::Index j = 0; j < d; ++j) state_.alpha[static_cast<std::size_t>(j)] = draw(j);
  const Eigen::VectorXd res = ys - x * draw;
  for (Eigen::Index r = 0; r < t; ++r) residual_[static_cast<std::size_t>(r)] = res(r);
}

void TcoModel::sweep() {
  const std::size_t d = spec_->size();
  const std::size_t t = y_.size();
  if (d <= kBlockedLimit) {
    draw_alpha_blocked();
  } else {
    draw_alpha_single_site();
  }

  double rss = 0.0;
  for (double r : residual_) rss += r * r;

  // Local scales.
  for (std::size_t i = 0; i < d; ++i) {
    const double a2 = state_.alpha[i] * state_.alpha[i];
    const double log_tau = state_.log_tau;
    const double inv_c2 = std::exp(-state_.log_c2);
    auto log_density = [&](double u) {
      const double inv_v = std::exp(std::min(-2.0 * (log_tau + u), kMaxExp)) + inv_c2;
      return 0.5 * std::log(inv_v) - 0.5 * a2 * inv_v - softplus(2.0 * u) + u;
    };
    state_.log_local[i] = slice_sample(log_density, state_.log_local[i], 1.0, rng_);
  }

  // Sum over coefficients of log N(alpha_i; 0, v_i) for given log tau and log c^2.
  auto coefficient_term = [&](double log_tau, double log_c2) {
    const double inv_c2 = std::exp(-log_c2);
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double inv_v = std::exp(std::min(-2.0 * (log_tau + state_.log_local[i]), kMaxExp)) + inv_c2;
      total += 0.5 * std::log(inv_v) - 0.5 * state_.alpha[i] * state_.alpha[i] * inv_v;
    }
    return total;
  };

  const double log_tau0_unit = std::log(tau0(1.0));  // log tau0 at sigma = 1
  const double log_sigma = std::log(state_.sigma);

  state_.log_tau = slice_sample(
      [&](double u) {
        return coefficient_term(u, state_.log_c2) - softplus(2.0 * (u - (log_tau0_unit + log_sigma))) + u;
      },
      state_.log_tau, 1.0, rng_);

  const double shape = hyper_.nu / 2.0;
  const double rate = hyper_.nu * hyper_.s2 / 2.0;
  state_.log_c2 = slice_sample(
      [&](double w) { return coefficient_term(state_.log_tau, w) - (shape + 1.0) * w - rate * std::exp(-w) + w; },
      state_.log_c2, 1.0, rng_);

  const double n_obs = static_cast<double>(t);
  const double new_log_sigma = slice_sample(
      [&](double w) {
        const double log_tau0 = log_tau0_unit + w;
        return -n_obs * w - 0.5 * rss * std::exp(std::min(-2.0 * w, kMaxExp)) - std::exp(w) - log_tau0 -
               softplus(2.0 * (state_.log_tau - log_tau0)) + w;
      },
      log_sigma, 1.0, rng_);
  state_.sigma = std::exp(new_log_sigma);
}

std::vector<double> TcoModel::current_draw() const {
  std::vector<double> out(state_.alpha.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = state_.alpha[j] * y_scale_;
  // Term 0 is the constant monomial.
  out[0] += y_mean_;
  return out;
}

std::vector<double> TcoModel::sample_coefficients() {
  if (y_.empty()) throw InvalidArgument("TCO model has no observations to sample from");
  prepare_data();
  if (!state_.started) {
    state_.log_tau = std::log(tau0(state_.sigma));
    for (int s = 0; s < mcmc_.warmup_draws; ++s) sweep();
    state_.started = true;
  } else {
    for (int s = 0; s < mcmc_.refresh_draws; ++s) sweep();
  }
  for (int s = 0; s < mcmc_.kept_draws - 1; ++s) sweep();
  return current_draw();
}

std::vector<std::vector<double>> TcoModel::sample_posterior(int draws) {
  std::vector<std::vector<double>> out;
  if (draws < 1) return out;
  out.push_back(sample_coefficients());
  for (int i = 1; i < draws; ++i) {
    sweep();
    out.push_back(current_draw());
  }
  return out;
}

double acquisition(std::span<const double> coeffs, const BasisSpec& spec, const CategoricalPoint& point,
                   double reg_lambda) {
  require_valid(point, spec.space());
  if (coeffs.size() != spec.size()) throw DimensionMismatch("acquisition needs one coefficient per term");
  const int reference = spec.space().k - 1;
  int active = 0;
  for (int v : point.values()) active += v != reference;
  return spec.dot(coeffs, point.values()) + reg_lambda * active;
}

}  // namespace catfour
