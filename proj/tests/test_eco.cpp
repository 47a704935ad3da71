#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "catfour/eco.hpp"

using namespace catfour;

namespace {

std::shared_ptr<const BasisSpec> basis(int n, int k, int m, BasisKind kind = BasisKind::one_hot_fourier) {
  return std::make_shared<const BasisSpec>(enumerate_basis(CategoricalSpace(n, k), kind, m));
}

}  // namespace

TEST_CASE("learning-rate constant and dyadic ceiling") {
  CHECK(LrState::c_const == doctest::Approx(std::sqrt(2.0 * (std::sqrt(2.0) - 1.0) / (std::exp(1.0) - 2.0))));
  CHECK(dyadic_ceil(0.0) == 0.0);
  CHECK(dyadic_ceil(1.0) == 1.0);
  CHECK(dyadic_ceil(3.0) == 4.0);
  CHECK(dyadic_ceil(4.0) == 4.0);
  CHECK(dyadic_ceil(0.3) == 0.5);
  LrState fresh;
  CHECK(fresh.eta(4) == doctest::Approx(std::min(1.0, LrState::c_const * std::sqrt(std::log(8.0)))));
  LrState s{};
  s.e_prev = 4.0;
  s.v_prev = 100.0;
  CHECK(s.eta(10) == doctest::Approx(std::min(0.25, LrState::c_const * std::sqrt(std::log(20.0) / 100.0))));
}

TEST_CASE("fresh model predicts zero and holds mass lambda") {
  EcoModel model(basis(3, 3, 2), 2.5);
  CHECK(model.predict(CategoricalPoint{0, 1, 2}) == 0.0);
  CHECK(model.total_mass() == doctest::Approx(2.5));
  for (double a : model.alpha_plus()) CHECK(a == doctest::Approx(2.5 / (2.0 * 19.0)));
}

TEST_CASE("constant expert predicts lambda everywhere") {
  auto spec = basis(2, 3, 2);
  EcoModel model(spec, 1.5);
  std::vector<double> plus(spec->size(), 0.0), minus(spec->size(), 0.0);
  plus[0] = 1.5;
  model.set_weights(plus, minus);
  for (std::size_t i = 0; i < 9; ++i) CHECK(model.predict(domain_point(spec->space(), i)) == 1.5);
}

TEST_CASE("hand-set two-term model") {
  auto spec = basis(2, 3, 1);  // terms: 1, (0,0), (0,1), (1,0), (1,1)
  EcoModel model(spec, 1.0);
  model.set_weights({0.0, 0.4, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.6});
  // point (0,1): x_{0,0} matches -> -1, x_{1,1} matches -> -1
  CHECK(model.predict(CategoricalPoint{0, 1}) == doctest::Approx(0.4 * -1.0 - 0.6 * -1.0));
  CHECK(model.predict(CategoricalPoint{2, 2}) == doctest::Approx(0.4 - 0.6));
}

TEST_CASE("zero loss leaves the weights unchanged") {
  auto spec = basis(3, 3, 2);
  EcoModel model(spec, 1.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> plus(spec->size()), minus(spec->size());
  double total = 0.0;
  for (std::size_t j = 0; j < plus.size(); ++j) {
    plus[j] = u(rng);
    minus[j] = u(rng);
    total += plus[j] + minus[j];
  }
  for (std::size_t j = 0; j < plus.size(); ++j) {
    plus[j] /= total;
    minus[j] /= total;
  }
  model.set_weights(plus, minus);
  const CategoricalPoint x{1, 0, 2};
  CHECK(model.update(x, model.predict(x)) == 0.0);
  for (std::size_t j = 0; j < plus.size(); ++j) {
    CHECK(model.alpha_plus()[j] == doctest::Approx(plus[j]).epsilon(1e-12));
    CHECK(model.alpha_minus()[j] == doctest::Approx(minus[j]).epsilon(1e-12));
  }
}

TEST_CASE("single step matches hand arithmetic") {
  // n=1, k=2, m=1; psi(0) = (1, -1); all four weights start at 1/4.
  EcoModel model(basis(1, 2, 1), 1.0);
  const double loss = model.update(CategoricalPoint{0}, 1.0, 0.1);
  CHECK(loss == -1.0);
  // L = 2 * 1 * (-1) * psi = (-2, 2); plus *= exp(-0.1 L), minus *= exp(0.1 L)
  const double p0 = 0.25 * std::exp(0.2), p1 = 0.25 * std::exp(-0.2);
  const double m0 = 0.25 * std::exp(-0.2), m1 = 0.25 * std::exp(0.2);
  const double z = p0 + p1 + m0 + m1;
  CHECK(model.alpha_plus()[0] == doctest::Approx(p0 / z).epsilon(1e-14));
  CHECK(model.alpha_plus()[1] == doctest::Approx(p1 / z).epsilon(1e-14));
  CHECK(model.alpha_minus()[0] == doctest::Approx(m0 / z).epsilon(1e-14));
  CHECK(model.alpha_minus()[1] == doctest::Approx(m1 / z).epsilon(1e-14));
  CHECK(model.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("learning-rate state after one step") {
  EcoModel model(basis(1, 2, 1), 1.0);
  model.update(CategoricalPoint{0}, 1.0);
  // gains are +-2, so the largest pairwise range is 4
  CHECK(model.lr_state().e_prev == 4.0);
  // uniform weights, gains {-2, 2, 2, -2}: mean 0, variance 4
  CHECK(model.lr_state().v_prev == doctest::Approx(4.0));
  CHECK(model.lr_state().eta(2) == doctest::Approx(std::min(0.25, LrState::c_const * std::sqrt(std::log(4.0) / 4.0))));
}

TEST_CASE("non-finite observations are rejected") {
  EcoModel model(basis(2, 2, 1));
  CHECK_THROWS_AS(model.update(CategoricalPoint{0, 1}, std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(model.update(CategoricalPoint{0, 1}, INFINITY), InvalidArgument);
}

TEST_CASE("fuzzed updates conserve mass and stay nonnegative") {
  auto spec = basis(10, 4, 2);
  EcoModel model(spec, 1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> value(0.0, 20.0);
  double worst = 0.0;
  bool healthy = true;
  double last_eta = model.lr_state().eta(spec->size());
  double last_e = 0.0;
  bool monotone = true;
  for (int t = 0; t < 10000; ++t) {
    model.update(random_point(spec->space(), rng), value(rng));
    worst = std::max(worst, std::abs(model.total_mass() - 1.0));
    for (std::size_t j = 0; j < spec->size(); ++j) {
      const double a = model.alpha_plus()[j], b = model.alpha_minus()[j];
      healthy = healthy && a >= 0.0 && b >= 0.0 && std::isfinite(a) && std::isfinite(b);
    }
    const double eta = model.lr_state().eta(spec->size());
    if (model.lr_state().e_prev == last_e && t > 0) monotone = monotone && eta <= last_eta;
    last_eta = eta;
    last_e = model.lr_state().e_prev;
  }
  CHECK(worst < 1e-9);
  CHECK(healthy);
  CHECK(monotone);
}

TEST_CASE("extreme losses neither overflow nor break mass") {
  EcoModel model(basis(4, 3, 2), 50.0);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) model.update(random_point(model.spec().space(), rng), t % 2 ? 1e6 : -1e6);
  CHECK(model.total_mass() == doctest::Approx(50.0).epsilon(1e-9));
  for (double c : model.coefficients()) CHECK(std::isfinite(c));
}

TEST_CASE("online fit of a representable function") {
  auto spec = basis(4, 3, 2);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  std::vector<double> truth(spec->size());
  double l1 = 0.0;
  for (auto& c : truth) {
    c = normal(rng);
    l1 += std::abs(c);
  }
  for (auto& c : truth) c *= 0.8 / l1;  // inside the lambda ball

  std::vector<CategoricalPoint> queries;
  for (int t = 0; t < 2000; ++t) queries.push_back(random_point(spec->space(), rng));
  auto mse = [&](const EcoModel& m) {
    double s = 0.0;
    for (const auto& q : queries) {
      const double e = m.predict(q) - spec->dot(truth, q.values());
      s += e * e;
    }
    return s / static_cast<double>(queries.size());
  };
  EcoModel model(spec, 1.0);
  const double before = mse(model);
  for (const auto& q : queries) model.update(q, spec->dot(truth, q.values()));
  CHECK(mse(model) * 10.0 <= before);
}

TEST_CASE("group-basis model follows the same contract") {
  auto spec = basis(3, 4, 2, BasisKind::group_fourier);
  EcoModel model(spec, 1.0);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 500; ++t) model.update(random_point(spec->space(), rng), static_cast<double>(t % 7));
  CHECK(model.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
}
