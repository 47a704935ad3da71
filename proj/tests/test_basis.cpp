#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "catfour/basis.hpp"
#include "catfour/verify.hpp"

using namespace catfour;

namespace {

// Direct count sum_{i<=m} C(n,i) (k-1)^i.
long long term_count(int n, int k, int m) {
  long long total = 0;
  for (int i = 0; i <= m; ++i) {
    long long binom = 1;
    for (int j = 0; j < i; ++j) binom = binom * (n - j) / (j + 1);
    long long pow = 1;
    for (int j = 0; j < i; ++j) pow *= k - 1;
    total += binom * pow;
  }
  return total;
}

int rank_of(const Eigen::MatrixXd& a) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST_CASE("basis sizes") {
  CHECK(enumerate_basis(CategoricalSpace(2, 3), BasisKind::one_hot_fourier, 2).size() == 9);
  CHECK(enumerate_basis(CategoricalSpace(25, 5), BasisKind::one_hot_fourier, 2).size() == 4901);
  CHECK(enumerate_basis(CategoricalSpace(2, 3), BasisKind::group_fourier, 2).size() == 17);
  CHECK(enumerate_basis(CategoricalSpace(3, 2), BasisKind::one_hot_fourier, 3).size() == 8);
  for (int n = 1; n <= 6; ++n) {
    for (int k = 2; k <= 5; ++k) {
      for (int m = 0; m <= std::min(n, 3); ++m) {
        const CategoricalSpace space(n, k);
        CHECK(enumerate_basis(space, BasisKind::one_hot_fourier, m).size() == term_count(n, k, m));
        CHECK(enumerate_basis(space, BasisKind::group_fourier, m).size() == 2 * term_count(n, k, m) - 1);
      }
    }
  }
}

TEST_CASE("example 2x3 has one constant, four first-order and four second-order terms") {
  const auto spec = enumerate_basis(CategoricalSpace(2, 3), BasisKind::one_hot_fourier, 2);
  int counts[3] = {0, 0, 0};
  for (std::size_t j = 0; j < spec.size(); ++j) ++counts[spec.term(j).order()];
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 4);
  CHECK(counts[2] == 4);
}

TEST_CASE("enumeration errors") {
  CHECK_THROWS_AS(enumerate_basis(CategoricalSpace(2, 3), BasisKind::one_hot_fourier, 3), InvalidArgument);
  CHECK_THROWS(enumerate_basis(CategoricalSpace(40, 5), BasisKind::one_hot_fourier, 4, OneHotEncoding::plus_minus, 1000));
  CHECK_THROWS(design_matrix(enumerate_basis(CategoricalSpace(9, 4), BasisKind::one_hot_fourier, 1)));
}

TEST_CASE("term ordering is deterministic and sorted") {
  const auto spec = enumerate_basis(CategoricalSpace(3, 3), BasisKind::group_fourier, 2);
  const auto again = enumerate_basis(CategoricalSpace(3, 3), BasisKind::group_fourier, 2);
  REQUIRE(spec.size() == again.size());
  for (std::size_t j = 0; j < spec.size(); ++j) CHECK(spec.term(j) == again.term(j));
  for (std::size_t j = 1; j < spec.size(); ++j) {
    const auto a = spec.term(j - 1);
    const auto b = spec.term(j);
    const auto key = [](const BasisTerm& t) {
      std::vector<int> vars, levels;
      for (auto [v, l] : t.factors) {
        vars.push_back(v);
        levels.push_back(l);
      }
      return std::make_tuple(t.order(), vars, levels, t.part == CharacterPart::imaginary);
    };
    CHECK(key(a) < key(b));
  }
  CHECK(spec.term(0).factors.empty());
  CHECK(spec.term(0).part == CharacterPart::real);
  CHECK(spec.term(1).part == CharacterPart::real);
  CHECK(spec.term(2).part == CharacterPart::imaginary);
}

TEST_CASE("term evaluation examples") {
  const CategoricalSpace two(1, 2);
  const BasisTerm constant{};
  CHECK(eval_term(constant, CategoricalSpace(3, 4), BasisKind::one_hot_fourier, OneHotEncoding::plus_minus,
                  CategoricalPoint{1, 2, 3}) == 1.0);
  const BasisTerm cos1{{{0, 1}}, CharacterPart::real};
  CHECK(eval_term(cos1, two, BasisKind::group_fourier, OneHotEncoding::plus_minus, CategoricalPoint{1}) ==
        doctest::Approx(-1.0).epsilon(1e-15));
  const BasisTerm mono{{{0, 1}, {1, 0}}, CharacterPart::real};
  CHECK(eval_term(mono, CategoricalSpace(2, 3), BasisKind::one_hot_fourier, OneHotEncoding::plus_minus,
                  CategoricalPoint{1, 0}) == 1.0);
  const BasisTerm sin2{{{0, 2}}, CharacterPart::imaginary};
  CHECK(std::abs(eval_term(sin2, CategoricalSpace(1, 4), BasisKind::group_fourier, OneHotEncoding::plus_minus,
                           CategoricalPoint{1})) < 1e-12);
}

TEST_CASE("batched evaluation examples") {
  const auto spec = enumerate_basis(CategoricalSpace(1, 2), BasisKind::one_hot_fourier, 1);
  CHECK(spec.eval(CategoricalPoint{0}) == std::vector<double>{1.0, -1.0});
  CHECK(spec.eval(CategoricalPoint{1}) == std::vector<double>{1.0, 1.0});
  const auto z = enumerate_basis(CategoricalSpace(1, 2), BasisKind::one_hot_fourier, 1, OneHotEncoding::zero_one);
  CHECK(z.eval(CategoricalPoint{0}) == std::vector<double>{1.0, 1.0});
  CHECK(z.eval(CategoricalPoint{1}) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("spec evaluation agrees with an independent formula") {
  std::mt19937_64 rng(3);
  for (auto kind : {BasisKind::one_hot_fourier, BasisKind::group_fourier}) {
    for (auto enc : {OneHotEncoding::plus_minus, OneHotEncoding::zero_one}) {
      if (kind == BasisKind::group_fourier && enc == OneHotEncoding::zero_one) continue;
      const CategoricalSpace space(5, 4);
      const auto spec = enumerate_basis(space, kind, 3, enc);
      std::vector<double> coeffs(spec.size());
      std::normal_distribution<double> normal;
      for (auto& c : coeffs) c = normal(rng);
      for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_point(space, rng);
        const auto psi = spec.eval(x);
        REQUIRE(psi.size() == spec.size());
        double expect_dot = 0.0;
        for (std::size_t j = 0; j < spec.size(); ++j) {
          const auto t = spec.term(j);
          double v = 1.0;
          if (kind == BasisKind::one_hot_fourier) {
            for (auto [var, level] : t.factors) {
              const bool match = x[var] == level;
              v *= enc == OneHotEncoding::plus_minus ? (match ? -1.0 : 1.0) : (match ? 1.0 : 0.0);
            }
          } else {
            int inner = 0;
            for (auto [var, freq] : t.factors) inner += x[var] * freq;
            const double angle = 2.0 * std::numbers::pi * inner / space.k;
            v = t.part == CharacterPart::real ? std::cos(angle) : std::sin(angle);
          }
          CHECK(psi[j] == doctest::Approx(v).epsilon(1e-12));
          expect_dot += coeffs[j] * v;
        }
        CHECK(spec.dot(coeffs, x.values()) == doctest::Approx(expect_dot).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("active terms of the zero-one encoding") {
  const CategoricalSpace space(4, 3);
  const auto spec = enumerate_basis(space, BasisKind::one_hot_fourier, 2, OneHotEncoding::zero_one);
  std::mt19937_64 rng(5);
  std::vector<std::size_t> active;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_point(space, rng);
    spec.active_terms(x.values(), active);
    const auto psi = spec.eval(x);
    std::set<std::size_t> expect;
    for (std::size_t j = 0; j < psi.size(); ++j) {
      if (psi[j] == 1.0) expect.insert(j);
    }
    CHECK(std::set<std::size_t>(active.begin(), active.end()) == expect);
  }
}

TEST_CASE("design matrices") {
  const auto tiny = design_matrix(enumerate_basis(CategoricalSpace(1, 2), BasisKind::one_hot_fourier, 1));
  Eigen::MatrixXd expect(2, 2);
  expect << 1, -1, 1, 1;
  CHECK(tiny.isApprox(expect));
  CHECK(rank_of(tiny) == 2);
  const auto oh = design_matrix(enumerate_basis(CategoricalSpace(2, 3), BasisKind::one_hot_fourier, 2));
  CHECK(oh.rows() == 9);
  CHECK(oh.cols() == 9);
  CHECK(rank_of(oh) == 9);
  const auto gr = design_matrix(enumerate_basis(CategoricalSpace(2, 3), BasisKind::group_fourier, 2));
  CHECK(gr.rows() == 9);
  CHECK(gr.cols() == 17);
  CHECK(rank_of(gr) == 9);
}

TEST_CASE("domain points are lexicographic with the last variable fastest") {
  const CategoricalSpace space(2, 3);
  CHECK(domain_point(space, 0) == CategoricalPoint{0, 0});
  CHECK(domain_point(space, 1) == CategoricalPoint{0, 1});
  CHECK(domain_point(space, 3) == CategoricalPoint{1, 0});
  CHECK(domain_point(space, 8) == CategoricalPoint{2, 2});
}

TEST_CASE("completeness and exact interpolation for small domains") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 2; k <= 4; ++k) {
      const CategoricalSpace space(n, k);
      const auto spec = enumerate_basis(space, BasisKind::one_hot_fourier, n);
      CHECK(spec.size() == static_cast<std::size_t>(space.domain_size()));
      CHECK(smallest_singular_value(spec) > 1e-8);
      CHECK(interpolation_error(space, BasisKind::one_hot_fourier, 5, 1) < 1e-8);
      CHECK(interpolation_error(space, BasisKind::group_fourier, 5, 1) < 1e-8);
    }
  }
}

TEST_CASE("complex characters are orthogonal") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 2; k <= 5; ++k) {
      if (std::pow(k, n) > 130) continue;
      const auto spec = enumerate_basis(CategoricalSpace(n, k), BasisKind::group_fourier, n);
      CHECK(character_gram_deviation(spec) < 1e-9);
    }
  }
}

TEST_CASE("json echo") {
  const auto spec = enumerate_basis(CategoricalSpace(2, 3), BasisKind::group_fourier, 2);
  CHECK(spec.to_json() == R"({"kind":"group_fourier","n":2,"k":3,"m":2,"d":17})");
}
