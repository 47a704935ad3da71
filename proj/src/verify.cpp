#include "catfour/verify.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <complex>
#include <map>
#include <random>
#include <sstream>

#include "catfour/blackboxes.hpp"

namespace catfour {

namespace {

void enumerate_structures(std::string_view seq, int min_loop, std::size_t pos, std::vector<int>& open, int pairs,
                          int& best) {
  if (pos == seq.size()) {
    if (open.empty()) best = std::max(best, pairs);
    return;
  }
  // Remaining positions must be able to close every open bracket.
  if (open.size() > seq.size() - pos) return;
  const int p = static_cast<int>(pos);
  enumerate_structures(seq, min_loop, pos + 1, open, pairs, best);
  open.push_back(p);
  enumerate_structures(seq, min_loop, pos + 1, open, pairs, best);
  open.pop_back();
  if (!open.empty()) {
    const int i = open.back();
    if (p - i > min_loop && can_pair(seq[i], seq[p])) {
      open.pop_back();
      enumerate_structures(seq, min_loop, pos + 1, open, pairs + 1, best);
      open.push_back(i);
    }
  }
}

}  // namespace

int exhaustive_max_pairs(std::string_view sequence, int min_loop) {
  std::vector<int> open;
  int best = 0;
  enumerate_structures(sequence, min_loop, 0, open, 0, best);
  return best;
}

int recursive_max_pairs(std::string_view sequence, int min_loop) {
  std::map<std::pair<int, int>, int> memo;
  const auto recurse = [&](auto&& self, int i, int j) -> int {
    if (j - i < 1) return 0;
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int best = self(self, i + 1, j);
    for (int k = i + min_loop + 1; k <= j; ++k) {
      if (can_pair(sequence[i], sequence[k])) {
        best = std::max(best, 1 + self(self, i + 1, k - 1) + self(self, k + 1, j));
      }
    }
    memo.emplace(key, best);
    return best;
  };
  return recurse(recurse, 0, static_cast<int>(sequence.size()) - 1);
}

bool valid_structure(std::string_view structure, int min_loop) {
  std::vector<int> open;
  for (int p = 0; p < static_cast<int>(structure.size()); ++p) {
    const char c = structure[p];
    if (c == '(') {
      open.push_back(p);
    } else if (c == ')') {
      if (open.empty() || p - open.back() <= min_loop) return false;
      open.pop_back();
    } else if (c != '.') {
      return false;
    }
  }
  return open.empty();
}

double smallest_singular_value(const BasisSpec& spec) {
  const Eigen::MatrixXd a = design_matrix(spec);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().minCoeff();
}

double character_gram_deviation(const BasisSpec& spec) {
  if (spec.kind() != BasisKind::group_fourier || spec.max_order() != spec.space().n) {
    throw InvalidArgument("character Gram check needs a full group basis");
  }
  const auto& space = spec.space();
  const Eigen::MatrixXd a = design_matrix(spec);
  // Pair each real term with its imaginary partner (the constant has none).
  std::vector<std::pair<Eigen::Index, Eigen::Index>> characters;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (spec.term(j).part != CharacterPart::real) continue;
    const bool has_imag = j + 1 < spec.size() && spec.term(j + 1).part == CharacterPart::imaginary;
    characters.emplace_back(static_cast<Eigen::Index>(j), has_imag ? static_cast<Eigen::Index>(j + 1) : -1);
  }
  const auto count = static_cast<Eigen::Index>(characters.size());
  Eigen::MatrixXcd psi(a.rows(), count);
  for (Eigen::Index c = 0; c < count; ++c) {
    const auto [re, im] = characters[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      psi(r, c) = std::complex<double>(a(r, re), im >= 0 ? a(r, im) : 0.0);
    }
  }
  const Eigen::MatrixXcd gram = psi.adjoint() * psi;
  const double size = space.domain_size();
  double dev = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < count; ++j) {
      const std::complex<double> expect = i == j ? size : 0.0;
      dev = std::max(dev, std::abs(gram(i, j) - expect));
    }
  }
  // A full group basis must carry one character per domain point.
  if (static_cast<double>(count) != size) return std::numeric_limits<double>::infinity();
  return dev;
}

double interpolation_error(const CategoricalSpace& space, BasisKind kind, int functions, std::uint64_t seed) {
  const auto spec = enumerate_basis(space, kind, space.n);
  const Eigen::MatrixXd a = design_matrix(spec);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int f = 0; f < functions; ++f) {
    Eigen::VectorXd values(a.rows());
    for (Eigen::Index r = 0; r < values.size(); ++r) values(r) = normal(rng);
    const Eigen::VectorXd coeffs = cod.solve(values);
    worst = std::max(worst, (a * coeffs - values).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<CheckResult> run_verification() {
  std::vector<CheckResult> results;
  auto add = [&](std::string name, bool passed, const std::string& detail) {
    results.push_back({std::move(name), passed, detail});
  };

  {
    double worst_sv = std::numeric_limits<double>::infinity();
    double worst_fit = 0.0;
    for (int n = 1; n <= 3; ++n) {
      for (int k = 2; k <= 4; ++k) {
        const CategoricalSpace space(n, k);
        worst_sv = std::min(worst_sv, smallest_singular_value(enumerate_basis(space, BasisKind::one_hot_fourier, n)));
        worst_fit = std::max(worst_fit, interpolation_error(space, BasisKind::one_hot_fourier, 20, 17));
      }
    }
    std::ostringstream detail;
    detail << "min singular value " << worst_sv << ", max interpolation error " << worst_fit;
    add("one-hot basis completeness", worst_sv > 1e-8 && worst_fit < 1e-8, detail.str());
  }
  {
    double worst = 0.0;
    for (auto [n, k] : {std::pair{2, 3}, std::pair{2, 5}, std::pair{3, 4}}) {
      const CategoricalSpace space(n, k);
      worst = std::max(worst, character_gram_deviation(enumerate_basis(space, BasisKind::group_fourier, n)));
    }
    std::ostringstream detail;
    detail << "max Gram deviation " << worst;
    add("group character orthogonality", worst < 1e-9, detail.str());
  }
  {
    static constexpr std::string_view letters = "ACGU";
    int mismatches = 0;
    int checked = 0;
    for (int len = 1; len <= 8; ++len) {
      std::string seq(static_cast<std::size_t>(len), 'A');
      const long total = 1L << (2 * len);
      for (long code = 0; code < total; ++code) {
        long c = code;
        for (int p = 0; p < len; ++p, c >>= 2) seq[p] = letters[c & 3];
        const auto folded = fold_nussinov(seq);
        ++checked;
        if (-folded.energy != exhaustive_max_pairs(seq) || !valid_structure(folded.structure)) ++mismatches;
      }
    }
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int s = 0; s < 200; ++s) {
      std::string seq(12, 'A');
      for (auto& ch : seq) ch = letters[pick(rng)];
      const auto folded = fold_nussinov(seq);
      ++checked;
      if (-folded.energy != recursive_max_pairs(seq) || !valid_structure(folded.structure)) ++mismatches;
    }
    add("folding DP vs enumeration", mismatches == 0,
        std::to_string(checked) + " sequences, " + std::to_string(mismatches) + " mismatches");
  }
  return results;
}

}  // namespace catfour
