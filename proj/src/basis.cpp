#include "catfour/basis.hpp"

#include <cmath>
#include <numbers>
#include <json.hpp>

namespace catfour {

std::string to_string(BasisKind kind) {
  return kind == BasisKind::one_hot_fourier ? "one_hot_fourier" : "group_fourier";
}

BasisKind parse_basis_kind(std::string_view text) {
  if (text == "one_hot_fourier") return BasisKind::one_hot_fourier;
  if (text == "group_fourier") return BasisKind::group_fourier;
  throw InvalidArgument("unknown basis kind '" + std::string(text) + "'");
}

std::size_t basis_size(int n, int k, BasisKind kind, int max_order, std::size_t cap) {
  using u128 = unsigned __int128;
  const u128 limit = static_cast<u128>(cap);
  u128 total = 0;
  u128 binom = 1;  // C(n, i)
  u128 power = 1;  // (k-1)^i
  for (int i = 0; i <= max_order; ++i) {
    if (i > 0) {
      binom = binom * static_cast<u128>(n - i + 1) / static_cast<u128>(i);
      power *= static_cast<u128>(k - 1);
    }
    const u128 term = binom * power;
    if (binom > limit || power > limit || term > limit) return 0;
    total += term;
    if (total > limit) return 0;
  }
  if (kind == BasisKind::group_fourier) total = 2 * total - 1;
  if (total > limit) return 0;
  return static_cast<std::size_t>(total);
}

namespace {

// Advances a strictly increasing combination of `vars.size()` elements of [0, n).
bool next_combination(std::vector<int>& vars, int n) {
  const int r = static_cast<int>(vars.size());
  int i = r - 1;
  while (i >= 0 && vars[i] == n - r + i) --i;
  if (i < 0) return false;
  ++vars[i];
  for (int j = i + 1; j < r; ++j) vars[j] = vars[j - 1] + 1;
  return true;
}

// Advances a tuple over [lo, hi] lexicographically.
bool next_tuple(std::vector<int>& levels, int lo, int hi) {
  for (int i = static_cast<int>(levels.size()) - 1; i >= 0; --i) {
    if (levels[i] < hi) {
      ++levels[i];
      return true;
    }
    levels[i] = lo;
  }
  return false;
}

}  // namespace

BasisSpec enumerate_basis(const CategoricalSpace& space, BasisKind kind, int max_order, OneHotEncoding encoding,
                          std::size_t term_cap) {
  if (max_order < 0 || max_order > space.n) {
    throw InvalidArgument("max order " + std::to_string(max_order) + " must lie in [0, n=" +
                          std::to_string(space.n) + "]");
  }
  const std::size_t d = basis_size(space.n, space.k, kind, max_order, term_cap);
  if (d == 0) {
    throw InvalidArgument("basis with n=" + std::to_string(space.n) + ", k=" + std::to_string(space.k) +
                          ", m=" + std::to_string(max_order) + " exceeds the cap of " + std::to_string(term_cap) +
                          " terms");
  }

  BasisSpec spec;
  spec.space_ = space;
  spec.kind_ = kind;
  spec.encoding_ = encoding;
  spec.max_order_ = max_order;
  spec.offsets_.reserve(d + 1);
  spec.parts_.reserve(d);
  spec.offsets_.push_back(0);

  const bool group = kind == BasisKind::group_fourier;
  const int lo = group ? 1 : 0;
  const int hi = group ? space.k - 1 : space.k - 2;

  auto push = [&](const std::vector<int>& vars, const std::vector<int>& levels, CharacterPart part) {
    spec.vars_.insert(spec.vars_.end(), vars.begin(), vars.end());
    spec.levels_.insert(spec.levels_.end(), levels.begin(), levels.end());
    spec.parts_.push_back(part);
    spec.offsets_.push_back(spec.vars_.size());
  };

  for (int order = 0; order <= max_order; ++order) {
    std::vector<int> vars(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) vars[i] = i;
    do {
      std::vector<int> levels(static_cast<std::size_t>(order), lo);
      do {
        push(vars, levels, CharacterPart::real);
        // sin(0) vanishes identically, so the constant has no imaginary part.
        if (group && order > 0) push(vars, levels, CharacterPart::imaginary);
      } while (next_tuple(levels, lo, hi));
    } while (next_combination(vars, space.n));
  }

  if (group) {
    spec.cos_table_.resize(static_cast<std::size_t>(space.k));
    spec.sin_table_.resize(static_cast<std::size_t>(space.k));
    for (int p = 0; p < space.k; ++p) {
      const double angle = 2.0 * std::numbers::pi * p / space.k;
      spec.cos_table_[p] = std::cos(angle);
      spec.sin_table_[p] = std::sin(angle);
    }
  }
  return spec;
}

BasisTerm BasisSpec::term(std::size_t j) const {
  BasisTerm t;
  for (std::size_t f = offsets_[j]; f < offsets_[j + 1]; ++f) t.factors.emplace_back(vars_[f], levels_[f]);
  t.part = parts_[j];
  return t;
}

double BasisSpec::eval_term(std::size_t j, std::span<const int> point) const {
  const std::size_t begin = offsets_[j];
  const std::size_t end = offsets_[j + 1];
  if (kind_ == BasisKind::group_fourier) {
    int phase = 0;
    for (std::size_t f = begin; f < end; ++f) phase += point[vars_[f]] * levels_[f];
    phase %= space_.k;
    return parts_[j] == CharacterPart::real ? cos_table_[phase] : sin_table_[phase];
  }
  if (encoding_ == OneHotEncoding::zero_one) {
    for (std::size_t f = begin; f < end; ++f) {
      if (point[vars_[f]] != levels_[f]) return 0.0;
    }
    return 1.0;
  }
  double v = 1.0;
  for (std::size_t f = begin; f < end; ++f) {
    if (point[vars_[f]] == levels_[f]) v = -v;
  }
  return v;
}

std::vector<double> BasisSpec::eval(const CategoricalPoint& point) const {
  require_valid(point, space_);
  std::vector<double> out(size());
  eval_into(point.values(), out);
  return out;
}

void BasisSpec::eval_into(std::span<const int> point, std::span<double> out) const {
  for (std::size_t j = 0; j < size(); ++j) out[j] = eval_term(j, point);
}

double BasisSpec::dot(std::span<const double> coeffs, std::span<const int> point) const {
  const std::size_t d = size();
  double sum = 0.0;
  if (kind_ == BasisKind::group_fourier) {
    const int k = space_.k;
    for (std::size_t j = 0; j < d; ++j) {
      int phase = 0;
      for (std::size_t f = offsets_[j]; f < offsets_[j + 1]; ++f) phase += point[vars_[f]] * levels_[f];
      phase %= k;
      sum += coeffs[j] * (parts_[j] == CharacterPart::real ? cos_table_[phase] : sin_table_[phase]);
    }
    return sum;
  }
  if (encoding_ == OneHotEncoding::zero_one) {
    for (std::size_t j = 0; j < d; ++j) {
      bool active = true;
      for (std::size_t f = offsets_[j]; f < offsets_[j + 1] && active; ++f) active = point[vars_[f]] == levels_[f];
      if (active) sum += coeffs[j];
    }
    return sum;
  }
  for (std::size_t j = 0; j < d; ++j) {
    bool negative = false;
    for (std::size_t f = offsets_[j]; f < offsets_[j + 1]; ++f) negative ^= point[vars_[f]] == levels_[f];
    sum += negative ? -coeffs[j] : coeffs[j];
  }
  return sum;
}

void BasisSpec::active_terms(std::span<const int> point, std::vector<std::size_t>& out) const {
  out.clear();
  for (std::size_t j = 0; j < size(); ++j) {
    if (eval_term(j, point) != 0.0) out.push_back(j);
  }
}

std::string BasisSpec::to_json() const {
  nlohmann::ordered_json doc;
  doc["kind"] = to_string(kind_);
  doc["n"] = space_.n;
  doc["k"] = space_.k;
  doc["m"] = max_order_;
  doc["d"] = size();
  return doc.dump();
}

double eval_term(const BasisTerm& term, const CategoricalSpace& space, BasisKind kind, OneHotEncoding encoding,
                 const CategoricalPoint& point) {
  require_valid(point, space);
  if (kind == BasisKind::group_fourier) {
    long long inner = 0;
    for (const auto& [var, freq] : term.factors) inner += static_cast<long long>(point[var]) * freq;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(inner % space.k) / space.k;
    return term.part == CharacterPart::real ? std::cos(angle) : std::sin(angle);
  }
  double v = 1.0;
  for (const auto& [var, level] : term.factors) {
    const bool match = point[var] == level;
    if (encoding == OneHotEncoding::zero_one) {
      if (!match) return 0.0;
    } else if (match) {
      v = -v;
    }
  }
  return v;
}

CategoricalPoint domain_point(const CategoricalSpace& space, std::size_t index) {
  std::vector<int> values(static_cast<std::size_t>(space.n));
  for (int i = space.n - 1; i >= 0; --i) {
    values[i] = static_cast<int>(index % static_cast<std::size_t>(space.k));
    index /= static_cast<std::size_t>(space.k);
  }
  return CategoricalPoint(std::move(values));
}

Eigen::MatrixXd design_matrix(const BasisSpec& spec, std::size_t domain_cap) {
  const auto& space = spec.space();
  const double rows_f = space.domain_size();
  if (rows_f > static_cast<double>(domain_cap)) {
    throw InvalidArgument("domain of size " + std::to_string(rows_f) + " exceeds the design-matrix cap of " +
                          std::to_string(domain_cap));
  }
  const auto rows = static_cast<std::size_t>(rows_f);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(spec.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto x = domain_point(space, r);
    for (std::size_t j = 0; j < spec.size(); ++j) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = spec.eval_term(j, x.values());
    }
  }
  return a;
}

}  // namespace catfour
