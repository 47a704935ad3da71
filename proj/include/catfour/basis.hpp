#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catfour/domain.hpp"

namespace catfour {

enum class BasisKind { one_hot_fourier, group_fourier };

/// Value taken by an active one-hot indicator. plus_minus maps a match to -1
/// and a non-match to +1; zero_one maps a match to 1 and a non-match to 0.
enum class OneHotEncoding { plus_minus, zero_one };

enum class CharacterPart { real, imaginary };

std::string to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view text);

/// One expert of a representation. For one-hot monomials the factors are
/// (variable, level) pairs with level in [0, k-1); for group characters they
/// are (variable, frequency) pairs with frequency in [1, k-1]. Variables are
/// strictly increasing. An empty factor list is the constant term.
struct BasisTerm {
  std::vector<std::pair<int, int>> factors;
  CharacterPart part = CharacterPart::real;

  int order() const { return static_cast<int>(factors.size()); }
  bool operator==(const BasisTerm&) const = default;
};

/// sum_{i=0}^{m} C(n,i) (k-1)^i, or 2x that minus one for group characters.
/// Returns 0 on overflow past `cap`.
std::size_t basis_size(int n, int k, BasisKind kind, int max_order, std::size_t cap);

inline constexpr std::size_t kDefaultTermCap = 5'000'000;
inline constexpr std::size_t kDefaultDomainCap = 65'536;

/// Immutable enumeration of the order-<=m terms of a representation.
class BasisSpec {
 public:
  const CategoricalSpace& space() const { return space_; }
  BasisKind kind() const { return kind_; }
  OneHotEncoding encoding() const { return encoding_; }
  int max_order() const { return max_order_; }
  std::size_t size() const { return parts_.size(); }

  BasisTerm term(std::size_t j) const;

  /// psi_j(point); the point is assumed to be valid.
  double eval_term(std::size_t j, std::span<const int> point) const;

  /// All d term values at a point.
  std::vector<double> eval(const CategoricalPoint& point) const;
  void eval_into(std::span<const int> point, std::span<double> out) const;

  /// sum_j coeffs[j] * psi_j(point) without materialising the feature vector.
  double dot(std::span<const double> coeffs, std::span<const int> point) const;

  /// Indices of the terms that are nonzero at the point. Only meaningful for
  /// the zero_one encoding, where every term is 0 or 1.
  void active_terms(std::span<const int> point, std::vector<std::size_t>& out) const;

  /// JSON echo {kind, n, k, m, d}.
  std::string to_json() const;

 private:
  friend BasisSpec enumerate_basis(const CategoricalSpace&, BasisKind, int, OneHotEncoding, std::size_t);

  CategoricalSpace space_;
  BasisKind kind_ = BasisKind::one_hot_fourier;
  OneHotEncoding encoding_ = OneHotEncoding::plus_minus;
  int max_order_ = 0;

  // Term j owns factors [offsets_[j], offsets_[j+1]).
  std::vector<std::size_t> offsets_;
  std::vector<int> vars_;
  std::vector<int> levels_;
  std::vector<CharacterPart> parts_;

  // cos/sin of 2*pi*p/k for p in [0, k).
  std::vector<double> cos_table_;
  std::vector<double> sin_table_;
};

/// Deterministic order: ascending order, then lexicographic variables, then
/// lexicographic levels/frequencies, then real before imaginary.
BasisSpec enumerate_basis(const CategoricalSpace& space, BasisKind kind, int max_order,
                          OneHotEncoding encoding = OneHotEncoding::plus_minus,
                          std::size_t term_cap = kDefaultTermCap);

/// Stand-alone evaluation of a single term.
double eval_term(const BasisTerm& term, const CategoricalSpace& space, BasisKind kind, OneHotEncoding encoding,
                 const CategoricalPoint& point);

/// The i-th point of [k]^n in lexicographic order (last variable fastest).
CategoricalPoint domain_point(const CategoricalSpace& space, std::size_t index);

/// Rows: every domain point in lexicographic order. Columns: terms.
Eigen::MatrixXd design_matrix(const BasisSpec& spec, std::size_t domain_cap = kDefaultDomainCap);

}  // namespace catfour
