#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "catfour/basis.hpp"

namespace catfour {

// Brute-force oracles. None of them share code with the production paths
// they check.

/// Maximum pair count over every explicitly enumerated non-crossing pairing
/// that honors the loop constraint. Exponential; meant for length <= 12.
int exhaustive_max_pairs(std::string_view sequence, int min_loop = 3);

/// Memoized recursion "first base unpaired, or paired with some k".
int recursive_max_pairs(std::string_view sequence, int min_loop = 3);

/// True when the string is balanced and every pair spans more than min_loop.
bool valid_structure(std::string_view structure, int min_loop = 3);

/// Smallest singular value of the full-domain design matrix.
double smallest_singular_value(const BasisSpec& spec);

/// Max |G - k^n I| of the Gram matrix of the complex characters
/// psi_I = psi_{r,I} + i psi_{i,I} assembled from a group basis with m = n,
/// using the conjugated inner product over [k]^n.
double character_gram_deviation(const BasisSpec& spec);

/// Max interpolation error of least-squares fits of `functions` random
/// functions on the full domain with m = n.
double interpolation_error(const CategoricalSpace& space, BasisKind kind, int functions, std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Basis rank, character orthogonality and folding-vs-enumeration checks.
std::vector<CheckResult> run_verification();

}  // namespace catfour
