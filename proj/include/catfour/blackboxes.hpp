#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catfour/domain.hpp"
#include "catfour/mcts.hpp"

namespace catfour {

/// Row and column repetition count of a k x k matrix stored row-major:
/// sum over rows and columns of (k - distinct entries). Range [0, 2k(k-1)].
double latin_square_penalty(const CategoricalPoint& point, int k);

/// Noisy Latin-square benchmark over n = k^2 variables with k levels.
class LatinSquareBox : public BlackBox {
 public:
  LatinSquareBox(int k, double noise_sigma, RngSeed seed, std::optional<std::size_t> budget = std::nullopt);

 protected:
  double score(const CategoricalPoint& point) override;

 private:
  int order_;
  double noise_sigma_;
  Rng rng_;
};

/// Relabels every level through a permutation before delegating:
/// f_sigma(x) = f(sigma(x_1), ..., sigma(x_n)).
class PermutedLevelsBox : public BlackBox {
 public:
  PermutedLevelsBox(std::unique_ptr<BlackBox> inner, std::vector<int> permutation,
                    std::optional<std::size_t> budget = std::nullopt);

 protected:
  double score(const CategoricalPoint& point) override;

 private:
  std::unique_ptr<BlackBox> inner_;
  std::vector<int> permutation_;
};

struct FoldResult {
  double energy = 0.0;
  std::string structure;
};

bool can_pair(char a, char b);

/// Maximum base-pair folding: -1 per canonical pair (AU, UA, GC, CG, GU, UG),
/// hairpin loops of at least `min_loop` unpaired bases. Traceback prefers
/// pairing (i,j), then leaving i unpaired, then leaving j unpaired, then the
/// smallest split point.
FoldResult fold_nussinov(std::string_view sequence, int min_loop = 3);

/// Throws InvalidArgument unless the sequence is nonempty over ACGU.
void require_rna(std::string_view sequence);

struct ProcessResult {
  int exit_code = 0;
  std::string output;
};

/// Runs `command` through /bin/sh with `input` on stdin and captures stdout.
ProcessResult run_process(const std::string& command, const std::string& input);

/// Parses the last nonempty line of a folder's output as
/// `structure (energy)`, e.g. `((((...)))) ( -5.40)`.
FoldResult parse_external_fold(std::string_view output);

class RnaFolder {
 public:
  enum class Kind { internal_nussinov, external_process };

  static RnaFolder internal(int min_loop = 3);
  static RnaFolder external(std::string command);

  Kind kind() const { return kind_; }
  int min_loop() const { return min_loop_; }
  const std::string& command() const { return command_; }

  FoldResult fold(std::string_view sequence) const;

 private:
  Kind kind_ = Kind::internal_nussinov;
  int min_loop_ = 3;
  std::string command_;
};

/// Environment variable that overrides the external-folder command.
inline constexpr const char* kExternalFolderEnv = "CATFOUR_EXTERNAL_FOLDER";

/// Level map 0->A, 1->C, 2->G, 3->U.
std::string decode_rna(const CategoricalPoint& point);

/// Folding energy of the decoded sequence (n variables, k = 4).
class RnaOptimizeBox : public BlackBox {
 public:
  RnaOptimizeBox(int length, RnaFolder folder, std::optional<std::size_t> budget = std::nullopt);

 protected:
  double score(const CategoricalPoint& point) override;

 private:
  RnaFolder folder_;
};

/// Fraction of positions where the two structures differ.
double normalized_hamming(std::string_view a, std::string_view b);

/// Normalized Hamming distance between the target and the fold of the
/// sequence decoded from a schema point.
class RnaDesignBox : public BlackBox {
 public:
  RnaDesignBox(std::string target, RnaFolder folder, std::optional<std::size_t> budget = std::nullopt);

  const std::string& target() const { return target_; }
  const DesignSchema& schema() const { return schema_; }

 protected:
  double score(const CategoricalPoint& point) override;

 private:
  std::string target_;
  DesignSchema schema_;
  RnaFolder folder_;
};

/// Scores points with an external executable: writes `v0|v1|...` plus a
/// newline on stdin and reads a decimal score from stdout.
class ExternalScoreBox : public BlackBox {
 public:
  ExternalScoreBox(CategoricalSpace space, std::string command, std::optional<std::size_t> budget = std::nullopt);

 protected:
  double score(const CategoricalPoint& point) override;

 private:
  std::string command_;
};

}  // namespace catfour
