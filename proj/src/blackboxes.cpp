#include "catfour/blackboxes.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <regex>
#include <sstream>

namespace catfour {

double latin_square_penalty(const CategoricalPoint& point, int k) {
  if (point.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) {
    throw DimensionMismatch("Latin square of order " + std::to_string(k) + " needs " + std::to_string(k * k) +
                            " variables, got " + std::to_string(point.size()));
  }
  std::vector<char> seen(static_cast<std::size_t>(k));
  int penalty = 0;
  auto count_line = [&](auto at) {
    std::fill(seen.begin(), seen.end(), 0);
    int distinct = 0;
    for (int i = 0; i < k; ++i) {
      const int v = at(i);
      if (!seen[v]) {
        seen[v] = 1;
        ++distinct;
      }
    }
    penalty += k - distinct;
  };
  for (int r = 0; r < k; ++r) count_line([&](int c) { return point[r * k + c]; });
  for (int c = 0; c < k; ++c) count_line([&](int r) { return point[r * k + c]; });
  return penalty;
}

LatinSquareBox::LatinSquareBox(int k, double noise_sigma, RngSeed seed, std::optional<std::size_t> budget)
    : BlackBox(CategoricalSpace(k * k, k), budget), order_(k), noise_sigma_(noise_sigma), rng_(make_rng(seed, 2)) {
  if (noise_sigma_ < 0.0) throw InvalidArgument("noise sigma must be >= 0");
}

double LatinSquareBox::score(const CategoricalPoint& point) {
  const double clean = latin_square_penalty(point, order_);
  if (noise_sigma_ == 0.0) return clean;
  return clean + std::normal_distribution<double>(0.0, noise_sigma_)(rng_);
}

PermutedLevelsBox::PermutedLevelsBox(std::unique_ptr<BlackBox> inner, std::vector<int> permutation,
                                     std::optional<std::size_t> budget)
    : BlackBox(inner ? inner->space() : CategoricalSpace{}, budget),
      inner_(std::move(inner)),
      permutation_(std::move(permutation)) {
  if (!inner_) throw InvalidArgument("permuted box needs an inner box");
  auto sorted = permutation_;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < static_cast<int>(sorted.size()); ++i) {
    if (sorted[i] != i || static_cast<int>(sorted.size()) != space().k) {
      throw InvalidArgument("level permutation must be a permutation of [0, k)");
    }
  }
}

double PermutedLevelsBox::score(const CategoricalPoint& point) {
  std::vector<int> mapped(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) mapped[i] = permutation_[point[i]];
  return inner_->evaluate(CategoricalPoint(std::move(mapped)));
}

bool can_pair(char a, char b) {
  switch (a) {
    case 'A': return b == 'U';
    case 'U': return b == 'A' || b == 'G';
    case 'G': return b == 'C' || b == 'U';
    case 'C': return b == 'G';
    default: return false;
  }
}

void require_rna(std::string_view sequence) {
  if (sequence.empty()) throw InvalidArgument("empty RNA sequence");
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const char c = sequence[i];
    if (c != 'A' && c != 'C' && c != 'G' && c != 'U') {
      throw InvalidArgument(std::string("invalid nucleotide '") + c + "' at position " + std::to_string(i));
    }
  }
}

FoldResult fold_nussinov(std::string_view sequence, int min_loop) {
  require_rna(sequence);
  if (min_loop < 0) throw InvalidArgument("min loop length must be >= 0");
  const int n = static_cast<int>(sequence.size());
  // best[i * n + j] = max pairs on [i, j]; empty intervals are 0.
  std::vector<int> best(static_cast<std::size_t>(n) * n, 0);
  auto at = [&](int i, int j) { return j <= i ? 0 : best[static_cast<std::size_t>(i) * n + j]; };
  auto pairs_ok = [&](int i, int j) { return j - i > min_loop && can_pair(sequence[i], sequence[j]); };

  for (int span = 1; span < n; ++span) {
    for (int i = 0; i + span < n; ++i) {
      const int j = i + span;
      int v = std::max(at(i + 1, j), at(i, j - 1));
      if (pairs_ok(i, j)) v = std::max(v, at(i + 1, j - 1) + 1);
      for (int s = i + 1; s < j - 1; ++s) v = std::max(v, at(i, s) + at(s + 1, j));
      best[static_cast<std::size_t>(i) * n + j] = v;
    }
  }

  std::string structure(static_cast<std::size_t>(n), '.');
  std::vector<std::array<int, 2>> stack;
  if (n > 1) stack.push_back({0, n - 1});
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j <= i) continue;
    const int v = at(i, j);
    if (v == 0) continue;
    if (pairs_ok(i, j) && v == at(i + 1, j - 1) + 1) {
      structure[i] = '(';
      structure[j] = ')';
      stack.push_back({i + 1, j - 1});
    } else if (v == at(i + 1, j)) {
      stack.push_back({i + 1, j});
    } else if (v == at(i, j - 1)) {
      stack.push_back({i, j - 1});
    } else {
      for (int s = i + 1; s < j - 1; ++s) {
        if (v == at(i, s) + at(s + 1, j)) {
          stack.push_back({s + 1, j});
          stack.push_back({i, s});
          break;
        }
      }
    }
  }
  const int pairs = n > 1 ? at(0, n - 1) : 0;
  return {pairs == 0 ? 0.0 : -static_cast<double>(pairs), structure};
}

ProcessResult run_process(const std::string& command, const std::string& input) {
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0) throw Error(std::string("pipe failed: ") + std::strerror(errno));
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw Error(std::string("pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
    throw Error(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);

  std::size_t written = 0;
  while (written < input.size()) {
    const ssize_t w = write(to_child[1], input.data() + written, input.size() - written);
    if (w < 0) {
      if (errno == EINTR) continue;
      break;  // child stopped reading; its exit status tells the rest
    }
    written += static_cast<std::size_t>(w);
  }
  close(to_child[1]);

  ProcessResult result;
  std::array<char, 4096> buf{};
  for (;;) {
    const ssize_t r = read(from_child[0], buf.data(), buf.size());
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    result.output.append(buf.data(), static_cast<std::size_t>(r));
  }
  close(from_child[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw Error(std::string("waitpid failed: ") + std::strerror(errno));
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

FoldResult parse_external_fold(std::string_view output) {
  std::string last;
  std::istringstream lines{std::string(output)};
  for (std::string line; std::getline(lines, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
  }
  static const std::regex pattern(R"(^\s*([.()]+)\s*\(\s*([-+]?(?:\d+\.?\d*|\.\d+))\s*\)\s*$)");
  std::smatch m;
  if (!std::regex_match(last, m, pattern)) {
    throw Error("cannot parse folder output line '" + last + "'");
  }
  return {std::stod(m[2].str()), m[1].str()};
}

RnaFolder RnaFolder::internal(int min_loop) {
  RnaFolder f;
  f.kind_ = Kind::internal_nussinov;
  f.min_loop_ = min_loop;
  return f;
}

RnaFolder RnaFolder::external(std::string command) {
  if (command.empty()) throw InvalidArgument("external folder needs a command");
  RnaFolder f;
  f.kind_ = Kind::external_process;
  f.command_ = std::move(command);
  return f;
}

FoldResult RnaFolder::fold(std::string_view sequence) const {
  if (kind_ == Kind::internal_nussinov) return fold_nussinov(sequence, min_loop_);
  require_rna(sequence);
  static std::mutex one_in_flight;
  std::lock_guard lock(one_in_flight);
  const auto result = run_process(command_, std::string(sequence) + "\n");
  if (result.exit_code != 0) {
    throw Error("external folder '" + command_ + "' exited with status " + std::to_string(result.exit_code));
  }
  auto folded = parse_external_fold(result.output);
  if (folded.structure.size() != sequence.size()) {
    throw Error("external folder returned a structure of length " + std::to_string(folded.structure.size()) +
                " for a sequence of length " + std::to_string(sequence.size()));
  }
  return folded;
}

std::string decode_rna(const CategoricalPoint& point) {
  static constexpr std::string_view letters = "ACGU";
  std::string seq(point.size(), 'N');
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (point[i] < 0 || point[i] > 3) throw DimensionMismatch("RNA levels must lie in [0, 4)");
    seq[i] = letters[point[i]];
  }
  return seq;
}

RnaOptimizeBox::RnaOptimizeBox(int length, RnaFolder folder, std::optional<std::size_t> budget)
    : BlackBox(CategoricalSpace(length, 4), budget), folder_(std::move(folder)) {}

double RnaOptimizeBox::score(const CategoricalPoint& point) { return folder_.fold(decode_rna(point)).energy; }

double normalized_hamming(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("structures of length " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()) + " cannot be compared");
  }
  if (a.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

RnaDesignBox::RnaDesignBox(std::string target, RnaFolder folder, std::optional<std::size_t> budget)
    : BlackBox(parse_target(target).space(), budget),
      target_(std::move(target)),
      schema_(parse_target(target_)),
      folder_(std::move(folder)) {}

double RnaDesignBox::score(const CategoricalPoint& point) {
  const auto sequence = decode_sequence(schema_, point);
  return normalized_hamming(target_, folder_.fold(sequence).structure);
}

ExternalScoreBox::ExternalScoreBox(CategoricalSpace space, std::string command, std::optional<std::size_t> budget)
    : BlackBox(space, budget), command_(std::move(command)) {
  if (command_.empty()) throw InvalidArgument("external black box needs a command");
}

double ExternalScoreBox::score(const CategoricalPoint& point) {
  const auto result = run_process(command_, point.to_string() + "\n");
  if (result.exit_code != 0) {
    throw Error("external black box '" + command_ + "' exited with status " + std::to_string(result.exit_code));
  }
  std::istringstream in(result.output);
  double value = 0.0;
  if (!(in >> value)) throw Error("external black box printed no score: '" + result.output + "'");
  return value;
}

}  // namespace catfour
