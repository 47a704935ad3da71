#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catfour {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Uniform-cardinality categorical domain [k]^n.
struct CategoricalSpace {
  int n = 1;
  int k = 2;

  CategoricalSpace() = default;
  CategoricalSpace(int n_vars, int levels);

  /// k^n as a floating-point value; only meant for reporting.
  double domain_size() const;

  bool operator==(const CategoricalSpace&) const = default;
};

/// An assignment of 0-based levels to every variable.
class CategoricalPoint {
 public:
  CategoricalPoint() = default;
  explicit CategoricalPoint(std::vector<int> values) : values_(std::move(values)) {}
  CategoricalPoint(std::initializer_list<int> values) : values_(values) {}

  int operator[](std::size_t i) const { return values_[i]; }
  int& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  std::span<const int> values() const { return values_; }
  std::vector<int>& mutable_values() { return values_; }

  bool valid_in(const CategoricalSpace& space) const;

  /// Levels joined by '|', e.g. "2|0|4".
  std::string to_string() const;
  static CategoricalPoint parse(std::string_view text);

  bool operator==(const CategoricalPoint&) const = default;
  auto operator<=>(const CategoricalPoint&) const = default;

 private:
  std::vector<int> values_;
};

/// Throws DimensionMismatch unless point is a member of space.
void require_valid(const CategoricalPoint& point, const CategoricalSpace& space);

using Rng = std::mt19937_64;

struct RngSeed {
  std::uint64_t seed = 0;
};

/// Independent generator for a named stream of a run seed.
Rng make_rng(RngSeed seed, std::uint64_t stream = 0);

CategoricalPoint random_point(const CategoricalSpace& space, Rng& rng);

struct EvaluationRecord {
  std::size_t step = 0;
  CategoricalPoint point;
  double value = 0.0;
  double best_so_far = 0.0;
};

class RunTrace {
 public:
  /// Appends the next step and maintains the running minimum.
  const EvaluationRecord& append(CategoricalPoint point, double value);

  const std::vector<EvaluationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  double best_value() const;

  void write_csv(std::ostream& out) const;
  static RunTrace read_csv(std::istream& in);

 private:
  std::vector<EvaluationRecord> records_;
};

/// Point with minimal observed value; ties go to the earliest step.
CategoricalPoint argmin_trace(std::span<const EvaluationRecord> records);

/// Expensive evaluation interface. Every call through evaluate() is counted
/// against the optional budget; subclasses implement score().
class BlackBox {
 public:
  explicit BlackBox(CategoricalSpace space, std::optional<std::size_t> budget = std::nullopt);
  virtual ~BlackBox() = default;

  BlackBox(const BlackBox&) = delete;
  BlackBox& operator=(const BlackBox&) = delete;

  double evaluate(const CategoricalPoint& point);

  const CategoricalSpace& space() const { return space_; }
  std::size_t evaluations() const { return evaluations_; }
  std::optional<std::size_t> budget() const { return budget_; }
  void set_budget(std::optional<std::size_t> budget) { budget_ = budget; }
  bool exhausted() const { return budget_ && evaluations_ >= *budget_; }

 protected:
  virtual double score(const CategoricalPoint& point) = 0;

 private:
  CategoricalSpace space_;
  std::optional<std::size_t> budget_;
  std::size_t evaluations_ = 0;
};

}  // namespace catfour
