#include "catfour/domain.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace catfour {

CategoricalSpace::CategoricalSpace(int n_vars, int levels) : n(n_vars), k(levels) {
  if (n < 1) throw InvalidArgument("categorical space needs n >= 1, got " + std::to_string(n));
  if (k < 2) throw InvalidArgument("categorical space needs k >= 2, got " + std::to_string(k));
}

double CategoricalSpace::domain_size() const { return std::pow(static_cast<double>(k), n); }

bool CategoricalPoint::valid_in(const CategoricalSpace& space) const {
  if (values_.size() != static_cast<std::size_t>(space.n)) return false;
  for (int v : values_) {
    if (v < 0 || v >= space.k) return false;
  }
  return true;
}

std::string CategoricalPoint::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(values_[i]);
  }
  return out;
}

CategoricalPoint CategoricalPoint::parse(std::string_view text) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto bar = text.find('|', pos);
    const auto field = text.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
      throw InvalidArgument("malformed point field '" + std::string(field) + "'");
    }
    values.push_back(v);
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }
  return CategoricalPoint(std::move(values));
}

void require_valid(const CategoricalPoint& point, const CategoricalSpace& space) {
  if (point.size() != static_cast<std::size_t>(space.n)) {
    throw DimensionMismatch("point has " + std::to_string(point.size()) + " variables, space has " +
                            std::to_string(space.n));
  }
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (point[i] < 0 || point[i] >= space.k) {
      throw DimensionMismatch("level " + std::to_string(point[i]) + " of variable " + std::to_string(i) +
                              " outside [0, " + std::to_string(space.k) + ")");
    }
  }
}

Rng make_rng(RngSeed seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

CategoricalPoint random_point(const CategoricalSpace& space, Rng& rng) {
  std::uniform_int_distribution<int> level(0, space.k - 1);
  std::vector<int> values(static_cast<std::size_t>(space.n));
  for (auto& v : values) v = level(rng);
  return CategoricalPoint(std::move(values));
}

const EvaluationRecord& RunTrace::append(CategoricalPoint point, double value) {
  const double best = records_.empty() ? value : std::min(records_.back().best_so_far, value);
  records_.push_back({records_.size() + 1, std::move(point), value, best});
  return records_.back();
}

double RunTrace::best_value() const {
  if (records_.empty()) throw InvalidArgument("empty trace has no best value");
  return records_.back().best_so_far;
}

void RunTrace::write_csv(std::ostream& out) const {
  std::ostringstream buf;
  buf.precision(17);
  buf << "step,value,best_so_far,point\n";
  for (const auto& r : records_) {
    buf << r.step << ',' << r.value << ',' << r.best_so_far << ',' << r.point.to_string() << '\n';
  }
  out << buf.str();
}

RunTrace RunTrace::read_csv(std::istream& in) {
  RunTrace trace;
  std::string line;
  if (!std::getline(in, line) || line != "step,value,best_so_far,point") {
    throw InvalidArgument("trace CSV is missing the expected header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string step, value, best, point;
    if (!std::getline(row, step, ',') || !std::getline(row, value, ',') || !std::getline(row, best, ',') ||
        !std::getline(row, point)) {
      throw InvalidArgument("trace CSV line " + std::to_string(lineno) + " has too few fields");
    }
    EvaluationRecord rec;
    rec.step = std::stoull(step);
    rec.value = std::stod(value);
    rec.best_so_far = std::stod(best);
    rec.point = CategoricalPoint::parse(point);
    trace.records_.push_back(std::move(rec));
  }
  return trace;
}

CategoricalPoint argmin_trace(std::span<const EvaluationRecord> records) {
  if (records.empty()) throw InvalidArgument("argmin of an empty trace");
  const EvaluationRecord* best = &records.front();
  for (const auto& r : records) {
    if (r.value < best->value) best = &r;
  }
  return best->point;
}

BlackBox::BlackBox(CategoricalSpace space, std::optional<std::size_t> budget)
    : space_(space), budget_(budget) {}

double BlackBox::evaluate(const CategoricalPoint& point) {
  require_valid(point, space_);
  if (budget_ && evaluations_ >= *budget_) {
    throw BudgetExhausted("evaluation budget of " + std::to_string(*budget_) + " exhausted");
  }
  ++evaluations_;
  return score(point);
}

}  // namespace catfour
