#include "catfour/optimizer.hpp"

#include <chrono>
#include <cmath>

namespace catfour {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::eco_f: return "eco_f";
    case Algorithm::eco_g: return "eco_g";
    case Algorithm::tco_f: return "tco_f";
    case Algorithm::rs: return "rs";
    case Algorithm::plain_sa: return "plain_sa";
  }
  return "unknown";
}

std::string to_string(AfoKind afo) { return afo == AfoKind::sa ? "sa" : "mcts"; }

Algorithm parse_algorithm(std::string_view text) {
  for (auto a : {Algorithm::eco_f, Algorithm::eco_g, Algorithm::tco_f, Algorithm::rs, Algorithm::plain_sa}) {
    if (text == to_string(a)) return a;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(text) + "'");
}

AfoKind parse_afo(std::string_view text) {
  if (text == "sa") return AfoKind::sa;
  if (text == "mcts") return AfoKind::mcts;
  throw InvalidArgument("unknown acquisition optimizer '" + std::string(text) + "'");
}

int ExperimentConfig::resolved_sa_iterations(int n) const {
  if (sa_iterations) return *sa_iterations;
  return (algorithm == Algorithm::tco_f ? 6 : 3) * n;
}

double ExperimentConfig::resolved_exploration() const {
  if (mcts_exploration) return *mcts_exploration;
  return algorithm == Algorithm::tco_f ? 0.25 : 0.5;
}

int ExperimentConfig::resolved_playouts(int height) const { return mcts_playouts ? *mcts_playouts : 30 * height; }

void ExperimentConfig::validate(const CategoricalSpace& space) const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidArgument("invalid '" + field + "': " + why);
  };
  if (budget < 1) fail("budget", "must be >= 1");
  if (max_order < 0 || max_order > space.n) fail("max_order", "must lie in [0, n]");
  if (!(eco_lambda > 0.0)) fail("lambda", "must be positive");
  if (!(sa_decay > 0.0)) fail("sa_decay", "must be positive");
  if (sa_iterations && *sa_iterations < 1) fail("sa_iterations", "must be >= 1");
  if (mcts_exploration && *mcts_exploration < 0.0) fail("mcts_exploration", "must be >= 0");
  if (mcts_playouts && *mcts_playouts < 1) fail("mcts_playouts", "must be >= 1");
  if (acquisition_lambda < 0.0) fail("acquisition_lambda", "must be >= 0");
  if (tco_initial_observations < 1) fail("initial_observations", "must be >= 1");
  if (mcmc.warmup_draws < 50) fail("warmup_draws", "must be >= 50");
  if (mcmc.refresh_draws < 1) fail("refresh_draws", "must be >= 1");
  if (mcmc.kept_draws < 1) fail("kept_draws", "must be >= 1");
}

double RunResult::seconds_per_step() const {
  return trace.empty() ? 0.0 : seconds / static_cast<double>(trace.size());
}

namespace {

using Clock = std::chrono::steady_clock;

void check_space(const BlackBox& box, const std::optional<DesignSchema>& schema) {
  if (schema && !(schema->space() == box.space())) {
    throw DimensionMismatch("design schema and black box disagree on the point space");
  }
}

RunResult finish(RunTrace trace, Clock::time_point start) {
  RunResult result;
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  result.best_point = argmin_trace(trace.records());
  result.best_value = trace.best_value();
  result.trace = std::move(trace);
  return result;
}

/// Search schema for MCTS: the design schema with a per-run slot order, or
/// variables in index order for generic problems.
DesignSchema search_schema(const BlackBox& box, const std::optional<DesignSchema>& schema, RngSeed seed) {
  if (!schema) return generic_schema(box.space());
  DesignSchema shuffled = *schema;
  auto rng = make_rng(seed, 3);
  shuffle_order(shuffled, rng);
  return shuffled;
}

CategoricalPoint propose(const ExperimentConfig& config, const SurrogateFn& surrogate, const CategoricalSpace& space,
                         const DesignSchema& mcts_schema, const std::optional<CategoricalPoint>& incumbent,
                         Rng& rng) {
  if (config.afo == AfoKind::mcts) {
    MctsConfig mc{config.resolved_exploration(), config.resolved_playouts(mcts_schema.height())};
    return mcts_maximize(surrogate, mcts_schema, mc, rng);
  }
  SaConfig sc{config.sa_decay, config.resolved_sa_iterations(space.n), std::nullopt};
  if (config.sa_warm_start && incumbent) sc.warm_start = *incumbent;
  return sa_minimize(surrogate, space, sc, rng);
}

std::optional<CategoricalPoint> incumbent_of(const RunTrace& trace) {
  if (trace.empty()) return std::nullopt;
  return argmin_trace(trace.records());
}

}  // namespace

RunResult run_eco(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                  const std::optional<DesignSchema>& schema) {
  if (config.algorithm != Algorithm::eco_f && config.algorithm != Algorithm::eco_g) {
    throw InvalidArgument("run_eco needs algorithm eco_f or eco_g");
  }
  check_space(box, schema);
  const auto& space = box.space();
  config.validate(space);
  const auto start = Clock::now();

  const auto kind = config.algorithm == Algorithm::eco_f ? BasisKind::one_hot_fourier : BasisKind::group_fourier;
  auto basis = std::make_shared<const BasisSpec>(enumerate_basis(space, kind, config.max_order));
  EcoModel model(basis, config.eco_lambda);
  auto rng = make_rng(seed, 1);
  const auto mcts_schema = search_schema(box, schema, seed);

  const SurrogateFn surrogate = [&model](const CategoricalPoint& p) { return model.predict(p.values()); };
  RunTrace trace;
  for (std::size_t t = 0; t < config.budget; ++t) {
    const auto x = propose(config, surrogate, space, mcts_schema, incumbent_of(trace), rng);
    const double y = box.evaluate(x);
    trace.append(x, y);
    model.update(x, y);
  }
  return finish(std::move(trace), start);
}

RunResult run_tco(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                  const std::optional<DesignSchema>& schema) {
  if (config.algorithm != Algorithm::tco_f) throw InvalidArgument("run_tco needs algorithm tco_f");
  check_space(box, schema);
  const auto& space = box.space();
  config.validate(space);
  const auto start = Clock::now();

  auto basis = std::make_shared<const BasisSpec>(
      enumerate_basis(space, BasisKind::one_hot_fourier, config.max_order, OneHotEncoding::zero_one));
  McmcConfig mcmc = config.mcmc;
  mcmc.chain_seed = seed;
  TcoModel model(basis, config.horseshoe, mcmc);
  auto rng = make_rng(seed, 1);
  const auto mcts_schema = search_schema(box, schema, seed);

  RunTrace trace;
  const auto warm = std::min<std::size_t>(static_cast<std::size_t>(config.tco_initial_observations), config.budget);
  for (std::size_t t = 0; t < warm; ++t) {
    const auto x = schema ? random_rollout(mcts_schema, rng) : random_point(space, rng);
    const double y = box.evaluate(x);
    trace.append(x, y);
    model.observe(x, y);
  }
  for (std::size_t t = warm; t < config.budget; ++t) {
    const auto coeffs = model.sample_coefficients();
    const SurrogateFn surrogate = [&](const CategoricalPoint& p) {
      return acquisition(coeffs, *basis, p, config.acquisition_lambda);
    };
    const auto x = propose(config, surrogate, space, mcts_schema, incumbent_of(trace), rng);
    const double y = box.evaluate(x);
    trace.append(x, y);
    model.observe(x, y);
  }
  return finish(std::move(trace), start);
}

RunResult run_baseline_rs(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                          const std::optional<DesignSchema>& schema) {
  check_space(box, schema);
  config.validate(box.space());
  const auto start = Clock::now();
  auto rng = make_rng(seed, 1);
  const auto order = search_schema(box, schema, seed);
  RunTrace trace;
  for (std::size_t t = 0; t < config.budget; ++t) {
    const auto x = schema ? random_rollout(order, rng) : random_point(box.space(), rng);
    trace.append(x, box.evaluate(x));
  }
  return finish(std::move(trace), start);
}

RunResult run_baseline_sa(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                          const std::optional<DesignSchema>& schema) {
  check_space(box, schema);
  const auto& space = box.space();
  config.validate(space);
  const auto start = Clock::now();
  auto rng = make_rng(seed, 1);

  RunTrace trace;
  auto x = random_point(space, rng);
  std::uniform_int_distribution<int> pick(0, space.n - 1);
  std::vector<double> values(static_cast<std::size_t>(space.k));
  for (int move = 0; trace.size() < config.budget; ++move) {
    const int i = pick(rng);
    for (int level = 0; level < space.k && trace.size() < config.budget; ++level) {
      x[i] = level;
      values[level] = box.evaluate(x);
      trace.append(x, values[level]);
    }
    if (trace.size() >= config.budget) break;
    x[i] = sample_gibbs(values, sa_temperature(config.sa_decay, move, space.n), rng);
  }
  return finish(std::move(trace), start);
}

RunResult run_experiment(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                         const std::optional<DesignSchema>& schema) {
  switch (config.algorithm) {
    case Algorithm::eco_f:
    case Algorithm::eco_g: return run_eco(config, box, seed, schema);
    case Algorithm::tco_f: return run_tco(config, box, seed, schema);
    case Algorithm::rs: return run_baseline_rs(config, box, seed, schema);
    case Algorithm::plain_sa: return run_baseline_sa(config, box, seed, schema);
  }
  throw InvalidArgument("unhandled algorithm");
}

}  // namespace catfour
