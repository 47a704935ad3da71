#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "catfour/blackboxes.hpp"
#include "catfour/eco.hpp"
#include "catfour/mcts.hpp"
#include "catfour/sa.hpp"
#include "catfour/tco.hpp"

namespace catfour {

enum class Algorithm { eco_f, eco_g, tco_f, rs, plain_sa };
enum class AfoKind { sa, mcts };

std::string to_string(Algorithm algorithm);
std::string to_string(AfoKind afo);
Algorithm parse_algorithm(std::string_view text);
AfoKind parse_afo(std::string_view text);

/// Every knob of one optimizer run. Unset optionals take the
/// surrogate-dependent defaults (SA moves 3n for ECO and 6n for TCO, UCT
/// exploration 0.5 for ECO and 0.25 for TCO, 30 playouts per slot).
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::eco_f;
  AfoKind afo = AfoKind::sa;
  std::size_t budget = 500;
  int max_order = 2;

  double eco_lambda = 1.0;

  double sa_decay = 3.0;
  std::optional<int> sa_iterations;
  bool sa_warm_start = false;

  std::optional<double> mcts_exploration;
  std::optional<int> mcts_playouts;

  double acquisition_lambda = 1e-5;
  HorseshoeHyper horseshoe;
  McmcConfig mcmc;
  int tco_initial_observations = 5;

  int resolved_sa_iterations(int n) const;
  double resolved_exploration() const;
  int resolved_playouts(int height) const;

  /// Throws InvalidArgument naming the offending field.
  void validate(const CategoricalSpace& space) const;
};

struct RunResult {
  RunTrace trace;
  CategoricalPoint best_point;
  double best_value = 0.0;
  double seconds = 0.0;

  double seconds_per_step() const;
};

/// `schema` marks a design problem: points are schema points and MCTS visits
/// the slots in a per-run random order drawn from the seed. Without a schema
/// MCTS builds points variable by variable in index order.
RunResult run_eco(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                  const std::optional<DesignSchema>& schema = std::nullopt);
RunResult run_tco(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                  const std::optional<DesignSchema>& schema = std::nullopt);
RunResult run_baseline_rs(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                          const std::optional<DesignSchema>& schema = std::nullopt);
/// Algorithm-1 moves against the true box; each move costs k evaluations and
/// the run stops when the budget runs out, even mid-move.
RunResult run_baseline_sa(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                          const std::optional<DesignSchema>& schema = std::nullopt);

RunResult run_experiment(const ExperimentConfig& config, BlackBox& box, RngSeed seed,
                         const std::optional<DesignSchema>& schema = std::nullopt);

}  // namespace catfour
