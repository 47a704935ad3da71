#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catfour/optimizer.hpp"

namespace catfour {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class BoxKind { latin_square, rna_optimize, rna_design, external };

std::string to_string(BoxKind kind);
BoxKind parse_box_kind(std::string_view text);

/// Which black box to build and its parameters.
struct BoxSpec {
  BoxKind kind = BoxKind::latin_square;
  int k = 5;                  // latin_square order; external cardinality
  double noise_sigma = 0.1;   // latin_square
  int length = 30;            // rna_optimize sequence length; external variable count
  std::string target;         // rna_design dot-bracket structure
  bool external_folder = false;
  std::string folder_command;  // overridden by CATFOUR_EXTERNAL_FOLDER when set
  int min_loop = 3;
  std::string command;            // external box executable
  std::vector<int> permutation;   // optional level relabelling

  RnaFolder folder() const;
};

/// A constructed box plus the schema when the problem is a design problem.
struct Problem {
  std::unique_ptr<BlackBox> box;
  std::optional<DesignSchema> schema;
};

Problem make_problem(const BoxSpec& spec, RngSeed seed, std::optional<std::size_t> budget);

/// One algorithm entry of a campaign; `label` names its output files.
struct AlgorithmEntry {
  std::string label;
  ExperimentConfig config;
};

struct CampaignSpec {
  std::string name = "experiment";
  BoxSpec box;
  std::vector<AlgorithmEntry> algorithms;
  std::vector<std::uint64_t> seeds{0};
  unsigned jobs = 0;  // 0 = hardware concurrency
};

/// Parses the key = value campaign file. Sections: [experiment] plus one
/// optional section per algorithm label holding overrides.
CampaignSpec parse_campaign(std::istream& in);
CampaignSpec load_campaign(const std::filesystem::path& path);

/// Parses "0-19" or "1,2,5".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct AlgorithmSummary {
  std::string label;
  std::vector<double> mean;  // mean best-so-far per step
  std::vector<double> sem;   // sample sd / sqrt(#seeds), 0 for one seed
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_best;  // per seed, in seed order
  double seconds_per_step = 0.0;   // mean over seeds
};

struct CampaignSummary {
  std::vector<AlgorithmSummary> algorithms;
};

/// Mean and standard error of best-so-far traces padded to `steps` with the
/// last best value.
void aggregate_traces(const std::vector<const RunTrace*>& traces, std::size_t steps, std::vector<double>& mean,
                      std::vector<double>& sem);

/// Runs every (algorithm, seed) cell and writes `{name}_{label}_{seed}.csv`,
/// `{name}_summary.csv` and `{name}_timing.csv` into `out_dir`.
CampaignSummary run_campaign(const CampaignSpec& spec, const std::filesystem::path& out_dir);

void write_summary_csv(const CampaignSummary& summary, std::ostream& out);
void write_timing_csv(const CampaignSummary& summary, std::ostream& out);

}  // namespace catfour
