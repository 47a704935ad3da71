// Command-line front end: single runs, campaigns, folding and self-checks.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "catfour/campaign.hpp"
#include "catfour/verify.hpp"

namespace {

using namespace catfour;

struct OptimizeArgs {
  std::string algorithm = "eco_f";
  std::string afo;
  std::string box = "latin_square";
  std::uint64_t seed = 0;
  std::size_t budget = 500;
  std::string out;
  std::string target;
  std::string target_structure;
  int k = 5;
  int length = 30;
  double noise_sigma = 0.1;
  int max_order = 2;
  std::string folder = "internal";
  std::string folder_command;
  std::string command;
  std::string permutation;
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) out.push_back(std::stoi(item));
  return out;
}

std::string read_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("invalid '--target': cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto end = text.find_last_not_of(" \t\r\n");
  text.erase(end == std::string::npos ? 0 : end + 1);
  return text;
}

int run_optimize(const OptimizeArgs& args) {
  BoxSpec spec;
  spec.kind = parse_box_kind(args.box);
  spec.k = args.k;
  spec.length = args.length;
  spec.noise_sigma = args.noise_sigma;
  spec.external_folder = args.folder == "external";
  spec.folder_command = args.folder_command;
  spec.command = args.command;
  if (!args.permutation.empty()) spec.permutation = parse_int_list(args.permutation);
  if (!args.target.empty()) spec.target = read_structure(args.target);
  if (!args.target_structure.empty()) spec.target = args.target_structure;

  ExperimentConfig config;
  config.algorithm = parse_algorithm(args.algorithm);
  config.budget = args.budget;
  config.max_order = args.max_order;
  if (!args.afo.empty()) {
    config.afo = parse_afo(args.afo);
  } else if (spec.kind == BoxKind::rna_design) {
    config.afo = AfoKind::mcts;
  }

  auto problem = make_problem(spec, RngSeed{args.seed}, config.budget);
  const auto result = run_experiment(config, *problem.box, RngSeed{args.seed}, problem.schema);

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw Error("cannot write '" + args.out + "'");
    result.trace.write_csv(out);
  }
  std::cout << "best_value " << std::setprecision(10) << result.best_value << '\n';
  std::cout << "best_point " << result.best_point.to_string() << '\n';
  if (problem.schema) std::cout << "sequence " << decode_sequence(*problem.schema, result.best_point) << '\n';
  if (spec.kind == BoxKind::rna_optimize) std::cout << "sequence " << decode_rna(result.best_point) << '\n';
  std::cout << "seconds_per_step " << result.seconds_per_step() << '\n';
  return 0;
}

int run_campaign_cmd(const std::string& config_path, const std::string& out_dir, std::optional<unsigned> jobs,
                     std::optional<std::size_t> budget, std::optional<std::string> seeds) {
  auto spec = load_campaign(config_path);
  if (jobs) spec.jobs = *jobs;
  if (budget) {
    for (auto& a : spec.algorithms) a.config.budget = *budget;
  }
  if (seeds) spec.seeds = parse_seed_list(*seeds);
  const auto summary = run_campaign(spec, out_dir);

  std::cout << std::left << std::setw(16) << "algorithm" << std::setw(14) << "final_mean" << std::setw(14) << "sem"
            << "s/step\n";
  for (const auto& a : summary.algorithms) {
    std::cout << std::setw(16) << a.label << std::setw(14) << a.mean.back() << std::setw(14) << a.sem.back()
              << a.seconds_per_step << '\n';
  }
  return 0;
}

int run_fold(const std::string& sequence, bool external, const std::string& command, int min_loop) {
  RnaFolder folder = RnaFolder::internal(min_loop);
  if (external || !command.empty()) {
    std::string cmd = command;
    if (const char* env = std::getenv(kExternalFolderEnv); env && *env) cmd = env;
    if (cmd.empty()) cmd = "RNAfold --noPS";
    folder = RnaFolder::external(cmd);
  }
  const auto result = folder.fold(sequence);
  std::cout << sequence << '\n' << result.structure << " (" << std::fixed << std::setprecision(2) << result.energy
            << ")\n";
  return 0;
}

int run_verify() {
  bool ok = true;
  for (const auto& check : run_verification()) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
    ok = ok && check.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Categorical black-box optimization with Fourier surrogates"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Run one algorithm on one box with one seed");
  optimize->add_option("--algorithm", opt.algorithm, "eco_f | eco_g | tco_f | rs | plain_sa")->capture_default_str();
  optimize->add_option("--afo", opt.afo, "sa | mcts (design boxes default to mcts)");
  optimize->add_option("--box", opt.box, "latin_square | rna_optimize | rna_design | external")->capture_default_str();
  optimize->add_option("--seed", opt.seed)->capture_default_str();
  optimize->add_option("--budget", opt.budget)->capture_default_str();
  optimize->add_option("--out", opt.out, "Trace CSV path");
  optimize->add_option("--target", opt.target, "Dot-bracket target file for rna_design");
  optimize->add_option("--structure", opt.target_structure, "Dot-bracket target given inline");
  optimize->add_option("--k", opt.k, "Latin-square order or external cardinality")->capture_default_str();
  optimize->add_option("--length", opt.length, "RNA length or external variable count")->capture_default_str();
  optimize->add_option("--noise-sigma", opt.noise_sigma)->capture_default_str();
  optimize->add_option("--max-order", opt.max_order)->capture_default_str();
  optimize->add_option("--folder", opt.folder, "internal | external")->capture_default_str();
  optimize->add_option("--folder-command", opt.folder_command);
  optimize->add_option("--command", opt.command, "Scoring executable for the external box");
  optimize->add_option("--permutation", opt.permutation, "Level relabelling, e.g. 1,0,2,3,4");

  std::string config_path;
  std::string out_dir = ".";
  std::optional<unsigned> jobs;
  std::optional<std::size_t> campaign_budget;
  std::optional<std::string> seeds;
  auto* campaign = app.add_subcommand("campaign", "Run every (algorithm, seed) cell of a config file");
  campaign->add_option("--config", config_path)->required();
  campaign->add_option("--out", out_dir)->capture_default_str();
  campaign->add_option("--jobs", jobs, "Worker threads (default: all cores)");
  campaign->add_option("--budget", campaign_budget, "Override every algorithm's budget");
  campaign->add_option("--seed", seeds, "Override the seed list, e.g. 0-9 or 1,4");

  std::string sequence;
  bool external = false;
  std::string fold_command;
  int min_loop = 3;
  auto* fold = app.add_subcommand("fold", "Fold an RNA sequence");
  fold->add_option("sequence", sequence)->required();
  fold->add_flag("--external", external, "Use the external folder");
  fold->add_option("--command", fold_command, "External folder command");
  fold->add_option("--min-loop", min_loop)->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run the basis and folding oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*optimize) return run_optimize(opt);
    if (*campaign) return run_campaign_cmd(config_path, out_dir, jobs, campaign_budget, seeds);
    if (*fold) return run_fold(sequence, external, fold_command, min_loop);
    if (*verify) return run_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
