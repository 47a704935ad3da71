#include "catfour/campaign.hpp"

#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace catfour {

namespace pt = boost::property_tree;

std::string to_string(BoxKind kind) {
  switch (kind) {
    case BoxKind::latin_square: return "latin_square";
    case BoxKind::rna_optimize: return "rna_optimize";
    case BoxKind::rna_design: return "rna_design";
    case BoxKind::external: return "external";
  }
  return "unknown";
}

BoxKind parse_box_kind(std::string_view text) {
  for (auto k : {BoxKind::latin_square, BoxKind::rna_optimize, BoxKind::rna_design, BoxKind::external}) {
    if (text == to_string(k)) return k;
  }
  throw InvalidArgument("unknown box '" + std::string(text) + "'");
}

RnaFolder BoxSpec::folder() const {
  if (const char* env = std::getenv(kExternalFolderEnv); env && *env) {
    if (external_folder) return RnaFolder::external(env);
  }
  if (external_folder) return RnaFolder::external(folder_command.empty() ? "RNAfold --noPS" : folder_command);
  return RnaFolder::internal(min_loop);
}

Problem make_problem(const BoxSpec& spec, RngSeed seed, std::optional<std::size_t> budget) {
  Problem problem;
  switch (spec.kind) {
    case BoxKind::latin_square:
      problem.box = std::make_unique<LatinSquareBox>(spec.k, spec.noise_sigma, seed);
      break;
    case BoxKind::rna_optimize:
      problem.box = std::make_unique<RnaOptimizeBox>(spec.length, spec.folder());
      break;
    case BoxKind::rna_design: {
      auto box = std::make_unique<RnaDesignBox>(spec.target, spec.folder());
      problem.schema = box->schema();
      problem.box = std::move(box);
      break;
    }
    case BoxKind::external:
      problem.box = std::make_unique<ExternalScoreBox>(CategoricalSpace(spec.length, spec.k), spec.command);
      break;
  }
  if (!spec.permutation.empty()) {
    if (problem.schema) throw InvalidArgument("level permutations apply to generic boxes only");
    problem.box = std::make_unique<PermutedLevelsBox>(std::move(problem.box), spec.permutation);
  }
  problem.box->set_budget(budget);
  return problem;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::string item;
  std::istringstream in{std::string(text)};
  auto parse_u64 = [&](const std::string& s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::uint64_t>(v);
  };
  try {
    while (std::getline(in, item, ',')) {
      const auto first = item.find_first_not_of(" \t");
      const auto last = item.find_last_not_of(" \t");
      if (first == std::string::npos) continue;
      item = item.substr(first, last - first + 1);
      if (const auto dash = item.find('-'); dash != std::string::npos && dash > 0) {
        const auto lo = parse_u64(item.substr(0, dash));
        const auto hi = parse_u64(item.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument(item);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(parse_u64(item));
      }
    }
  } catch (const std::exception&) {
    throw ConfigError("invalid 'seeds': cannot parse '" + std::string(text) + "'");
  }
  if (seeds.empty()) throw ConfigError("invalid 'seeds': no seeds given");
  return seeds;
}

namespace {

std::string read_target(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("invalid 'target': cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto end = text.find_last_not_of(" \t\r\n");
  text.erase(end == std::string::npos ? 0 : end + 1);
  return text;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

// Typed access to one section that reports the section and key on failure
// and rejects unknown keys.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree, std::set<std::string> allowed)
      : name_(std::move(name)), tree_(tree) {
    for (const auto& [key, value] : tree_) {
      if (!allowed.count(key)) throw ConfigError("[" + name_ + "] unknown field '" + key + "'");
      if (!value.empty()) throw ConfigError("[" + name_ + "] field '" + key + "' is not a plain value");
    }
  }

  bool has(const std::string& key) const { return tree_.count(key) > 0; }
  std::string text(const std::string& key) const { return tree_.get<std::string>(key); }

  template <class T>
  T get(const std::string& key) const {
    const auto raw = text(key);
    std::istringstream in(raw);
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
      if (raw == "true" || raw == "1" || raw == "yes") return true;
      if (raw == "false" || raw == "0" || raw == "no") return false;
      fail(key, raw);
    } else {
      in >> value;
      if (!in || !(in >> std::ws).eof()) fail(key, raw);
    }
    return value;
  }

  template <class T>
  void maybe(const std::string& key, T& target) const {
    if (has(key)) target = get<T>(key);
  }

  template <class T>
  void maybe(const std::string& key, std::optional<T>& target) const {
    if (has(key)) target = get<T>(key);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& raw) const {
    throw ConfigError("[" + name_ + "] invalid '" + key + "': cannot parse '" + raw + "'");
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const pt::ptree& tree_;
};

const std::set<std::string> kExperimentKeys = {
    "name", "box", "budget", "seeds", "jobs", "algorithms", "k", "noise_sigma", "length", "n", "target",
    "target_structure", "folder", "folder_command", "min_loop", "command", "permutation"};

const std::set<std::string> kAlgorithmKeys = {
    "algorithm", "afo", "budget", "max_order", "lambda", "sa_decay", "sa_iterations", "sa_warm_start",
    "mcts_exploration", "mcts_playouts", "acquisition_lambda", "nu", "s2", "d0", "standardize", "warmup_draws",
    "refresh_draws", "kept_draws", "initial_observations"};

void apply_algorithm_section(const Section& s, ExperimentConfig& c) {
  if (s.has("afo")) {
    try {
      c.afo = parse_afo(s.text("afo"));
    } catch (const InvalidArgument&) {
      throw ConfigError("[" + s.name() + "] invalid 'afo': unknown optimizer '" + s.text("afo") + "'");
    }
  }
  s.maybe("budget", c.budget);
  s.maybe("max_order", c.max_order);
  s.maybe("lambda", c.eco_lambda);
  s.maybe("sa_decay", c.sa_decay);
  s.maybe("sa_iterations", c.sa_iterations);
  s.maybe("sa_warm_start", c.sa_warm_start);
  s.maybe("mcts_exploration", c.mcts_exploration);
  s.maybe("mcts_playouts", c.mcts_playouts);
  s.maybe("acquisition_lambda", c.acquisition_lambda);
  s.maybe("nu", c.horseshoe.nu);
  s.maybe("s2", c.horseshoe.s2);
  s.maybe("d0", c.horseshoe.d0);
  s.maybe("standardize", c.horseshoe.standardize);
  s.maybe("warmup_draws", c.mcmc.warmup_draws);
  s.maybe("refresh_draws", c.mcmc.refresh_draws);
  s.maybe("kept_draws", c.mcmc.kept_draws);
  s.maybe("initial_observations", c.tco_initial_observations);
}

}  // namespace

CampaignSpec parse_campaign_at(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  const auto exp_node = tree.get_child_optional("experiment");
  if (!exp_node) throw ConfigError("missing [experiment] section");
  const Section exp("experiment", *exp_node, kExperimentKeys);

  CampaignSpec spec;
  exp.maybe("name", spec.name);
  if (exp.has("box")) {
    try {
      spec.box.kind = parse_box_kind(exp.text("box"));
    } catch (const InvalidArgument&) {
      throw ConfigError("[experiment] invalid 'box': unknown box '" + exp.text("box") + "'");
    }
  }
  exp.maybe("k", spec.box.k);
  exp.maybe("noise_sigma", spec.box.noise_sigma);
  exp.maybe("length", spec.box.length);
  exp.maybe("n", spec.box.length);
  exp.maybe("min_loop", spec.box.min_loop);
  exp.maybe("command", spec.box.command);
  exp.maybe("folder_command", spec.box.folder_command);
  if (exp.has("folder")) {
    const auto f = exp.text("folder");
    if (f != "internal" && f != "external") exp.fail("folder", f);
    spec.box.external_folder = f == "external";
  }
  if (exp.has("target_structure")) spec.box.target = exp.text("target_structure");
  if (exp.has("target")) {
    std::filesystem::path p = exp.text("target");
    if (p.is_relative()) p = base_dir / p;
    spec.box.target = read_target(p);
  }
  if (exp.has("permutation")) {
    for (const auto& item : split_list(exp.text("permutation"))) {
      try {
        spec.box.permutation.push_back(std::stoi(item));
      } catch (const std::exception&) {
        exp.fail("permutation", exp.text("permutation"));
      }
    }
  }
  if (spec.box.kind == BoxKind::rna_design && spec.box.target.empty()) {
    throw ConfigError("[experiment] invalid 'target': rna_design needs a target structure");
  }
  if (spec.box.kind == BoxKind::external && spec.box.command.empty()) {
    throw ConfigError("[experiment] invalid 'command': external box needs a command");
  }
  if (exp.has("seeds")) spec.seeds = parse_seed_list(exp.text("seeds"));
  exp.maybe("jobs", spec.jobs);

  std::size_t budget = 500;
  exp.maybe("budget", budget);

  if (!exp.has("algorithms")) throw ConfigError("[experiment] missing 'algorithms'");
  const auto labels = split_list(exp.text("algorithms"));
  if (labels.empty()) throw ConfigError("[experiment] invalid 'algorithms': empty list");
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) throw ConfigError("[experiment] invalid 'algorithms': duplicate '" + label + "'");
    AlgorithmEntry entry{label, {}};
    entry.config.budget = budget;
    const auto node = tree.get_child_optional(pt::ptree::path_type(label, '\0'));
    std::string algo_name = label;
    std::optional<Section> section;
    if (node) {
      section.emplace(label, *node, kAlgorithmKeys);
      if (section->has("algorithm")) algo_name = section->text("algorithm");
    }
    try {
      entry.config.algorithm = parse_algorithm(algo_name);
    } catch (const InvalidArgument&) {
      throw ConfigError("invalid 'algorithm' for '" + label + "': unknown algorithm name '" + algo_name + "'");
    }
    if (section) apply_algorithm_section(*section, entry.config);
    spec.algorithms.push_back(std::move(entry));
  }
  for (const auto& [name, child] : tree) {
    if (name != "experiment" && !seen.count(name)) {
      throw ConfigError("section [" + name + "] does not match any entry of 'algorithms'");
    }
  }
  return spec;
}

CampaignSpec parse_campaign(std::istream& in) { return parse_campaign_at(in, std::filesystem::current_path()); }

CampaignSpec load_campaign(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_campaign_at(in, path.parent_path().empty() ? std::filesystem::current_path() : path.parent_path());
}

void aggregate_traces(const std::vector<const RunTrace*>& traces, std::size_t steps, std::vector<double>& mean,
                      std::vector<double>& sem) {
  mean.assign(steps, 0.0);
  sem.assign(steps, 0.0);
  if (traces.empty()) return;
  const double runs = static_cast<double>(traces.size());
  std::vector<double> column(traces.size());
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto& recs = traces[r]->records();
      if (recs.empty()) throw InvalidArgument("cannot aggregate an empty trace");
      column[r] = recs[std::min(s, recs.size() - 1)].best_so_far;
    }
    double m = 0.0;
    for (double v : column) m += v;
    m /= runs;
    double ss = 0.0;
    for (double v : column) ss += (v - m) * (v - m);
    mean[s] = m;
    sem[s] = traces.size() > 1 ? std::sqrt(ss / (runs - 1.0)) / std::sqrt(runs) : 0.0;
  }
}

CampaignSummary run_campaign(const CampaignSpec& spec, const std::filesystem::path& out_dir) {
  if (spec.algorithms.empty()) throw ConfigError("campaign has no algorithms");
  std::filesystem::create_directories(out_dir);

  struct Cell {
    std::size_t algorithm;
    std::uint64_t seed;
    RunResult result;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
    for (auto seed : spec.seeds) cells.push_back({a, seed, {}});
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& cell = cells[i];
      try {
        const auto& entry = spec.algorithms[cell.algorithm];
        auto problem = make_problem(spec.box, RngSeed{cell.seed}, entry.config.budget);
        cell.result = run_experiment(entry.config, *problem.box, RngSeed{cell.seed}, problem.schema);
        const auto file = out_dir / (spec.name + "_" + entry.label + "_" + std::to_string(cell.seed) + ".csv");
        std::ofstream out(file);
        if (!out) throw Error("cannot write '" + file.string() + "'");
        cell.result.trace.write_csv(out);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned jobs = spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CampaignSummary summary;
  for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
    AlgorithmSummary s;
    s.label = spec.algorithms[a].label;
    std::vector<const RunTrace*> traces;
    double seconds = 0.0;
    for (const auto& cell : cells) {
      if (cell.algorithm != a) continue;
      traces.push_back(&cell.result.trace);
      s.seeds.push_back(cell.seed);
      s.final_best.push_back(cell.result.best_value);
      seconds += cell.result.seconds_per_step();
    }
    s.seconds_per_step = seconds / static_cast<double>(traces.size());
    aggregate_traces(traces, spec.algorithms[a].config.budget, s.mean, s.sem);
    summary.algorithms.push_back(std::move(s));
  }

  {
    std::ofstream out(out_dir / (spec.name + "_summary.csv"));
    write_summary_csv(summary, out);
  }
  {
    std::ofstream out(out_dir / (spec.name + "_timing.csv"));
    write_timing_csv(summary, out);
  }
  return summary;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_summary_csv(const CampaignSummary& summary, std::ostream& out) {
  out << "algorithm,step,mean,sem\n";
  for (const auto& a : summary.algorithms) {
    for (std::size_t s = 0; s < a.mean.size(); ++s) {
      out << a.label << ',' << (s + 1) << ',' << format_number(a.mean[s]) << ',' << format_number(a.sem[s]) << '\n';
    }
  }
}

void write_timing_csv(const CampaignSummary& summary, std::ostream& out) {
  out << "algorithm,runs,seconds_per_step\n";
  for (const auto& a : summary.algorithms) {
    out << a.label << ',' << a.seeds.size() << ',' << format_number(a.seconds_per_step) << '\n';
  }
}

}  // namespace catfour
