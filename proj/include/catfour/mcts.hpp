#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "catfour/domain.hpp"
#include "catfour/sa.hpp"

namespace catfour {

enum class SlotKind { unpaired, paired, abstract };

/// One construction position. Unpaired slots choose from {A,G,C,U}, paired
/// slots from {GC,CG,AU,UA}; abstract slots are plain categorical variables.
struct SlotSpec {
  SlotKind kind = SlotKind::abstract;
  int first = 0;    // sequence position (or variable index for abstract slots)
  int second = -1;  // partner position for paired slots
  int actions = 4;

  bool operator==(const SlotSpec&) const = default;
};

inline constexpr std::string_view kUnpairedActions = "AGCU";
inline constexpr std::string_view kPairedActions[4] = {"GC", "CG", "AU", "UA"};

/// Slots of a design problem plus the order in which the search visits them.
/// Points over a schema are indexed by slot, each value an action index.
struct DesignSchema {
  std::vector<SlotSpec> slots;
  std::vector<int> order;  // permutation of slot indices
  int sequence_length = 0;

  int height() const { return static_cast<int>(slots.size()); }
  /// Uniform action count across slots; the categorical space of schema points.
  CategoricalSpace space() const;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Bracket-matched slots of a dot-bracket target, ordered by first position,
/// visited in index order.
DesignSchema parse_target(std::string_view target);

/// parse_target plus a seeded random visiting order.
DesignSchema build_schema(std::string_view target, Rng& rng);

/// n abstract slots with k actions each, visited in index order.
DesignSchema generic_schema(const CategoricalSpace& space);

void shuffle_order(DesignSchema& schema, Rng& rng);

/// Nucleotide sequence for a schema point.
std::string decode_sequence(const DesignSchema& schema, const CategoricalPoint& point);

struct MctsConfig {
  double exploration = 0.5;
  int playouts = 30;
};

/// Edge statistics of a tree node, one entry per action.
struct MctsNode {
  int depth = 0;
  int parent = -1;
  int parent_action = -1;
  std::vector<int> children;  // -1 while unexpanded
  std::vector<int> visits;
  std::vector<double> value;
  std::vector<int> untried;  // shuffled actions not yet visited, consumed from the back

  int total_visits() const;
};

/// Path of actions taken in one playout (by depth) and the reward it produced.
struct PlayoutRecord {
  std::vector<int> actions;
  int tree_depth = 0;  // number of leading actions that are tree edges
  double reward = 0.0;
};

/// UCT search over the sequential construction of a schema point, with
/// reward -surrogate(point) at terminal states.
class MctsSearch {
 public:
  MctsSearch(const DesignSchema& schema, MctsConfig config);

  /// Runs the configured number of playouts and returns the best point seen.
  CategoricalPoint run(const SurrogateFn& surrogate, Rng& rng);

  const std::vector<MctsNode>& nodes() const { return nodes_; }
  const MctsNode& root() const { return nodes_.front(); }
  double best_reward() const { return best_reward_; }
  const std::vector<PlayoutRecord>& playouts() const { return history_; }
  void record_playouts(bool on) { record_ = on; }

 private:
  int add_node(int depth, int parent, int parent_action, Rng& rng);
  int select_action(const MctsNode& node) const;

  const DesignSchema& schema_;
  MctsConfig config_;
  std::vector<MctsNode> nodes_;
  std::vector<PlayoutRecord> history_;
  bool record_ = false;
  double best_reward_ = 0.0;
};

/// One fresh tree per call.
CategoricalPoint mcts_maximize(const SurrogateFn& surrogate, const DesignSchema& schema, const MctsConfig& config,
                               Rng& rng);

/// Uniform rollout through the schema from the empty state.
CategoricalPoint random_rollout(const DesignSchema& schema, Rng& rng);

}  // namespace catfour
