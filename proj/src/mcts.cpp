#include "catfour/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace catfour {

CategoricalSpace DesignSchema::space() const {
  if (slots.empty()) throw InvalidArgument("design schema has no slots");
  const int k = slots.front().actions;
  for (const auto& s : slots) {
    if (s.actions != k) throw InvalidArgument("design schema mixes action-set sizes");
  }
  return CategoricalSpace(height(), k);
}

DesignSchema parse_target(std::string_view target) {
  DesignSchema schema;
  schema.sequence_length = static_cast<int>(target.size());
  std::vector<int> open;
  std::vector<SlotSpec> slots;
  for (int pos = 0; pos < static_cast<int>(target.size()); ++pos) {
    const char ch = target[pos];
    if (ch == '.') {
      slots.push_back({SlotKind::unpaired, pos, -1, 4});
    } else if (ch == '(') {
      open.push_back(pos);
    } else if (ch == ')') {
      if (open.empty()) throw ParseError("unbalanced ')' at position " + std::to_string(pos));
      slots.push_back({SlotKind::paired, open.back(), pos, 4});
      open.pop_back();
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "' at position " + std::to_string(pos));
    }
  }
  if (!open.empty()) throw ParseError("unbalanced '(' at position " + std::to_string(open.back()));
  if (slots.empty()) throw ParseError("empty target structure");
  std::sort(slots.begin(), slots.end(), [](const SlotSpec& a, const SlotSpec& b) { return a.first < b.first; });
  schema.slots = std::move(slots);
  schema.order.resize(schema.slots.size());
  std::iota(schema.order.begin(), schema.order.end(), 0);
  return schema;
}

DesignSchema build_schema(std::string_view target, Rng& rng) {
  auto schema = parse_target(target);
  shuffle_order(schema, rng);
  return schema;
}

DesignSchema generic_schema(const CategoricalSpace& space) {
  DesignSchema schema;
  schema.sequence_length = space.n;
  for (int i = 0; i < space.n; ++i) schema.slots.push_back({SlotKind::abstract, i, -1, space.k});
  schema.order.resize(schema.slots.size());
  std::iota(schema.order.begin(), schema.order.end(), 0);
  return schema;
}

void shuffle_order(DesignSchema& schema, Rng& rng) { std::shuffle(schema.order.begin(), schema.order.end(), rng); }

std::string decode_sequence(const DesignSchema& schema, const CategoricalPoint& point) {
  require_valid(point, schema.space());
  std::string seq(static_cast<std::size_t>(schema.sequence_length), 'N');
  for (std::size_t s = 0; s < schema.slots.size(); ++s) {
    const auto& slot = schema.slots[s];
    switch (slot.kind) {
      case SlotKind::unpaired:
        seq[slot.first] = kUnpairedActions[point[s]];
        break;
      case SlotKind::paired:
        seq[slot.first] = kPairedActions[point[s]][0];
        seq[slot.second] = kPairedActions[point[s]][1];
        break;
      case SlotKind::abstract:
        throw InvalidArgument("abstract slots have no nucleotide decoding");
    }
  }
  return seq;
}

int MctsNode::total_visits() const { return std::accumulate(visits.begin(), visits.end(), 0); }

MctsSearch::MctsSearch(const DesignSchema& schema, MctsConfig config) : schema_(schema), config_(config) {
  if (config_.exploration < 0.0) throw InvalidArgument("MCTS exploration constant must be >= 0");
  if (config_.playouts < 1) throw InvalidArgument("MCTS needs at least one playout");
  if (schema_.slots.empty() || schema_.order.size() != schema_.slots.size()) {
    throw InvalidArgument("MCTS schema needs slots and a visiting order over them");
  }
}

int MctsSearch::add_node(int depth, int parent, int parent_action, Rng& rng) {
  MctsNode node;
  node.depth = depth;
  node.parent = parent;
  node.parent_action = parent_action;
  if (depth < schema_.height()) {
    const int actions = schema_.slots[schema_.order[depth]].actions;
    node.children.assign(actions, -1);
    node.visits.assign(actions, 0);
    node.value.assign(actions, 0.0);
    node.untried.resize(actions);
    std::iota(node.untried.begin(), node.untried.end(), 0);
    std::shuffle(node.untried.begin(), node.untried.end(), rng);
  }
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int MctsSearch::select_action(const MctsNode& node) const {
  const double log_n = std::log(static_cast<double>(node.total_visits()));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < node.visits.size(); ++a) {
    const double score = node.value[a] + config_.exploration * std::sqrt(log_n / node.visits[a]);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(a);
    }
  }
  return best;
}

CategoricalPoint MctsSearch::run(const SurrogateFn& surrogate, Rng& rng) {
  const int h = schema_.height();
  nodes_.clear();
  history_.clear();
  add_node(0, -1, -1, rng);
  best_reward_ = -std::numeric_limits<double>::infinity();
  CategoricalPoint best;

  std::vector<int> values(static_cast<std::size_t>(h));
  std::vector<int> path;
  path.reserve(static_cast<std::size_t>(h));
  for (int p = 0; p < config_.playouts; ++p) {
    path.clear();
    int node = 0;
    // Selection and expansion: descend until a state outside the tree is reached.
    while (nodes_[node].depth < h) {
      const int depth = nodes_[node].depth;
      int action;
      if (!nodes_[node].untried.empty()) {
        action = nodes_[node].untried.back();
        nodes_[node].untried.pop_back();
      } else {
        action = select_action(nodes_[node]);
      }
      path.push_back(action);
      values[schema_.order[depth]] = action;
      const int child = nodes_[node].children[action];
      if (child < 0) {
        const int created = add_node(depth + 1, node, action, rng);
        nodes_[node].children[action] = created;
        node = created;
        break;
      }
      node = child;
    }
    const int leaf = node;
    const int tree_depth = static_cast<int>(path.size());

    for (int depth = tree_depth; depth < h; ++depth) {
      const int slot = schema_.order[depth];
      const int action = std::uniform_int_distribution<int>(0, schema_.slots[slot].actions - 1)(rng);
      path.push_back(action);
      values[slot] = action;
    }
    CategoricalPoint terminal{std::vector<int>(values)};
    const double predicted = surrogate(terminal);
    if (!std::isfinite(predicted)) throw InvalidArgument("surrogate returned a non-finite value");
    const double reward = -predicted;

    for (int n = leaf; nodes_[n].parent >= 0; n = nodes_[n].parent) {
      auto& parent = nodes_[nodes_[n].parent];
      const int a = nodes_[n].parent_action;
      ++parent.visits[a];
      parent.value[a] += (reward - parent.value[a]) / parent.visits[a];
    }

    if (record_) history_.push_back({path, tree_depth, reward});
    if (reward > best_reward_) {
      best_reward_ = reward;
      best = std::move(terminal);
    }
  }
  return best;
}

CategoricalPoint mcts_maximize(const SurrogateFn& surrogate, const DesignSchema& schema, const MctsConfig& config,
                               Rng& rng) {
  MctsSearch search(schema, config);
  return search.run(surrogate, rng);
}

CategoricalPoint random_rollout(const DesignSchema& schema, Rng& rng) {
  std::vector<int> values(schema.slots.size());
  for (int depth = 0; depth < schema.height(); ++depth) {
    const int slot = schema.order[depth];
    values[slot] = std::uniform_int_distribution<int>(0, schema.slots[slot].actions - 1)(rng);
  }
  return CategoricalPoint(std::move(values));
}

}  // namespace catfour
