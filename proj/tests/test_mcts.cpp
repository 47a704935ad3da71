#include <doctest.h>

#include <map>
#include <set>

#include "catfour/basis.hpp"
#include "catfour/mcts.hpp"

using namespace catfour;

TEST_CASE("schema from a hairpin target") {
  auto rng = make_rng(RngSeed{1}, 3);
  const auto schema = build_schema("(((...)))", rng);
  CHECK(schema.height() == 6);
  CHECK(schema.sequence_length == 9);
  std::set<std::pair<int, int>> pairs;
  std::set<int> dots;
  for (const auto& s : schema.slots) {
    if (s.kind == SlotKind::paired) pairs.insert({s.first, s.second});
    if (s.kind == SlotKind::unpaired) dots.insert(s.first);
  }
  CHECK(pairs == std::set<std::pair<int, int>>{{0, 8}, {1, 7}, {2, 6}});
  CHECK(dots == std::set<int>{3, 4, 5});
  std::vector<int> sorted = schema.order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("schema edge cases") {
  auto rng = make_rng(RngSeed{1}, 3);
  CHECK(build_schema(".", rng).height() == 1);
  CHECK_THROWS_AS(build_schema("(()", rng), ParseError);
  CHECK_THROWS_AS(build_schema("())", rng), ParseError);
  CHECK_THROWS_AS(build_schema("(.x)", rng), ParseError);
  CHECK_THROWS_AS(build_schema("", rng), ParseError);
}

TEST_CASE("visiting order depends on the seed") {
  const std::string target = "((((....))))....((((....))))";
  auto a = make_rng(RngSeed{1}, 3);
  auto b = make_rng(RngSeed{1}, 3);
  auto c = make_rng(RngSeed{2}, 3);
  const auto sa = build_schema(target, a);
  CHECK(sa.order == build_schema(target, b).order);
  CHECK(sa.order != build_schema(target, c).order);
}

TEST_CASE("decoding honours pairs") {
  const auto schema = parse_target("(.)");
  // slots sorted by first position: paired (0,2), unpaired 1
  CHECK(decode_sequence(schema, CategoricalPoint{0, 3}) == "GUC");
  CHECK(decode_sequence(schema, CategoricalPoint{3, 1}) == "UGA");
}

TEST_CASE("single slot search tries every action") {
  const auto schema = generic_schema(CategoricalSpace(1, 5));
  const SurrogateFn f = [](const CategoricalPoint& p) { return p[0] == 3 ? 0.0 : 1.0; };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto rng = make_rng(RngSeed{seed}, 1);
    CHECK(mcts_maximize(f, schema, MctsConfig{0.5, 5}, rng) == CategoricalPoint{3});
  }
}

TEST_CASE("unique optimum in a small tree") {
  const auto schema = generic_schema(CategoricalSpace(3, 2));
  // brute force confirms exactly one of the 8 terminal states scores -1
  const CategoricalPoint target{1, 0, 1};
  const SurrogateFn f = [&](const CategoricalPoint& p) { return p == target ? -1.0 : 0.0; };
  int optima = 0;
  for (std::size_t i = 0; i < 8; ++i) optima += f(domain_point(CategoricalSpace(3, 2), i)) == -1.0;
  REQUIRE(optima == 1);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = make_rng(RngSeed{seed}, 1);
    wins += mcts_maximize(f, schema, MctsConfig{0.5, 30 * 3}, rng) == target;
  }
  CHECK(wins >= 19);
}

TEST_CASE("running mean of two rewards") {
  // h=2, k=2 and no exploration: playouts 1 and 2 open both root edges with
  // rewards 1 and 0, playout 3 follows the better edge and earns 0.
  const auto schema = generic_schema(CategoricalSpace(2, 2));
  int call = 0;
  const SurrogateFn f = [&](const CategoricalPoint&) { return call++ == 0 ? -1.0 : 0.0; };
  MctsSearch search(schema, MctsConfig{0.0, 3});
  search.record_playouts(true);
  auto rng = make_rng(RngSeed{3}, 1);
  search.run(f, rng);
  const int first = search.playouts()[0].actions[0];
  CHECK(search.root().visits[first] == 2);
  CHECK(search.root().value[first] == 0.5);
}

TEST_CASE("root visits equal playouts and backups match an independent tally") {
  const auto schema = generic_schema(CategoricalSpace(4, 3));
  const SurrogateFn f = [](const CategoricalPoint& p) { return 0.3 * p[0] - 0.2 * p[1] * p[2] + 0.1 * p[3]; };
  MctsSearch search(schema, MctsConfig{0.5, 100});
  search.record_playouts(true);
  auto rng = make_rng(RngSeed{4}, 1);
  search.run(f, rng);
  CHECK(search.root().total_visits() == 100);

  std::map<std::vector<int>, std::vector<double>> tally;  // edge = action prefix
  for (const auto& rec : search.playouts()) {
    for (int depth = 1; depth <= rec.tree_depth; ++depth) {
      tally[std::vector<int>(rec.actions.begin(), rec.actions.begin() + depth)].push_back(rec.reward);
    }
  }
  std::size_t edges = 0;
  const auto& nodes = search.nodes();
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    std::vector<int> prefix;
    for (int n = static_cast<int>(id); nodes[n].parent >= 0; n = nodes[n].parent) prefix.insert(prefix.begin(), nodes[n].parent_action);
    for (std::size_t a = 0; a < nodes[id].visits.size(); ++a) {
      if (nodes[id].visits[a] == 0) continue;
      auto key = prefix;
      key.push_back(static_cast<int>(a));
      const auto& rewards = tally.at(key);
      double mean = 0.0;
      for (double r : rewards) mean += r;
      mean /= static_cast<double>(rewards.size());
      CHECK(nodes[id].visits[a] == static_cast<int>(rewards.size()));
      CHECK(nodes[id].value[a] == doctest::Approx(mean).epsilon(1e-12));
      ++edges;
    }
  }
  CHECK(edges == tally.size());
  double best = -1e300;
  for (const auto& rec : search.playouts()) best = std::max(best, rec.reward);
  CHECK(search.best_reward() == best);
}

TEST_CASE("searched design points always hold legal pairs") {
  auto rng = make_rng(RngSeed{6}, 3);
  const auto schema = build_schema("((((....))))....((((....))))", rng);
  const SurrogateFn f = [](const CategoricalPoint& p) { return static_cast<double>(p[0] + p[5]); };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto r = make_rng(RngSeed{seed}, 1);
    const auto x = mcts_maximize(f, schema, MctsConfig{0.5, 50}, r);
    const auto seq = decode_sequence(schema, x);
    for (const auto& s : schema.slots) {
      if (s.kind != SlotKind::paired) continue;
      const std::string dimer{seq[s.first], seq[s.second]};
      CHECK((dimer == "GC" || dimer == "CG" || dimer == "AU" || dimer == "UA"));
    }
    const auto rolled = decode_sequence(schema, random_rollout(schema, r));
    CHECK(rolled.find('N') == std::string::npos);
  }
}

TEST_CASE("search is deterministic per seed and validates input") {
  const auto schema = generic_schema(CategoricalSpace(5, 3));
  const SurrogateFn f = [](const CategoricalPoint& p) { return static_cast<double>(p[1] - p[4]); };
  auto a = make_rng(RngSeed{2}, 1);
  auto b = make_rng(RngSeed{2}, 1);
  CHECK(mcts_maximize(f, schema, MctsConfig{0.5, 40}, a) == mcts_maximize(f, schema, MctsConfig{0.5, 40}, b));
  CHECK_THROWS_AS(MctsSearch(schema, MctsConfig{-1.0, 4}), InvalidArgument);
  CHECK_THROWS_AS(MctsSearch(schema, MctsConfig{0.5, 0}), InvalidArgument);
  const SurrogateFn bad = [](const CategoricalPoint&) { return NAN; };
  CHECK_THROWS_AS(mcts_maximize(bad, schema, MctsConfig{0.5, 4}, a), InvalidArgument);
}
