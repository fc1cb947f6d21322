#include <doctest.h>

#include <algorithm>
#include <functional>

#include "hlflock/error.hpp"
#include "hlflock/graph.hpp"

using namespace hlflock;

namespace {

HLGraph diamond() { return HLGraph(4, {{}, {1}, {1}, {2, 3}}); }

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Calls visit on every assignment of leader sets drawn from subsets of
// {1..n} (self and later agents included), so invalid graphs appear too.
void for_each_assignment(int n, const std::function<void(const HLGraph&)>& visit) {
  std::vector<std::vector<int>> leaders(static_cast<std::size_t>(n));
  std::function<void(int)> rec = [&](int i) {
    if (i > n) {
      visit(HLGraph(n, leaders));
      return;
    }
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      auto& li = leaders[static_cast<std::size_t>(i - 1)];
      li.clear();
      for (int j = 1; j <= n; ++j) {
        if (mask & (1u << (j - 1))) li.push_back(j);
      }
      rec(i + 1);
    }
  };
  rec(1);
}

// Only the valid graphs, with leaders drawn from {1..i-1}.
void for_each_valid(int n, const std::function<void(const HLGraph&)>& visit) {
  std::vector<std::vector<int>> leaders(static_cast<std::size_t>(n));
  std::function<void(int)> rec = [&](int i) {
    if (i > n) {
      visit(HLGraph(n, leaders));
      return;
    }
    for (unsigned mask = 1; mask < (1u << (i - 1)); ++mask) {
      auto& li = leaders[static_cast<std::size_t>(i - 1)];
      li.clear();
      for (int j = 1; j < i; ++j) {
        if (mask & (1u << (j - 1))) li.push_back(j);
      }
      rec(i + 1);
    }
  };
  rec(2);
}

}  // namespace

TEST_CASE("chain is valid") {
  const HLGraph g(3, {{}, {1}, {2}});
  CHECK(validate(g).ok());
  CHECK(validate(HLGraph::chain(6)).ok());
  CHECK_NOTHROW(require_valid(g));
}

TEST_CASE("mutual leaders give EdgeNotBelow(1,2)") {
  const auto res = validate(HLGraph(2, {{2}, {1}}));
  REQUIRE_FALSE(res.ok());
  const auto& v = res.violations.front();
  CHECK(v.kind == Violation::Kind::EdgeNotBelow);
  CHECK(v.agent == 1);
  CHECK(v.leader == 2);
  CHECK(v.describe() == "EdgeNotBelow(1,2)");
}

TEST_CASE("leaderless follower gives EmptyLeaderSet(3)") {
  const auto res = validate(HLGraph(3, {{}, {1}, {}}));
  REQUIRE(res.violations.size() == 1);
  CHECK(res.violations[0].kind == Violation::Kind::EmptyLeaderSet);
  CHECK(res.violations[0].describe() == "EmptyLeaderSet(3)");
}

TEST_CASE("every violation is reported at once") {
  const HLGraph g(4, {{3}, {1, 1}, {}, {7}});
  const auto res = validate(g);
  CHECK(res.violations.size() == 4);
  try {
    require_valid(g);
    FAIL("expected InvalidGraph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidGraph);
    const std::string msg = e.what();
    CHECK(msg.find("EdgeNotBelow(1,3)") != std::string::npos);
    CHECK(msg.find("EmptyLeaderSet(3)") != std::string::npos);
  }
}

TEST_CASE("non-positive weights are rejected") {
  const HLGraph g(2, {{}, {1}}, {{}, {0.0}});
  const auto res = validate(g);
  REQUIRE_FALSE(res.ok());
  CHECK(res.violations[0].kind == Violation::Kind::NonPositiveWeight);
  CHECK(HLGraph(2, {{}, {1}}, {{}, {2.5}}).has_custom_weights());
}

TEST_CASE("zero agents is rejected at construction") {
  CHECK_THROWS_AS(HLGraph(0, {}), Error);
}

TEST_CASE("leader closures") {
  SUBCASE("chain 1<-2<-3 from 3") {
    const auto c = leader_closure(HLGraph::chain(3), 3);
    CHECK(c.members == std::vector<int>{3, 2, 1});
    REQUIRE(c.levels.size() >= 3);
    CHECK(c.levels[0] == std::vector<int>{3});
    CHECK(c.levels[1] == std::vector<int>{2});
    CHECK(c.levels[2] == std::vector<int>{1});
  }
  SUBCASE("agent 1 is alone") {
    const auto c = leader_closure(diamond(), 1);
    CHECK(c.members == std::vector<int>{1});
    CHECK(c.size() == 1);
  }
  SUBCASE("diamond from 4") {
    const auto c = leader_closure(diamond(), 4);
    CHECK(c.members == std::vector<int>{4, 2, 3, 1});
    CHECK(sorted(c.levels[1]) == std::vector<int>{2, 3});
    CHECK(c.contains(1));
  }
  SUBCASE("agent out of range") {
    CHECK_THROWS_AS(leader_closure(diamond(), 5), Error);
    CHECK_THROWS_AS(leader_closure(diamond(), 0), Error);
  }
}

TEST_CASE("depth") {
  CHECK(depth(HLGraph(1, {{}})) == 1);
  for (int n = 2; n <= 5; ++n) CHECK(depth(HLGraph::chain(n)) == n);
  CHECK(depth(diamond()) == 4);
  CHECK(depth(HLGraph(4, {{}, {1}, {1}, {1}})) == 2);
}

TEST_CASE("validity matches closures staying below their root (n <= 3, all assignments)") {
  int graphs = 0;
  for (int n = 1; n <= 3; ++n) {
    for_each_assignment(n, [&](const HLGraph& g) {
      bool below = true;
      for (int i = 1; i <= n; ++i) {
        // no member above i, and no path from i back to itself
        for (int m : leader_closure(g, i).members) {
          below = below && (m < i || m == i);
          for (int l : g.leaders(m)) below = below && l != i;
        }
      }
      // Closures alone cannot see an empty leader set, so compare on the
      // graphs where every follower has one.
      bool nonempty = true;
      for (int i = 2; i <= n; ++i) nonempty = nonempty && g.leader_count(i) > 0;
      if (nonempty) CHECK(validate(g).ok() == below);
      if (validate(g).ok()) CHECK(below);
      ++graphs;
    });
  }
  CHECK(graphs == 2 + 16 + 512);
}

TEST_CASE("agent 1 reaches every agent and depth grows with edges (all valid graphs, n <= 5)") {
  int graphs = 0;
  for (int n = 1; n <= 5; ++n) {
    for_each_valid(n, [&](const HLGraph& g) {
      REQUIRE(validate(g).ok());
      const int gamma = depth(g);
      for (int i = 1; i <= n; ++i) {
        const auto c = leader_closure(g, i);
        CHECK(c.contains(1));
        CHECK(c.contains(i));
        CHECK(c.size() <= gamma);
      }
      for (int i = 2; i <= n; ++i) {
        for (int j = 1; j < i; ++j) {
          const auto li = g.leaders(i);
          if (std::find(li.begin(), li.end(), j) != li.end()) continue;
          const HLGraph bigger = g.with_edge(i, j);
          REQUIRE(validate(bigger).ok());
          CHECK(depth(bigger) >= gamma);
        }
      }
      ++graphs;
    });
  }
  // 1 * 1 * 1 * 3 * 7 * 15 summed over n
  CHECK(graphs == 1 + 1 + 3 + 21 + 315);
}
