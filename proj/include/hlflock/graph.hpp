#pragma once

#include <span>
#include <string>
#include <vector>

namespace hlflock {

// Hierarchical-leadership structure. Agents are numbered 1..n everywhere in
// this API (leader sets hold 1-based ids); agent 1 is the ultimate leader.
// The graph is immutable once built.
class HLGraph {
 public:
  HLGraph() = default;

  // leaders[i-1] is L(i). weights, when non-empty, parallels leaders and
  // multiplies the interaction kernel on each edge.
  HLGraph(int n_agents, std::vector<std::vector<int>> leaders,
          std::vector<std::vector<double>> weights = {});

  // Chain 1 <- 2 <- ... <- n.
  static HLGraph chain(int n_agents);

  int size() const noexcept { return n_; }
  std::span<const int> leaders(int agent) const { return leaders_.at(agent - 1); }
  std::span<const double> weights(int agent) const { return weights_.at(agent - 1); }
  int leader_count(int agent) const { return static_cast<int>(leaders(agent).size()); }
  bool has_custom_weights() const noexcept { return custom_weights_; }

  // Copy with one extra edge leader -> agent (unit weight); not validated.
  HLGraph with_edge(int agent, int leader) const;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> leaders_;
  std::vector<std::vector<double>> weights_;
  bool custom_weights_ = false;
};

struct Violation {
  enum class Kind { EdgeNotBelow, EmptyLeaderSet, DuplicateLeader, LeaderOutOfRange, NonPositiveWeight, BadShape };
  Kind kind;
  int agent = 0;   // 1-based
  int leader = 0;  // 1-based, 0 when not applicable

  std::string describe() const;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string describe() const;
};

ValidationResult validate(const HLGraph& graph);

// Throws Error(InvalidGraph) listing every violation.
void require_valid(const HLGraph& graph);

struct LeaderClosure {
  int root = 0;
  std::vector<std::vector<int>> levels;  // levels[m] = L^m(root); levels[0] = {root}
  std::vector<int> members;              // [L](root) in breadth-first discovery order

  int size() const noexcept { return static_cast<int>(members.size()); }
  bool contains(int agent) const;
};

LeaderClosure leader_closure(const HLGraph& graph, int agent);

// Gamma = max_i #[L](i).
int depth(const HLGraph& graph);

}  // namespace hlflock
