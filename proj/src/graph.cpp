#include "hlflock/graph.hpp"

#include <algorithm>
#include <sstream>

#include "hlflock/error.hpp"

namespace hlflock {

HLGraph::HLGraph(int n_agents, std::vector<std::vector<int>> leaders,
                 std::vector<std::vector<double>> weights)
    : n_(n_agents), leaders_(std::move(leaders)), weights_(std::move(weights)) {
  if (n_ < 1) throw Error(ErrorCode::InvalidGraph, "n_agents must be >= 1");
  leaders_.resize(static_cast<size_t>(n_));
  custom_weights_ = !weights_.empty();
  weights_.resize(static_cast<size_t>(n_));
  for (size_t i = 0; i < leaders_.size(); ++i) {
    if (!custom_weights_ || weights_[i].empty()) weights_[i].assign(leaders_[i].size(), 1.0);
  }
}

HLGraph HLGraph::chain(int n_agents) {
  std::vector<std::vector<int>> leaders(static_cast<size_t>(std::max(n_agents, 0)));
  for (int i = 2; i <= n_agents; ++i) leaders[static_cast<size_t>(i - 1)] = {i - 1};
  return HLGraph(n_agents, std::move(leaders));
}

HLGraph HLGraph::with_edge(int agent, int leader) const {
  HLGraph out = *this;
  out.leaders_.at(agent - 1).push_back(leader);
  out.weights_.at(agent - 1).push_back(1.0);
  return out;
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::EdgeNotBelow:
      os << "EdgeNotBelow(" << agent << "," << leader << ")";
      break;
    case Kind::EmptyLeaderSet:
      os << "EmptyLeaderSet(" << agent << ")";
      break;
    case Kind::DuplicateLeader:
      os << "DuplicateLeader(" << agent << "," << leader << ")";
      break;
    case Kind::LeaderOutOfRange:
      os << "LeaderOutOfRange(" << agent << "," << leader << ")";
      break;
    case Kind::NonPositiveWeight:
      os << "NonPositiveWeight(" << agent << "," << leader << ")";
      break;
    case Kind::BadShape:
      os << "BadShape(" << agent << ")";
      break;
  }
  return os.str();
}

std::string ValidationResult::describe() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.describe();
  }
  return out;
}

ValidationResult validate(const HLGraph& graph) {
  using K = Violation::Kind;
  ValidationResult result;
  const int n = graph.size();
  for (int i = 1; i <= n; ++i) {
    auto ls = graph.leaders(i);
    auto ws = graph.weights(i);
    if (ws.size() != ls.size()) result.violations.push_back({K::BadShape, i, 0});
    if (i > 1 && ls.empty()) result.violations.push_back({K::EmptyLeaderSet, i, 0});
    for (size_t k = 0; k < ls.size(); ++k) {
      const int j = ls[k];
      if (j < 1 || j > n) {
        result.violations.push_back({K::LeaderOutOfRange, i, j});
      } else if (j >= i) {
        result.violations.push_back({K::EdgeNotBelow, i, j});
      }
      if (std::find(ls.begin(), ls.begin() + static_cast<std::ptrdiff_t>(k), j) !=
          ls.begin() + static_cast<std::ptrdiff_t>(k)) {
        result.violations.push_back({K::DuplicateLeader, i, j});
      }
      if (k < ws.size() && !(ws[k] > 0.0)) result.violations.push_back({K::NonPositiveWeight, i, j});
    }
  }
  return result;
}

void require_valid(const HLGraph& graph) {
  auto result = validate(graph);
  if (!result.ok()) throw Error(ErrorCode::InvalidGraph, result.describe());
}

bool LeaderClosure::contains(int agent) const {
  return std::find(members.begin(), members.end(), agent) != members.end();
}

LeaderClosure leader_closure(const HLGraph& graph, int agent) {
  if (agent < 1 || agent > graph.size()) {
    throw Error(ErrorCode::InvalidArgument, "agent index out of range: " + std::to_string(agent));
  }
  LeaderClosure closure;
  closure.root = agent;
  std::vector<char> seen(static_cast<size_t>(graph.size()) + 1, 0);
  closure.levels.push_back({agent});
  closure.members.push_back(agent);
  seen[static_cast<size_t>(agent)] = 1;

  // Fixpoint: stop once a level contributes no new agent.
  while (true) {
    std::vector<int> next;
    for (int j : closure.levels.back()) {
      for (int l : graph.leaders(j)) {
        if (l < 1 || l > graph.size()) continue;
        if (std::find(next.begin(), next.end(), l) == next.end()) next.push_back(l);
      }
    }
    bool grew = false;
    for (int l : next) {
      if (!seen[static_cast<size_t>(l)]) {
        seen[static_cast<size_t>(l)] = 1;
        closure.members.push_back(l);
        grew = true;
      }
    }
    if (next.empty()) break;
    closure.levels.push_back(std::move(next));
    if (!grew) break;
  }
  return closure;
}

int depth(const HLGraph& graph) {
  int gamma = 0;
  for (int i = 1; i <= graph.size(); ++i) gamma = std::max(gamma, leader_closure(graph, i).size());
  return gamma;
}

}  // namespace hlflock
