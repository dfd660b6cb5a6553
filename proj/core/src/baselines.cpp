#include <stdexcept>

#include "sbg/planner.hpp"
#include "ssp.hpp"

namespace sbg {

namespace {

// Navigate edges that use `controller`, charged as if the terrain matched it.
std::vector<detail::Candidate> matched_candidates(const Sbg& sbg, const CostModel& cost, NodeId node,
                                                  ClassIndex controller) {
  std::vector<detail::Candidate> out;
  for (std::size_t e : sbg.action_edges(node)) {
    const auto& edge = sbg.edge(e);
    if (!edge.is_navigate() || edge.controller != controller) continue;
    out.push_back({e, true_nav_cost(cost, controller, controller, edge.length), edge.to, {}});
  }
  return out;
}

ClassIndex assumed_class(const Sbg& sbg, const CostModel& cost, const SemanticBelief& belief) {
  const auto best = argmax_class(belief);
  if (sbg.classes().is_unknown(best.index)) return cost.most_expensive_class();
  return best.index;
}

}  // namespace

PlanResult conservative_policy(const Sbg& sbg, const CostModel& cost, NodeId goal,
                               const PlannerOptions& options) {
  if (!sbg.contains(goal)) throw std::invalid_argument("conservative_policy: goal does not exist");
  detail::CandidateTable table(sbg.node_count());
  for (const auto& node : sbg.nodes()) {
    if (node.id == goal) continue;
    const auto& belief = node.belief.semantic;
    auto& candidates = table[node.id.value];
    if (is_confident(belief, options.confidence)) {
      candidates = matched_candidates(sbg, cost, node.id, argmax_named_class(belief).index);
      continue;
    }
    if (node.kind == NodeKind::base && !sbg.ig_transitions(node.id).empty()) {
      for (std::size_t e : sbg.action_edges(node.id)) {
        if (sbg.edge(e).is_navigate()) continue;
        candidates.push_back({e, ig_action_cost(cost, node), node.id, sbg.ig_transitions(node.id)});
      }
      continue;
    }
    // No scan left to take: fall back to the cheapest controller in expectation.
    for (auto& c : detail::sbg_candidates(sbg, cost, node.id)) {
      if (sbg.edge(c.edge).is_navigate()) candidates.push_back(c);
    }
  }
  return detail::solve_ssp(sbg, table, goal, options);
}

PlanResult optimistic_policy(const Sbg& sbg, const CostModel& cost, NodeId goal,
                             const PlannerOptions& options) {
  if (!sbg.contains(goal)) throw std::invalid_argument("optimistic_policy: goal does not exist");
  detail::CandidateTable table(sbg.node_count());
  for (const auto& node : sbg.nodes()) {
    if (node.id == goal) continue;
    table[node.id.value] =
        matched_candidates(sbg, cost, node.id, assumed_class(sbg, cost, node.belief.semantic));
  }
  return detail::solve_ssp(sbg, table, goal, options);
}

}  // namespace sbg
