#pragma once

#include <span>
#include <vector>

#include "sbg/graph.hpp"
#include "sbg/planner.hpp"

namespace sbg::detail {

/// An action available to the solver: its edge, immediate cost, and successor(s).
struct Candidate {
  std::size_t edge = 0;
  double immediate = 0.0;
  NodeId target;
  std::span<const IgOutcome> outcomes;  // non-empty for IG loops

  double q(std::span<const double> j) const {
    if (outcomes.empty()) return immediate + j[target.value];
    double expected = 0.0;
    for (const auto& o : outcomes) expected += o.probability * j[o.node.value];
    return immediate + expected;
  }
};

using CandidateTable = std::vector<std::vector<Candidate>>;

/// Candidates in the order the tie-break expects: navigate edges by
/// (target, controller), then the IG loop.
std::vector<Candidate> sbg_candidates(const Sbg& sbg, const CostModel& cost, NodeId node);

PlanResult solve_ssp(const Sbg& sbg, const CandidateTable& table, NodeId goal,
                     const PlannerOptions& options);

}  // namespace sbg::detail
