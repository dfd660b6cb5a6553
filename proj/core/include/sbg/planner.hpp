#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sbg/cost.hpp"
#include "sbg/graph.hpp"

namespace sbg {

/// Cost-to-go per node. Nodes that cannot reach the goal keep the sentinel value
/// and are flagged unreachable.
struct ValueTable {
  std::vector<double> values;
  std::vector<bool> reachable;

  double at(NodeId id) const { return values.at(id.value); }
  bool is_reachable(NodeId id) const { return reachable.at(id.value); }
};

/// One chosen edge per node; empty at the goal and at unreachable nodes.
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::size_t node_count) : actions_(node_count) {}

  std::size_t size() const noexcept { return actions_.size(); }
  const std::optional<SbgEdge>& action(NodeId id) const { return actions_.at(id.value); }
  void set(NodeId id, const SbgEdge& edge) { actions_.at(id.value) = edge; }
  void clear(NodeId id) { actions_.at(id.value).reset(); }

  bool operator==(const Policy&) const = default;

 private:
  std::vector<std::optional<SbgEdge>> actions_;
};

struct Backup {
  double value = 0.0;
  std::optional<SbgEdge> best;  // empty when the node has no usable action
};

struct PlannerOptions {
  double tol = 1e-6;                 // seconds
  std::optional<int> max_iters;      // default 10 * node count
  unsigned jobs = 1;                 // threads per Bellman sweep
  double confidence = 0.95;          // conservative baseline threshold
};

struct PlanResult {
  NodeId goal;
  ValueTable values;
  Policy policy;
  std::vector<double> residuals;  // max |J_{k+1} - J_k| per sweep
  int sweeps = 0;
  double sentinel = 0.0;
};

enum class PlannerKind { sbg, conservative, optimistic };

std::string_view to_string(PlannerKind kind);
std::optional<PlannerKind> parse_planner_kind(std::string_view text);

/// Min over the actions of `node` of C(node, action) + E[J(successor)], with the
/// IG loop valued at ig_cost + sum_m P(outcome m) J(outcome m). Ties prefer
/// navigate edges, then the lowest successor id.
Backup bellman_backup(const Sbg& sbg, const CostModel& cost, const ValueTable& j, NodeId node);

/// Synchronous value iteration from J = 0 at the goal and a finite sentinel
/// elsewhere. Throws NonConvergenceError when max_iters is exhausted.
PlanResult value_iteration(const Sbg& sbg, const CostModel& cost, NodeId goal,
                           const PlannerOptions& options = {});

/// IG wherever the node's own terrain is not confidently classified, otherwise
/// the believed class's controller along the matched-cost shortest route.
PlanResult conservative_policy(const Sbg& sbg, const CostModel& cost, NodeId goal,
                               const PlannerOptions& options = {});

/// Treats every node as its most likely class and never gathers information.
/// An `unknown` argmax is treated as the most expensive named class.
PlanResult optimistic_policy(const Sbg& sbg, const CostModel& cost, NodeId goal,
                             const PlannerOptions& options = {});

PlanResult plan(PlannerKind kind, const Sbg& sbg, const CostModel& cost, NodeId goal,
                const PlannerOptions& options = {});

/// Expected cost-to-go of a fixed policy under the SBG cost model (expected edge
/// costs and IG outcome distributions). Nodes whose policy does not reach the
/// goal are flagged unreachable.
ValueTable evaluate_policy(const Sbg& sbg, const CostModel& cost, const Policy& policy, NodeId goal,
                           double tol = 1e-9);

/// max over reachable non-goal nodes of |J(i) - min_a Q(i, a)| under the SBG model.
double bellman_residual(const Sbg& sbg, const CostModel& cost, const ValueTable& j, NodeId goal);

/// True iff, following the policy, the goal is reachable from every node that has
/// an action (with every IG outcome followed).
bool is_proper(const Sbg& sbg, const Policy& policy, NodeId goal);

}  // namespace sbg
