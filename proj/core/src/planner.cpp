#include "sbg/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "sbg/error.hpp"
#include "ssp.hpp"

namespace sbg {

NonConvergenceError::NonConvergenceError(double residual, int sweeps)
    : std::runtime_error("value iteration did not converge after " + std::to_string(sweeps) +
                         " sweeps (residual " + std::to_string(residual) + " s)"),
      residual_(residual),
      sweeps_(sweeps) {}

std::string_view to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::sbg: return "sbg";
    case PlannerKind::conservative: return "conservative";
    case PlannerKind::optimistic: return "optimistic";
  }
  return "?";
}

std::optional<PlannerKind> parse_planner_kind(std::string_view text) {
  for (auto kind : {PlannerKind::sbg, PlannerKind::conservative, PlannerKind::optimistic}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

namespace detail {

std::vector<Candidate> sbg_candidates(const Sbg& sbg, const CostModel& cost, NodeId node) {
  const auto& from = sbg.node(node);
  std::vector<Candidate> out;
  for (std::size_t e : sbg.action_edges(node)) {
    const auto& edge = sbg.edge(e);
    if (edge.is_navigate()) {
      out.push_back({e, expected_nav_cost(cost, from.belief.semantic, edge.controller, edge.length),
                     edge.to, {}});
    } else {
      auto outcomes = sbg.ig_transitions(node);
      if (outcomes.empty()) continue;  // not expanded: no successor model yet
      out.push_back({e, ig_action_cost(cost, from), node, outcomes});
    }
  }
  return out;
}

namespace {

struct SweepResult {
  double residual = 0.0;
};

double backup_value(const std::vector<Candidate>& candidates, std::span<const double> j,
                    double sentinel, const Candidate** best) {
  double value = sentinel;
  *best = nullptr;
  for (const auto& c : candidates) {
    const double q = c.q(j);
    if (q < value) {
      value = q;
      *best = &c;
    }
  }
  return value;
}

}  // namespace

PlanResult solve_ssp(const Sbg& sbg, const CandidateTable& table, NodeId goal,
                     const PlannerOptions& options) {
  if (!sbg.contains(goal)) throw std::invalid_argument("goal node does not exist");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const std::size_t n = sbg.node_count();
  const int max_iters = options.max_iters.value_or(static_cast<int>(10 * std::max<std::size_t>(n, 1)));
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");

  double sentinel = 1.0;
  for (const auto& candidates : table) {
    for (const auto& c : candidates) sentinel += c.immediate;
  }

  PlanResult result;
  result.goal = goal;
  result.sentinel = sentinel;

  std::vector<double> current(n, sentinel);
  current[goal.value] = 0.0;
  std::vector<double> next = current;

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(n)));
  auto sweep_range = [&](std::size_t lo, std::size_t hi, double& residual) {
    residual = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (i == goal.value) {
        next[i] = 0.0;
        continue;
      }
      const Candidate* best = nullptr;
      next[i] = backup_value(table[i], current, sentinel, &best);
      residual = std::max(residual, std::abs(next[i] - current[i]));
    }
  };

  bool converged = false;
  while (result.sweeps < max_iters) {
    double residual = 0.0;
    if (jobs == 1) {
      sweep_range(0, n, residual);
    } else {
      std::vector<double> partial(jobs, 0.0);
      std::vector<std::thread> workers;
      const std::size_t chunk = (n + jobs - 1) / jobs;
      for (unsigned w = 0; w < jobs; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        workers.emplace_back([&, lo, hi, w] { sweep_range(lo, hi, partial[w]); });
      }
      for (auto& t : workers) t.join();
      residual = *std::max_element(partial.begin(), partial.end());
    }
    ++result.sweeps;
    result.residuals.push_back(residual);
    current.swap(next);
    if (residual < options.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergenceError(result.residuals.back(), result.sweeps);

  result.values.values = current;
  result.values.reachable.assign(n, false);
  result.policy = Policy(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.values.reachable[i] = current[i] < sentinel;
    if (i == goal.value) continue;
    const Candidate* best = nullptr;
    backup_value(table[i], current, sentinel, &best);
    if (best != nullptr && result.values.reachable[i]) result.policy.set(NodeId{i}, sbg.edge(best->edge));
  }
  return result;
}

}  // namespace detail

Backup bellman_backup(const Sbg& sbg, const CostModel& cost, const ValueTable& j, NodeId node) {
  if (!sbg.contains(node)) throw std::invalid_argument("bellman_backup: node does not exist");
  if (j.values.size() != sbg.node_count())
    throw std::invalid_argument("bellman_backup: value table does not match graph");
  const auto candidates = detail::sbg_candidates(sbg, cost, node);
  Backup backup;
  backup.value = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double q = c.q(j.values);
    if (q < backup.value) {
      backup.value = q;
      backup.best = sbg.edge(c.edge);
    }
  }
  return backup;
}

PlanResult value_iteration(const Sbg& sbg, const CostModel& cost, NodeId goal,
                           const PlannerOptions& options) {
  if (!sbg.contains(goal)) throw std::invalid_argument("value_iteration: goal does not exist");
  detail::CandidateTable table(sbg.node_count());
  for (const auto& node : sbg.nodes()) {
    if (node.id != goal) table[node.id.value] = detail::sbg_candidates(sbg, cost, node.id);
  }
  return detail::solve_ssp(sbg, table, goal, options);
}

PlanResult plan(PlannerKind kind, const Sbg& sbg, const CostModel& cost, NodeId goal,
                const PlannerOptions& options) {
  switch (kind) {
    case PlannerKind::sbg: return value_iteration(sbg, cost, goal, options);
    case PlannerKind::conservative: return conservative_policy(sbg, cost, goal, options);
    case PlannerKind::optimistic: return optimistic_policy(sbg, cost, goal, options);
  }
  throw std::invalid_argument("unknown planner kind");
}

ValueTable evaluate_policy(const Sbg& sbg, const CostModel& cost, const Policy& policy, NodeId goal,
                           double tol) {
  if (policy.size() != sbg.node_count())
    throw std::invalid_argument("evaluate_policy: policy does not match graph");
  detail::CandidateTable table(sbg.node_count());
  for (const auto& node : sbg.nodes()) {
    if (node.id == goal || !policy.action(node.id)) continue;
    const auto& chosen = *policy.action(node.id);
    for (auto& c : detail::sbg_candidates(sbg, cost, node.id)) {
      if (sbg.edge(c.edge) == chosen) table[node.id.value].push_back(c);
    }
  }
  PlannerOptions options;
  options.tol = tol;
  options.max_iters = static_cast<int>(1000 * std::max<std::size_t>(sbg.node_count(), 1));
  return detail::solve_ssp(sbg, table, goal, options).values;
}

double bellman_residual(const Sbg& sbg, const CostModel& cost, const ValueTable& j, NodeId goal) {
  double worst = 0.0;
  for (const auto& node : sbg.nodes()) {
    if (node.id == goal || !j.is_reachable(node.id)) continue;
    const auto backup = bellman_backup(sbg, cost, j, node.id);
    worst = std::max(worst, std::abs(j.at(node.id) - backup.value));
  }
  return worst;
}

bool is_proper(const Sbg& sbg, const Policy& policy, NodeId goal) {
  if (policy.size() != sbg.node_count()) return false;
  const std::size_t n = sbg.node_count();
  std::vector<std::vector<std::size_t>> reverse(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& action = policy.action(NodeId{i});
    if (!action || i == goal.value) continue;
    std::vector<NodeId> successors;
    if (action->is_navigate()) {
      successors.push_back(action->to);
    } else {
      for (const auto& o : sbg.ig_transitions(NodeId{i})) successors.push_back(o.node);
      if (successors.empty()) return false;
    }
    for (auto s : successors) {
      if (s != goal && !policy.action(s)) return false;  // dead end
      reverse[s.value].push_back(i);
    }
  }
  // Absorption is certain iff the goal is reachable from every acting node.
  std::vector<bool> reaches(n, false);
  std::vector<std::size_t> stack{goal.value};
  reaches[goal.value] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto u : reverse[v]) {
      if (!reaches[u]) {
        reaches[u] = true;
        stack.push_back(u);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (policy.action(NodeId{i}) && !reaches[i]) return false;
  }
  return true;
}

}  // namespace sbg
