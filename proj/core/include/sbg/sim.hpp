#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sbg/cost.hpp"
#include "sbg/graph.hpp"
#include "sbg/ground_truth.hpp"
#include "sbg/observation.hpp"
#include "sbg/planner.hpp"
#include "sbg/scenario.hpp"

namespace sbg {

struct TrialAction {
  NodeId node;
  SbgEdge edge;
  double charged = 0.0;  // seconds
  ClassIndex true_class = 0;
};

struct TimeBreakdown {
  double matched_nav = 0.0;
  double mismatched_nav = 0.0;
  double ig = 0.0;

  double total() const noexcept { return matched_nav + mismatched_nav + ig; }
};

struct TrialResult {
  std::uint64_t seed = 0;
  PlannerKind policy = PlannerKind::sbg;
  double traversal_time = 0.0;  // seconds
  std::vector<TrialAction> actions;
  int controller_correct = 0;
  int controller_total = 0;
  int ig_count = 0;
  int replans = 0;  // IG results that fell outside the planned outcomes
  bool reached_goal = false;
  TimeBreakdown breakdown;
};

/// Everything a trial reads. The graph, plan, models and truth are shared
/// read-only; a trial copies the graph only when it has to replan.
struct TrialContext {
  const Sbg* sbg = nullptr;
  const PlanResult* plan = nullptr;
  PlannerKind kind = PlannerKind::sbg;
  const CostModel* cost = nullptr;
  const ObservationModel* observation = nullptr;
  const GroundTruth* truth = nullptr;
  NodeId start;
  NodeId goal;
  IgExpansionOptions expansion;
  PlannerOptions planner;
  int step_cap = 0;  // 0 selects 50 * node count
};

/// Executes the plan against ground truth with noisy observations. Navigation is
/// charged at the true terrain of the vertex being left; after an IG scan the
/// robot moves to the outcome node of the posterior's most likely class, and
/// re-expands and replans when that class was not among the planned outcomes.
/// Throws ContractViolation if the policy has no action at a visited node.
TrialResult run_trial(const TrialContext& context, std::uint64_t seed);

struct RunSummary {
  PlannerKind policy = PlannerKind::sbg;
  int trials = 0;
  double mean_time = 0.0;
  double min_time = 0.0;
  double max_time = 0.0;
  std::optional<double> pooled_correct_pct;
  std::optional<double> static_accuracy_pct;
  double mean_ig_count = 0.0;
  double goal_rate = 0.0;
  double mean_replans = 0.0;
  TimeBreakdown mean_breakdown;
};

/// Aggregates trials after sorting them by seed, so the result does not depend
/// on the order they were run in.
RunSummary summarize(PlannerKind kind, std::span<const TrialResult> trials,
                     std::optional<double> static_accuracy_pct);

/// Share of navigate actions in the policy whose controller matches the true
/// terrain, over base nodes and the outcome nodes consistent with ground truth.
/// Empty when the policy has no navigate actions.
std::optional<double> controller_accuracy(const Sbg& sbg, const Policy& policy,
                                          const GroundTruth& truth);

struct PolicyRun {
  PlannerKind kind = PlannerKind::sbg;
  PlanResult plan;
  std::vector<TrialResult> trials;
  RunSummary summary;
};

struct Experiment {
  Sbg sbg;
  std::vector<PolicyRun> runs;
};

/// Runs `trials` seeded trials (seeds base_seed..base_seed+trials-1, shared by
/// all policies) per policy, on up to `jobs` threads.
Experiment run_experiment(const Scenario& scenario, std::span<const PlannerKind> policies, int trials,
                          std::uint64_t base_seed, unsigned jobs = 1);

}  // namespace sbg
