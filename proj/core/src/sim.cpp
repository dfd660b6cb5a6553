#include "sbg/sim.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sbg/error.hpp"

namespace sbg {

namespace {

void observe(SemanticBelief& belief, std::span<const double> row) {
  try {
    belief = bayes_update(belief, row);
  } catch (const ContradictionError&) {
    // The prior ruled out what was seen; restart from the observation alone.
    belief = bayes_update(SemanticBelief(std::vector<double>(row.size(), 1.0 / row.size())), row);
  }
}

std::optional<NodeId> associate(const Sbg& sbg, NodeId base, const SemanticBelief& posterior) {
  const auto target = argmax_class(posterior).index;
  for (const auto& o : sbg.ig_transitions(base)) {
    if (sbg.node(o.node).outcome_class == target) return o.node;
  }
  return std::nullopt;
}

NodeId most_probable_outcome(const Sbg& sbg, NodeId base, const SemanticBelief& posterior) {
  const auto outcomes = sbg.ig_transitions(base);
  if (outcomes.empty()) throw ContractViolation("IG at node " + sbg.node(base).name + " has no outcomes");
  NodeId best = outcomes.front().node;
  for (const auto& o : outcomes) {
    if (posterior[sbg.node(o.node).outcome_class] > posterior[sbg.node(best).outcome_class]) best = o.node;
  }
  return best;
}

}  // namespace

TrialResult run_trial(const TrialContext& ctx, std::uint64_t seed) {
  if (!ctx.sbg || !ctx.plan || !ctx.cost || !ctx.observation || !ctx.truth)
    throw std::invalid_argument("run_trial: incomplete context");
  const Sbg& base_graph = *ctx.sbg;
  if (!base_graph.contains(ctx.start) || !base_graph.contains(ctx.goal))
    throw std::invalid_argument("run_trial: start or goal does not exist");
  if (ctx.truth->terrain.size() != base_graph.base_count())
    throw std::invalid_argument("run_trial: ground truth does not cover the roadmap");
  const int cap = ctx.step_cap > 0 ? ctx.step_cap : static_cast<int>(50 * base_graph.node_count());

  Rng rng(seed);
  TrialResult result;
  result.seed = seed;
  result.policy = ctx.kind;

  const std::size_t classes = base_graph.classes().size();
  std::vector<SemanticBelief> runtime;
  runtime.reserve(base_graph.base_count());
  for (std::size_t v = 0; v < base_graph.base_count(); ++v)
    runtime.push_back(base_graph.node(NodeId{v}).belief.semantic);

  const Sbg* graph = &base_graph;
  const Policy* policy = &ctx.plan->policy;
  std::optional<Sbg> replanned_graph;
  std::optional<PlanResult> replanned;

  const std::size_t goal_vertex = base_graph.node(ctx.goal).vertex;
  NodeId current = ctx.start;
  for (int step = 0;; ++step) {
    const SbgNode& here = graph->node(current);
    if (here.vertex == goal_vertex) {
      result.reached_goal = true;
      break;
    }
    if (step >= cap) break;

    const auto& action = policy->action(current);
    if (!action) throw ContractViolation("policy has no action at node " + here.name);
    const ClassIndex true_here = ctx.truth->at(here.vertex);

    if (action->is_navigate()) {
      const SbgNode& there = graph->node(action->to);
      const double distance = (there.belief.geometric.mean() - here.belief.geometric.mean()).norm();
      const ClassIndex seen =
          sample_observation(*ctx.observation, ctx.truth->at(there.vertex), distance, classes, rng);
      observe(runtime[there.vertex], likelihood_row(*ctx.observation, seen, distance, classes));

      const double charged = true_nav_cost(*ctx.cost, true_here, action->controller, action->length);
      result.actions.push_back({current, *action, charged, true_here});
      result.traversal_time += charged;
      ++result.controller_total;
      if (action->controller == true_here) {
        ++result.controller_correct;
        result.breakdown.matched_nav += charged;
      } else {
        result.breakdown.mismatched_nav += charged;
      }
      current = action->to;
      continue;
    }

    const double charged = ig_action_cost(*ctx.cost, here);
    result.actions.push_back({current, *action, charged, true_here});
    result.traversal_time += charged;
    result.breakdown.ig += charged;
    ++result.ig_count;

    const ClassIndex seen = sample_ig_observation(*ctx.observation, true_here, classes, rng);
    auto& posterior = runtime[here.vertex];
    observe(posterior, ig_likelihood_row(*ctx.observation, seen, classes));

    auto next = associate(*graph, current, posterior);
    if (!next) {
      Sbg local = *graph;
      local.set_semantic_belief(current, posterior);
      local.expand_ig_outcomes(current, ctx.expansion);
      replanned_graph = std::move(local);
      replanned = plan(ctx.kind, *replanned_graph, *ctx.cost, ctx.goal, ctx.planner);
      graph = &*replanned_graph;
      policy = &replanned->policy;
      ++result.replans;
      next = associate(*graph, current, posterior);
      if (!next) next = most_probable_outcome(*graph, current, posterior);
    }
    current = *next;
  }
  return result;
}

RunSummary summarize(PlannerKind kind, std::span<const TrialResult> trials,
                     std::optional<double> static_accuracy_pct) {
  if (trials.empty()) throw std::invalid_argument("summarize: no trials");
  std::vector<const TrialResult*> sorted;
  for (const auto& t : trials) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->seed < b->seed; });

  RunSummary s;
  s.policy = kind;
  s.trials = static_cast<int>(sorted.size());
  s.static_accuracy_pct = static_accuracy_pct;
  s.min_time = std::numeric_limits<double>::infinity();
  s.max_time = -std::numeric_limits<double>::infinity();
  long correct = 0, total = 0;
  double time = 0.0, ig = 0.0, reached = 0.0, replans = 0.0;
  for (const auto* t : sorted) {
    time += t->traversal_time;
    s.min_time = std::min(s.min_time, t->traversal_time);
    s.max_time = std::max(s.max_time, t->traversal_time);
    correct += t->controller_correct;
    total += t->controller_total;
    ig += t->ig_count;
    reached += t->reached_goal ? 1.0 : 0.0;
    replans += t->replans;
    s.mean_breakdown.matched_nav += t->breakdown.matched_nav;
    s.mean_breakdown.mismatched_nav += t->breakdown.mismatched_nav;
    s.mean_breakdown.ig += t->breakdown.ig;
  }
  const double n = static_cast<double>(sorted.size());
  s.mean_time = time / n;
  s.mean_ig_count = ig / n;
  s.goal_rate = reached / n;
  s.mean_replans = replans / n;
  s.mean_breakdown.matched_nav /= n;
  s.mean_breakdown.mismatched_nav /= n;
  s.mean_breakdown.ig /= n;
  if (total > 0) s.pooled_correct_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  return s;
}

std::optional<double> controller_accuracy(const Sbg& sbg, const Policy& policy,
                                          const GroundTruth& truth) {
  if (policy.size() != sbg.node_count())
    throw std::invalid_argument("controller_accuracy: policy does not match graph");
  int correct = 0, total = 0;
  for (const auto& node : sbg.nodes()) {
    const ClassIndex actual = truth.at(node.vertex);
    // Outcome nodes for classes the terrain does not have are never visited.
    if (node.kind == NodeKind::ig_outcome && node.outcome_class != actual) continue;
    const auto& action = policy.action(node.id);
    if (!action || !action->is_navigate()) continue;
    ++total;
    if (action->controller == actual) ++correct;
  }
  if (total == 0) return std::nullopt;
  return 100.0 * correct / total;
}

Experiment run_experiment(const Scenario& scenario, std::span<const PlannerKind> policies, int trials,
                          std::uint64_t base_seed, unsigned jobs) {
  if (trials < 1) throw std::invalid_argument("run_experiment: trials must be at least 1");
  Experiment experiment{build_scenario_graph(scenario), {}};
  const Sbg& sbg = experiment.sbg;
  const auto options = planner_options(scenario, jobs);
  const NodeId start = sbg.base_node(scenario.start_vertex());
  const NodeId goal = sbg.base_node(scenario.goal_vertex());

  IgExpansionOptions expansion;
  expansion.top_k = scenario.planner.top_k;
  expansion.resolved_confidence = scenario.planner.resolved_confidence;
  expansion.probability = scenario.planner.outcome_probability;

  for (auto kind : policies) {
    PolicyRun run;
    run.kind = kind;
    run.plan = plan(kind, sbg, scenario.cost, goal, options);

    TrialContext ctx;
    ctx.sbg = &sbg;
    ctx.plan = &run.plan;
    ctx.kind = kind;
    ctx.cost = &scenario.cost;
    ctx.observation = &scenario.observation;
    ctx.truth = &scenario.truth;
    ctx.start = start;
    ctx.goal = goal;
    ctx.expansion = expansion;
    ctx.planner = planner_options(scenario, 1);

    run.trials.resize(static_cast<std::size_t>(trials));
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(trials)));
    if (workers == 1) {
      for (int i = 0; i < trials; ++i) run.trials[i] = run_trial(ctx, base_seed + static_cast<std::uint64_t>(i));
    } else {
      std::atomic<int> next{0};
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (int i = next++; i < trials; i = next++)
              run.trials[i] = run_trial(ctx, base_seed + static_cast<std::uint64_t>(i));
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    run.summary = summarize(kind, run.trials, controller_accuracy(sbg, run.plan.policy, scenario.truth));
    experiment.runs.push_back(std::move(run));
  }
  return experiment;
}

}  // namespace sbg
