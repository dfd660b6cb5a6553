#include <benchmark/benchmark.h>

#include "sbg/observation.hpp"
#include "sbg/planner.hpp"
#include "sbg/scenario.hpp"
#include "sbg/sim.hpp"

namespace {

const sbg::Scenario& urban() {
  static const sbg::Scenario s = sbg::load_scenario(std::string(SBG_DATA_DIR) + "/urban_callout.json");
  return s;
}

void BM_ValueIterationUrban(benchmark::State& state) {
  const auto& s = urban();
  const sbg::Sbg g = sbg::build_scenario_graph(s);
  const sbg::NodeId goal = g.base_node(s.goal_vertex());
  auto options = sbg::planner_options(s, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sbg::value_iteration(g, s.cost, goal, options));
  state.counters["nodes"] = static_cast<double>(g.node_count());
}
BENCHMARK(BM_ValueIterationUrban)->Arg(1)->Arg(4);

void BM_BuildUrbanGraph(benchmark::State& state) {
  const auto& s = urban();
  for (auto _ : state) benchmark::DoNotOptimize(sbg::build_scenario_graph(s));
}
BENCHMARK(BM_BuildUrbanGraph);

void BM_RunTrialUrban(benchmark::State& state) {
  const auto& s = urban();
  const sbg::Sbg g = sbg::build_scenario_graph(s);
  const sbg::NodeId goal = g.base_node(s.goal_vertex());
  const auto plan = sbg::value_iteration(g, s.cost, goal, sbg::planner_options(s));
  sbg::TrialContext ctx{.sbg = &g, .plan = &plan, .kind = sbg::PlannerKind::sbg, .cost = &s.cost,
                        .observation = &s.observation, .truth = &s.truth,
                        .start = g.base_node(s.start_vertex()), .goal = goal,
                        .expansion = {s.planner.top_k, s.planner.resolved_confidence, s.planner.outcome_probability},
                        .planner = sbg::planner_options(s)};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sbg::run_trial(ctx, seed++));
}
BENCHMARK(BM_RunTrialUrban);

void BM_BayesUpdate(benchmark::State& state) {
  const sbg::ClassSet classes({"flat_ground", "stair", "rubble"});
  sbg::SemanticBelief b = sbg::uniform_prior(classes);
  const auto row = sbg::likelihood_row(0.8, 1, classes.size());
  for (auto _ : state) {
    b = sbg::bayes_update(sbg::uniform_prior(classes), row);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_BayesUpdate);

}  // namespace

BENCHMARK_MAIN();
