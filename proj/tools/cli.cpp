#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "sbg/dot_export.hpp"
#include "sbg/error.hpp"
#include "sbg/planner.hpp"
#include "sbg/scenario.hpp"
#include "sbg/sim.hpp"

namespace sbg::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string scenario;
  std::string policies = "all";
  std::string policy = "sbg";
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool dot = false;
  std::optional<double> tol;
  unsigned jobs = 1;
  int verbosity = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario resolve_scenario(const RunConfig& config) {
  if (config.scenario.empty()) throw UsageError("no scenario given (positional name or --scenario)");
  fs::path path(config.scenario);
  if (!fs::exists(path)) {
    const fs::path bundled = fs::path(SBG_DATA_DIR) / (config.scenario + ".json");
    if (fs::exists(bundled)) path = bundled;
  }
  Scenario scenario = load_scenario(path);
  if (config.tol) {
    if (!(*config.tol > 0.0)) throw UsageError("--tol must be positive");
    scenario.planner.tol = *config.tol;
  }
  return scenario;
}

std::vector<PlannerKind> parse_policies(const std::string& text) {
  if (text == "all") return {PlannerKind::sbg, PlannerKind::conservative, PlannerKind::optimistic};
  std::vector<PlannerKind> kinds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto kind = parse_planner_kind(item);
    if (!kind) throw UsageError("unknown policy '" + item + "' (expected sbg, conservative, optimistic or all)");
    if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) kinds.push_back(*kind);
  }
  if (kinds.empty()) throw UsageError("--policies is empty");
  return kinds;
}

PlannerKind parse_policy(const std::string& text) {
  auto kind = parse_planner_kind(text);
  if (!kind) throw UsageError("unknown policy '" + text + "'");
  return *kind;
}

fs::path prepare_out(const RunConfig& config) {
  fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  file << content;
  if (!file) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string pct(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; }

std::string node_kind(const SbgNode& node) { return node.kind == NodeKind::base ? "base" : "ig_outcome"; }

std::string values_csv(const Sbg& sbg, const PlanResult& plan) {
  std::string csv = "node,name,kind,vertex,value_s,reachable\n";
  for (const auto& node : sbg.nodes()) {
    const bool reachable = plan.values.is_reachable(node.id);
    csv += fmt::format("{},{},{},{},{},{}\n", node.id.value, node.name, node_kind(node), node.vertex,
                       reachable ? fmt::format("{:.6f}", plan.values.at(node.id)) : "",
                       reachable ? 1 : 0);
  }
  return csv;
}

std::string policy_csv(const Sbg& sbg, const PlanResult& plan) {
  std::string csv = "node,name,action,target,controller,length_m\n";
  for (const auto& node : sbg.nodes()) {
    const auto& action = plan.policy.action(node.id);
    if (!action) {
      csv += fmt::format("{},{},{},,,\n", node.id.value, node.name, node.id == plan.goal ? "goal" : "none");
    } else if (action->is_navigate()) {
      csv += fmt::format("{},{},navigate,{},{},{:.6f}\n", node.id.value, node.name,
                         sbg.node(action->to).name, sbg.classes().name(action->controller), action->length);
    } else {
      csv += fmt::format("{},{},info_gather,{},,\n", node.id.value, node.name, node.name);
    }
  }
  return csv;
}

std::string trials_csv(const Experiment& experiment) {
  std::string csv = "seed,policy,traversal_time_s,controller_correct,controller_total,ig_count,reached_goal\n";
  for (const auto& run : experiment.runs) {
    auto trials = run.trials;
    std::sort(trials.begin(), trials.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
    for (const auto& t : trials) {
      csv += fmt::format("{},{},{:.6f},{},{},{},{}\n", t.seed, to_string(run.kind), t.traversal_time,
                         t.controller_correct, t.controller_total, t.ig_count, t.reached_goal ? 1 : 0);
    }
  }
  return csv;
}

std::string actions_csv(const Experiment& experiment) {
  std::string csv = "seed,policy,step,node,action,target,controller,true_class,charged_s\n";
  for (const auto& run : experiment.runs) {
    for (const auto& t : run.trials) {
      for (std::size_t i = 0; i < t.actions.size(); ++i) {
        const auto& a = t.actions[i];
        const auto& classes = experiment.sbg.classes();
        csv += fmt::format("{},{},{},{},{},{},{},{},{:.6f}\n", t.seed, to_string(run.kind), i, a.node.value,
                           a.edge.is_navigate() ? "navigate" : "info_gather", a.edge.to.value,
                           a.edge.is_navigate() ? classes.name(a.edge.controller) : "",
                           classes.name(a.true_class), a.charged);
      }
    }
  }
  return csv;
}

std::string summary_csv(const Experiment& experiment, const Scenario& scenario) {
  std::string csv =
      "policy,trials,mean_time_s,min_time_s,max_time_s,correct_controller_pct,"
      "static_controller_accuracy_pct,mean_ig_count,goal_rate,time_matched_nav_s,"
      "time_mismatched_nav_s,time_ig_s,planned_cost_s\n";
  const NodeId start = experiment.sbg.base_node(scenario.start_vertex());
  for (const auto& run : experiment.runs) {
    const auto& s = run.summary;
    const bool reachable = run.plan.values.is_reachable(start);
    csv += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{},{},{:.4f},{:.4f},{:.6f},{:.6f},{:.6f},{}\n",
                       to_string(run.kind), s.trials, s.mean_time, s.min_time, s.max_time,
                       pct(s.pooled_correct_pct), pct(s.static_accuracy_pct), s.mean_ig_count, s.goal_rate,
                       s.mean_breakdown.matched_nav, s.mean_breakdown.mismatched_nav, s.mean_breakdown.ig,
                       reachable ? fmt::format("{:.6f}", run.plan.values.at(start)) : "");
  }
  return csv;
}

void print_table(std::ostream& out, const Experiment& experiment) {
  fmt::print(out, "{:<16}{:>22}{:>20}{:>10}\n", "Planning policy", "Correct controller", "Traversal time [s]",
             "IG/run");
  for (const auto& run : experiment.runs) {
    const auto& s = run.summary;
    const auto accuracy = s.static_accuracy_pct ? fmt::format("{:.1f}%", *s.static_accuracy_pct) : "n/a";
    fmt::print(out, "{:<16}{:>22}{:>20.2f}{:>10.2f}\n", to_string(run.kind), accuracy, s.mean_time,
               s.mean_ig_count);
  }
}

int cmd_plan(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Scenario scenario = resolve_scenario(config);
  const PlannerKind kind = parse_policy(config.policy);
  const Sbg sbg = build_scenario_graph(scenario);
  const NodeId goal = sbg.base_node(scenario.goal_vertex());
  const NodeId start = sbg.base_node(scenario.start_vertex());
  const PlanResult result = plan(kind, sbg, scenario.cost, goal, planner_options(scenario, config.jobs));
  if (config.verbosity > 0)
    fmt::print(err, "{}: {} nodes, {} edges, {} sweeps, final residual {:.3g}\n", scenario.name,
               sbg.node_count(), sbg.edges().size(), result.sweeps, result.residuals.back());

  const fs::path dir = prepare_out(config);
  write_file(dir / "values.csv", values_csv(sbg, result));
  write_file(dir / "policy.csv", policy_csv(sbg, result));
  if (config.dot) write_file(dir / "graph.dot", export_dot(sbg, result.policy));

  if (!result.values.is_reachable(start)) {
    fmt::print(out, "J({}) = unreachable\n", scenario.start);
    return kDataError;
  }
  fmt::print(out, "J({}) = {:.6f} s\n", scenario.start, result.values.at(start));
  return kOk;
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err, bool simulate) {
  const Scenario scenario = resolve_scenario(config);
  if (config.trials < 1) throw UsageError("--trials must be at least 1");
  const auto kinds = simulate ? std::vector<PlannerKind>{parse_policy(config.policy)} : parse_policies(config.policies);
  const Experiment experiment = run_experiment(scenario, kinds, config.trials, config.seed, config.jobs);
  if (config.verbosity > 0) {
    for (const auto& run : experiment.runs)
      fmt::print(err, "{}: planned in {} sweeps, mean replans {:.2f}\n", to_string(run.kind), run.plan.sweeps,
                 run.summary.mean_replans);
  }
  const fs::path dir = prepare_out(config);
  write_file(dir / "trials.csv", trials_csv(experiment));
  write_file(dir / "summary.csv", summary_csv(experiment, scenario));
  if (simulate) write_file(dir / "actions.csv", actions_csv(experiment));
  if (config.dot && !experiment.runs.empty())
    write_file(dir / "graph.dot", export_dot(experiment.sbg, experiment.runs.front().plan.policy));
  print_table(out, experiment);
  return kOk;
}

int cmd_export(const RunConfig& config, std::ostream& out) {
  const Scenario scenario = resolve_scenario(config);
  const Sbg sbg = build_scenario_graph(scenario);
  const PlannerKind kind = parse_policy(config.policy);
  const PlanResult result =
      plan(kind, sbg, scenario.cost, sbg.base_node(scenario.goal_vertex()), planner_options(scenario, config.jobs));
  const fs::path dir = prepare_out(config);
  write_file(dir / "graph.dot", export_dot(sbg, result.policy));
  write_file(dir / "scenario.json", serialize_scenario(scenario));
  fmt::print(out, "wrote {} and {}\n", (dir / "graph.dot").string(), (dir / "scenario.json").string());
  return kOk;
}

int cmd_generate(const UrbanCourseParams& params, const std::string& file, std::ostream& out) {
  const Scenario scenario = generate_urban_course(params);
  const std::string text = serialize_scenario(scenario);
  if (file.empty() || file == "-") {
    out << text;
  } else {
    fs::path path(file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file(path, text);
  }
  return kOk;
}

void add_common(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("scenario,--scenario", config.scenario, "Scenario file or bundled scenario name");
  cmd->add_option("--out", config.out, "Output directory")->capture_default_str();
  cmd->add_option("--tol", config.tol, "Value-iteration tolerance in seconds");
  cmd->add_option("--jobs", config.jobs, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
  cmd->add_flag("-v,--verbose", config.verbosity, "Verbose diagnostics on stderr");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic belief graph planner and simulator", "sbg"};
  app.require_subcommand(1, 1);
  RunConfig config;
  UrbanCourseParams gen;
  std::string gen_out;

  auto* plan_cmd = app.add_subcommand("plan", "Plan offline and write values.csv and policy.csv");
  add_common(plan_cmd, config);
  plan_cmd->add_option("--policy", config.policy, "sbg, conservative or optimistic")->capture_default_str();
  plan_cmd->add_flag("--dot", config.dot, "Also write graph.dot");

  auto* compare_cmd = app.add_subcommand("compare", "Run seeded trials for several policies");
  add_common(compare_cmd, config);
  compare_cmd->add_option("--policies", config.policies, "Comma-separated list or 'all'")->capture_default_str();
  compare_cmd->add_option("--trials", config.trials, "Trials per policy")->capture_default_str();
  compare_cmd->add_option("--seed", config.seed, "Base seed")->capture_default_str();
  compare_cmd->add_flag("--dot", config.dot, "Also write graph.dot for the first policy");

  auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded trials for one policy with an action log");
  add_common(simulate_cmd, config);
  simulate_cmd->add_option("--policy", config.policy, "sbg, conservative or optimistic")->capture_default_str();
  simulate_cmd->add_option("--trials", config.trials, "Trials")->capture_default_str();
  simulate_cmd->add_option("--seed", config.seed, "Base seed")->capture_default_str();
  simulate_cmd->add_flag("--dot", config.dot, "Also write graph.dot");

  auto* export_cmd = app.add_subcommand("export", "Write graph.dot and the canonical scenario.json");
  add_common(export_cmd, config);
  export_cmd->add_option("--policy", config.policy, "Policy to highlight")->capture_default_str();

  auto* generate_cmd = app.add_subcommand("generate", "Generate a procedural urban course scenario");
  generate_cmd->add_option("--segments", gen.segments, "Main-route segments")->capture_default_str();
  generate_cmd->add_option("--length", gen.total_length, "Main-route length in meters")->capture_default_str();
  generate_cmd->add_option("--stair-fraction", gen.stair_fraction)->capture_default_str();
  generate_cmd->add_option("--rubble-fraction", gen.rubble_fraction)->capture_default_str();
  generate_cmd->add_option("--seed", gen.seed)->capture_default_str();
  generate_cmd->add_option("--out", gen_out, "Output file ('-' for stdout)");
  generate_cmd->add_option("--jobs", config.jobs, "Accepted for uniformity; generation is sequential");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(config, out, err);
    if (compare_cmd->parsed()) return cmd_compare(config, out, err, false);
    if (simulate_cmd->parsed()) return cmd_compare(config, out, err, true);
    if (export_cmd->parsed()) return cmd_export(config, out);
    if (generate_cmd->parsed()) return cmd_generate(gen, gen_out, out);
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const NonConvergenceError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kNonConvergence;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  }
  return kUsage;
}

}  // namespace sbg::cli
