// Acceptance checks, one line per criterion. Exit status is non-zero if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "oracles.hpp"
#include "sbg/error.hpp"
#include "sbg/observation.hpp"
#include "sbg/planner.hpp"
#include "sbg/scenario.hpp"
#include "sbg/sim.hpp"

using namespace sbg;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

std::string fixture_path(const std::string& name) { return std::string(SBG_DATA_DIR) + "/" + name + ".json"; }

std::string num(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

SemanticBelief random_belief(std::mt19937_64& rng, std::size_t size, bool with_unknown) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(size);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) total += (p[i] = (i + 1 == size && !with_unknown) ? 0.0 : u(rng) + 0.02);
  for (auto& x : p) x /= total;
  return SemanticBelief(p);
}

Verdict dijkstra_equivalence() {
  Verdict v;
  std::mt19937_64 rng(1001);
  const ClassSet classes({"flat_ground", "stair", "rubble"});
  std::size_t largest = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 95)(rng);
    const Roadmap roadmap = testing::random_roadmap(rng, n, n / 2);
    GroundTruth truth;
    std::vector<std::optional<SemanticBelief>> priors;
    for (std::size_t i = 0; i < n; ++i) {
      truth.terrain.push_back(std::uniform_int_distribution<ClassIndex>(0, 2)(rng));
      priors.push_back(SemanticBelief::dirac(4, truth.terrain.back()));
    }
    const CostModel cost = testing::random_cost_model(rng, 3, std::uniform_real_distribution<double>(0.5, 10.0)(rng));
    Sbg g = build_sbg(roadmap, priors, classes, Eigen::Matrix3d::Identity() * 0.01);
    const std::size_t goal_vertex = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const NodeId goal = g.base_node(goal_vertex);
    g.expand_all({}, goal);
    largest = std::max(largest, g.node_count());
    v.require(g.node_count() <= 200, "graph exceeds 200 nodes");
    const PlanResult plan = value_iteration(g, cost, goal);
    const auto oracle = testing::dijkstra_to_goal(roadmap, truth, cost, goal_vertex);
    for (const auto& node : g.nodes()) {
      const auto& d = oracle[node.vertex];
      v.require(d.has_value() == plan.values.is_reachable(node.id), "reachability differs at " + node.name);
      if (d) {
        const double err = std::abs(plan.values.at(node.id) - *d);
        v.require(err <= 1e-6, "scenario " + std::to_string(trial) + " node " + node.name + " off by " + num(err, 9));
      }
      const auto& a = plan.policy.action(node.id);
      v.require(!a || a->is_navigate(), "IG action chosen at " + node.name);
    }
  }
  if (v.pass) v.detail = "50 scenarios, up to " + std::to_string(largest) + " nodes, all J within 1e-6, no IG";
  return v;
}

Verdict brute_force_oracle() {
  Verdict v;
  std::mt19937_64 rng(2002);
  const ClassSet classes({"a", "b"});
  constexpr std::uint64_t kBudget = 200000;
  std::uint64_t enumerated = 0;
  int with_ig = 0;
  for (int scenario = 0; scenario < 20; ++scenario) {
    for (int attempt = 0;; ++attempt) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 6)(rng);
      const Roadmap roadmap = testing::random_roadmap(rng, n, std::uniform_int_distribution<std::size_t>(0, 1)(rng));
      std::vector<std::optional<SemanticBelief>> priors;
      for (std::size_t i = 0; i < n; ++i) {
        const bool dirac = std::bernoulli_distribution(0.5)(rng);
        priors.push_back(dirac ? SemanticBelief::dirac(3, std::uniform_int_distribution<ClassIndex>(0, 1)(rng))
                               : random_belief(rng, 3, std::bernoulli_distribution(0.3)(rng)));
      }
      const CostModel cost = testing::random_cost_model(rng, 2, std::uniform_real_distribution<double>(0.2, 4.0)(rng));
      Sbg g = build_sbg(roadmap, priors, classes, Eigen::Matrix3d::Identity() * 0.01);
      const NodeId goal = g.base_node(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::bernoulli_distribution(0.6)(rng)) g.expand_ig_outcomes(g.base_node(i), {.top_k = 2});
      if (testing::policy_count(g, goal) > kBudget && attempt < 1000) continue;
      if (testing::policy_count(g, goal) > kBudget) {
        v.require(false, "could not draw a scenario within the enumeration budget");
        return v;
      }
      const PlanResult plan = value_iteration(g, cost, goal, {.tol = 1e-10});
      const auto oracle = testing::brute_force_optimum(g, cost, goal);
      enumerated += oracle.policies;
      bool ig = false;
      for (const auto& node : g.nodes()) {
        const auto& best = oracle.best[node.id.value];
        v.require(best.has_value() == plan.values.is_reachable(node.id), "reachability differs at " + node.name);
        if (best) {
          const double err = std::abs(plan.values.at(node.id) - *best);
          v.require(err <= 1e-6, "scenario " + std::to_string(scenario) + " node " + node.name + " off by " + num(err, 9));
        }
        const auto& a = plan.policy.action(node.id);
        ig = ig || (a && !a->is_navigate());
      }
      with_ig += ig ? 1 : 0;
      break;
    }
  }
  if (v.pass)
    v.detail = "20 scenarios, " + std::to_string(enumerated) + " policies enumerated, optimum uses IG in " +
               std::to_string(with_ig);
  return v;
}

Verdict table_one_ordering() {
  Verdict v;
  const Scenario s = load_scenario(fixture_path("urban_callout"));
  const PlannerKind kinds[] = {PlannerKind::sbg, PlannerKind::conservative, PlannerKind::optimistic};
  const Experiment e = run_experiment(s, kinds, 20, 0);
  const auto& sbg = e.runs[0].summary;
  const auto& cons = e.runs[1].summary;
  const auto& opt = e.runs[2].summary;
  v.require(sbg.mean_time < cons.mean_time, "SBG mean not below conservative");
  v.require(sbg.mean_time < opt.mean_time, "SBG mean not below optimistic");
  v.require(cons.static_accuracy_pct && *cons.static_accuracy_pct == 100.0, "conservative accuracy below 100%");
  v.require(sbg.static_accuracy_pct && opt.static_accuracy_pct && *sbg.static_accuracy_pct >= *opt.static_accuracy_pct,
            "SBG accuracy below optimistic");
  auto pct = [](const std::optional<double>& p) { return p ? num(*p, 1) + "%" : std::string("n/a"); };
  const std::string table = "mean time sbg " + num(sbg.mean_time, 1) + " / conservative " + num(cons.mean_time, 1) +
                            " / optimistic " + num(opt.mean_time, 1) + " s; accuracy " + pct(sbg.static_accuracy_pct) +
                            " / " + pct(cons.static_accuracy_pct) + " / " + pct(opt.static_accuracy_pct);
  v.detail = v.pass ? table : v.detail + " (" + table + ")";
  return v;
}

std::string trajectory(const Sbg& g, const TrialResult& t) {
  std::string path;
  for (const auto& a : t.actions) path += g.node(a.node).name + (a.edge.is_navigate() ? " > " : " [IG] ");
  return path;
}

Verdict two_level_behavior() {
  Verdict v;
  const Scenario s = load_scenario(fixture_path("small_two_level"));
  const PlannerKind kinds[] = {PlannerKind::sbg, PlannerKind::conservative};
  const Experiment e = run_experiment(s, kinds, 100, 0);
  const NodeId b1 = e.sbg.base_node(*s.roadmap.find("B1"));
  const NodeId t = e.sbg.base_node(*s.roadmap.find("T"));
  const NodeId r1 = e.sbg.base_node(*s.roadmap.find("R1"));
  const ClassIndex stair = *s.classes.find("stair");

  auto most_frequent = [&](const std::vector<TrialResult>& trials) {
    std::map<std::string, std::pair<int, const TrialResult*>> freq;
    for (const auto& trial : trials) {
      auto& slot = freq[trajectory(e.sbg, trial)];
      ++slot.first;
      slot.second = &trial;
    }
    return *std::max_element(freq.begin(), freq.end(),
                             [](const auto& a, const auto& b) { return a.second.first < b.second.first; });
  };
  const auto sbg_top = most_frequent(e.runs[0].trials);
  const auto cons_top = most_frequent(e.runs[1].trials);
  const auto* top = &sbg_top;
  const TrialResult& best = *top->second.second;
  int igs = 0;
  bool ig_at_b1 = false, stair_route = false;
  for (std::size_t i = 0; i < best.actions.size(); ++i) {
    const auto& a = best.actions[i];
    if (!a.edge.is_navigate()) {
      ++igs;
      ig_at_b1 = a.node == b1;
      if (i + 1 < best.actions.size()) {
        const auto& next = best.actions[i + 1].edge;
        stair_route = next.is_navigate() && next.to == t && next.controller == stair;
      }
    }
  }
  v.require(igs == 1 && ig_at_b1 && stair_route, "most frequent SBG trajectory is '" + top->first + "'");

  // Conservative never crosses B1 before scanning it.
  for (const auto& trial : e.runs[1].trials) {
    bool scanned = false, detour = false;
    for (const auto& a : trial.actions) {
      if (a.node == b1 && !a.edge.is_navigate()) scanned = true;
      if (a.edge.is_navigate() && a.edge.to == r1) detour = true;
      if (a.node == b1 && a.edge.is_navigate() && !scanned)
        v.require(false, "conservative crossed B1 without scanning: " + trajectory(e.sbg, trial));
    }
    v.require(scanned || detour, "conservative neither scanned nor detoured: " + trajectory(e.sbg, trial));
  }
  if (v.pass)
    v.detail = "SBG '" + sbg_top.first + "' in " + std::to_string(sbg_top.second.first) + "/100; conservative '" +
               cons_top.first + "' in " + std::to_string(cons_top.second.first) + "/100";
  return v;
}

Verdict expected_cost_properties() {
  Verdict v;
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const CostModel cost = testing::random_cost_model(rng, 3, 1.0);
    const SemanticBelief a = random_belief(rng, 4, true), b = random_belief(rng, 4, true);
    const double w = u(rng);
    std::vector<double> mix(4);
    for (std::size_t k = 0; k < 4; ++k) mix[k] = w * a[k] + (1.0 - w) * b[k];
    const ClassIndex c = std::uniform_int_distribution<ClassIndex>(0, 2)(rng);
    const double len = 0.05 + 30.0 * u(rng);
    const double lhs = expected_nav_cost(cost, SemanticBelief(mix), c, len);
    const double rhs = w * expected_nav_cost(cost, a, c, len) + (1.0 - w) * expected_nav_cost(cost, b, c, len);
    v.require(std::abs(lhs - rhs) <= 1e-9, "linearity off by " + num(std::abs(lhs - rhs), 12));
    const ClassIndex m = std::uniform_int_distribution<ClassIndex>(0, 3)(rng);
    const double dirac = expected_nav_cost(cost, SemanticBelief::dirac(4, m), c, len);
    v.require(std::abs(dirac - cost.unit_cost(c, m) * len) <= 1e-9, "Dirac identity fails");
    const double k = 0.1 + 10.0 * u(rng);
    const double scaled = expected_nav_cost(cost, a, c, k * len);
    v.require(std::abs(scaled - k * expected_nav_cost(cost, a, c, len)) <= 1e-9 * std::max(1.0, scaled),
              "length proportionality fails");
  }
  if (v.pass) v.detail = "1000 draws each: linearity, Dirac lookup, length proportionality";
  return v;
}

Verdict belief_filter() {
  Verdict v;
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const SemanticBelief prior = random_belief(rng, 4, true);
    std::vector<double> r1(4), r2(4), flat(4, u(rng) + 0.01);
    for (auto& x : r1) x = u(rng) + 1e-3;
    for (auto& x : r2) x = u(rng) + 1e-3;
    const auto ab = bayes_update(bayes_update(prior, r1), r2);
    const auto ba = bayes_update(bayes_update(prior, r2), r1);
    const auto same = bayes_update(prior, flat);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      total += ab[k];
      v.require(std::abs(ab[k] - ba[k]) <= 1e-12, "observation order changes the posterior");
      v.require(std::abs(same[k] - prior[k]) <= 1e-12, "uniform likelihood changes the belief");
    }
    v.require(std::abs(total - 1.0) <= 1e-12, "posterior not normalized");
  }
  Rng sampler(6007);
  constexpr int kSamples = 100000;
  double worst = 0.0;
  for (double acc : {0.7, 0.95}) {
    for (ClassIndex t = 0; t < 4; ++t) {
      std::vector<int> counts(4, 0);
      for (int i = 0; i < kSamples; ++i) ++counts[sample_observation(acc, t, 4, sampler)];
      for (ClassIndex o = 0; o < 4; ++o) {
        const double expected = likelihood_row(acc, o, 4)[t];
        const double err = std::abs(static_cast<double>(counts[o]) / kSamples - expected);
        worst = std::max(worst, err);
        v.require(err <= 0.01, "confusion cell off by " + num(err, 4));
      }
    }
  }
  if (v.pass) v.detail = "normalization, commutativity, uniform no-op; confusion cells within " + num(worst, 4);
  return v;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[entry.path().filename().string()] = s.str();
  }
  return files;
}

Verdict cli_determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "sbg_acceptance_cli";
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"plan", {"plan", "urban_callout", "--dot"}},
      {"compare", {"compare", "urban_callout", "--trials", "20", "--policies", "all", "--seed", "3"}},
      {"simulate", {"simulate", "small_two_level", "--trials", "10", "--dot"}},
      {"export", {"export", "urban_callout"}},
      {"generate", {"generate", "--seed", "11"}},
  };
  int artifacts = 0;
  for (const auto& [name, base] : commands) {
    std::optional<std::map<std::string, std::string>> reference;
    for (const char* jobs : {"1", "8"}) {
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = root / (name + "_" + jobs + "_" + std::to_string(rep));
        fs::remove_all(dir);
        auto args = base;
        args.insert(args.end(), {"--jobs", jobs});
        if (name == "generate") {
          args.insert(args.end(), {"--out", (dir / "course.json").string()});
        } else {
          args.insert(args.end(), {"--out", dir.string()});
        }
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        v.require(code == cli::kOk, name + " exited " + std::to_string(code) + ": " + err.str());
        auto files = snapshot(dir);
        // Messages naming the output directory are compared with it masked.
        std::string text = out.str();
        for (auto pos = text.find(dir.string()); pos != std::string::npos; pos = text.find(dir.string()))
          text.replace(pos, dir.string().size(), "<out>");
        files["<stdout>"] = text;
        if (!reference) {
          reference = files;
          artifacts += static_cast<int>(files.size());
        } else {
          v.require(files == *reference, name + " artifacts differ with --jobs " + jobs);
        }
      }
    }
  }
  fs::remove_all(root);
  if (v.pass) v.detail = "5 subcommands x {--jobs 1, --jobs 8} x 2 runs, " + std::to_string(artifacts) + " artifacts identical";
  return v;
}

Verdict residual_certificate() {
  Verdict v;
  std::string detail;
  for (const auto* name : {"small_two_level", "urban_callout"}) {
    const Scenario s = load_scenario(fixture_path(name));
    const Sbg g = build_scenario_graph(s);
    const NodeId goal = g.base_node(s.goal_vertex());
    for (auto kind : {PlannerKind::sbg}) {
      const PlanResult plan = sbg::plan(kind, g, s.cost, goal, planner_options(s));
      const double residual = bellman_residual(g, s.cost, plan.values, goal);
      v.require(residual < s.planner.tol, std::string(name) + " residual " + num(residual, 12));
      for (std::size_t i = 1; i < plan.residuals.size(); ++i)
        v.require(plan.residuals[i] <= plan.residuals[i - 1],
                  std::string(name) + " residual rose at sweep " + std::to_string(i + 1));
      detail += std::string(detail.empty() ? "" : "; ") + name + " " + std::to_string(plan.sweeps) + " sweeps, residual " +
                num(residual, 12);
    }
  }
  if (v.pass) v.detail = detail;
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1 value iteration matches Dijkstra on Dirac scenarios", dijkstra_equivalence},
      {"AC2 value iteration matches exhaustive policy enumeration", brute_force_oracle},
      {"AC3 urban course ordering of time and controller accuracy", table_one_ordering},
      {"AC4 two-level scenario scans the stair once then climbs", two_level_behavior},
      {"AC5 expected edge cost properties", expected_cost_properties},
      {"AC6 belief filter properties", belief_filter},
      {"AC7 CLI artifacts deterministic across runs and job counts", cli_determinism},
      {"AC8 Bellman residual certificate on bundled fixtures", residual_certificate},
  };
  int failed = 0;
  for (const auto& [label, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << label << " (" << num(secs, 2) << " s): " << v.detail << '\n';
    failed += v.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
