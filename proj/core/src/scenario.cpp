#include "sbg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sbg {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ScenarioErrorKind kind) {
  switch (kind) {
    case ScenarioErrorKind::io: return "io";
    case ScenarioErrorKind::parse: return "parse";
    case ScenarioErrorKind::schema: return "schema";
    case ScenarioErrorKind::unknown_class: return "unknown-class";
    case ScenarioErrorKind::unknown_vertex: return "unknown-vertex";
    case ScenarioErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ScenarioErrorKind::negative_cost: return "negative-cost";
    case ScenarioErrorKind::invalid_value: return "invalid-value";
    case ScenarioErrorKind::unreachable_goal: return "unreachable-goal";
  }
  return "?";
}

ScenarioError::ScenarioError(ScenarioErrorKind kind, std::string location, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " at " + (location.empty() ? "/" : location) +
                         ": " + message),
      kind_(kind),
      location_(std::move(location)) {}

std::size_t Scenario::start_vertex() const {
  auto v = roadmap.find(start);
  if (!v) throw ScenarioError(ScenarioErrorKind::unknown_vertex, "/start", "no vertex '" + start + "'");
  return *v;
}

std::size_t Scenario::goal_vertex() const {
  auto v = roadmap.find(goal);
  if (!v) throw ScenarioError(ScenarioErrorKind::unknown_vertex, "/goal", "no vertex '" + goal + "'");
  return *v;
}

SemanticBelief Scenario::default_prior() const {
  if (prior_default.mode == PriorMode::uniform) return uniform_prior(classes);
  return unknown_prior(classes, prior_default.unknown_mass);
}

namespace {

[[noreturn]] void fail(ScenarioErrorKind kind, const std::string& at, const std::string& message) {
  throw ScenarioError(kind, at, message);
}

std::string child(const std::string& at, std::string_view key) { return at + "/" + std::string(key); }
std::string child(const std::string& at, std::size_t index) { return at + "/" + std::to_string(index); }

const json& require(const json& obj, std::string_view key, const std::string& at) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ScenarioErrorKind::schema, at, "missing field '" + std::string(key) + "'");
  return *it;
}

const json* optional_field(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void expect_object(const json& j, const std::string& at) {
  if (!j.is_object()) fail(ScenarioErrorKind::schema, at, "expected an object");
}

void expect_array(const json& j, const std::string& at) {
  if (!j.is_array()) fail(ScenarioErrorKind::schema, at, "expected an array");
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& at) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(ScenarioErrorKind::schema, child(at, key), "unexpected field");
  }
}

double number(const json& j, const std::string& at) {
  if (!j.is_number()) fail(ScenarioErrorKind::schema, at, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ScenarioErrorKind::invalid_value, at, "number must be finite");
  return v;
}

std::string text(const json& j, const std::string& at) {
  if (!j.is_string()) fail(ScenarioErrorKind::schema, at, "expected a string");
  return j.get<std::string>();
}

int integer(const json& j, const std::string& at) {
  if (!j.is_number_integer()) fail(ScenarioErrorKind::schema, at, "expected an integer");
  return j.get<int>();
}

Eigen::Vector3d vector3(const json& j, const std::string& at) {
  expect_array(j, at);
  if (j.size() != 3) fail(ScenarioErrorKind::dimension_mismatch, at, "expected 3 components");
  return {number(j[0], child(at, 0)), number(j[1], child(at, 1)), number(j[2], child(at, 2))};
}

ClassIndex class_named(const ClassSet& classes, const json& j, const std::string& at) {
  const auto name = text(j, at);
  auto found = classes.find(name);
  if (!found) fail(ScenarioErrorKind::unknown_class, at, "unknown terrain class '" + name + "'");
  return *found;
}

SemanticBelief parse_prior(const ClassSet& classes, const json& j, const std::string& at) {
  std::vector<double> probs(classes.size(), 0.0);
  if (j.is_array()) {
    if (j.size() != classes.size())
      fail(ScenarioErrorKind::dimension_mismatch, at,
           "prior has " + std::to_string(j.size()) + " entries, expected " +
               std::to_string(classes.size()));
    for (std::size_t i = 0; i < j.size(); ++i) probs[i] = number(j[i], child(at, i));
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      auto found = classes.find(key);
      if (!found) fail(ScenarioErrorKind::unknown_class, child(at, key), "unknown terrain class '" + key + "'");
      probs[*found] = number(value, child(at, key));
    }
  } else {
    fail(ScenarioErrorKind::schema, at, "prior must be an array or an object");
  }
  try {
    return SemanticBelief(std::move(probs));
  } catch (const std::invalid_argument& e) {
    fail(ScenarioErrorKind::invalid_value, at, e.what());
  }
}

CostModel parse_cost(const ClassSet& classes, const json* block) {
  const std::string at = "/cost_model";
  double ig_cost = kDefaultIgCost;
  double unsafe_cost = CostModel::kDefaultUnsafeCost;
  const json* nav = nullptr;
  if (block) {
    expect_object(*block, at);
    reject_unknown_keys(*block, {"nav_cost", "ig_cost", "unsafe_cost"}, at);
    if (auto* v = optional_field(*block, "ig_cost")) ig_cost = number(*v, child(at, "ig_cost"));
    if (auto* v = optional_field(*block, "unsafe_cost")) unsafe_cost = number(*v, child(at, "unsafe_cost"));
    nav = optional_field(*block, "nav_cost");
  }
  if (ig_cost < 0.0) fail(ScenarioErrorKind::negative_cost, child(at, "ig_cost"), "ig_cost must be non-negative");
  if (unsafe_cost <= 0.0)
    fail(ScenarioErrorKind::negative_cost, child(at, "unsafe_cost"), "unsafe_cost must be positive");

  const std::string nav_at = child(at, "nav_cost");
  if (!nav) {
    try {
      return default_cost_model(classes, ig_cost, unsafe_cost);
    } catch (const std::invalid_argument& e) {
      fail(ScenarioErrorKind::schema, nav_at, std::string("nav_cost table required: ") + e.what());
    }
  }
  expect_array(*nav, nav_at);
  if (nav->size() != classes.named_count())
    fail(ScenarioErrorKind::dimension_mismatch, nav_at,
         "table nav_cost has " + std::to_string(nav->size()) + " rows, expected " +
             std::to_string(classes.named_count()) + " (one per named class)");
  std::vector<std::vector<double>> table;
  std::vector<std::vector<bool>> unsafe;
  for (std::size_t c = 0; c < nav->size(); ++c) {
    const auto row_at = child(nav_at, c);
    const auto& row = (*nav)[c];
    expect_array(row, row_at);
    if (row.size() != classes.size())
      fail(ScenarioErrorKind::dimension_mismatch, row_at,
           "table nav_cost row has " + std::to_string(row.size()) + " columns, expected " +
               std::to_string(classes.size()));
    table.emplace_back();
    unsafe.emplace_back();
    for (std::size_t t = 0; t < row.size(); ++t) {
      const auto cell_at = child(row_at, t);
      if (row[t].is_string() && row[t].get<std::string>() == "unsafe") {
        table.back().push_back(unsafe_cost);
        unsafe.back().push_back(true);
        continue;
      }
      const double v = number(row[t], cell_at);
      if (v <= 0.0) fail(ScenarioErrorKind::negative_cost, cell_at, "traversal cost must be positive");
      table.back().push_back(v);
      unsafe.back().push_back(false);
    }
  }
  try {
    return CostModel(std::move(table), std::move(unsafe), ig_cost, unsafe_cost);
  } catch (const std::invalid_argument& e) {
    fail(ScenarioErrorKind::invalid_value, nav_at, e.what());
  }
}

ObservationModel parse_observation(const ClassSet& classes, const json* block) {
  const std::string at = "/observation_model";
  auto model = ObservationModel::defaults(classes.size());
  if (block) {
    expect_object(*block, at);
    reject_unknown_keys(*block, {"accuracy_at_zero", "accuracy_floor", "falloff_rate", "ig_accuracy"}, at);
    if (auto* v = optional_field(*block, "accuracy_at_zero")) model.accuracy_at_zero = number(*v, child(at, "accuracy_at_zero"));
    if (auto* v = optional_field(*block, "accuracy_floor")) model.accuracy_floor = number(*v, child(at, "accuracy_floor"));
    if (auto* v = optional_field(*block, "falloff_rate")) model.falloff_rate = number(*v, child(at, "falloff_rate"));
    if (auto* v = optional_field(*block, "ig_accuracy")) model.ig_accuracy = number(*v, child(at, "ig_accuracy"));
  }
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    fail(ScenarioErrorKind::invalid_value, at, e.what());
  }
  return model;
}

PlannerConfig parse_planner(const json* block) {
  const std::string at = "/planner";
  PlannerConfig config;
  if (!block) return config;
  expect_object(*block, at);
  reject_unknown_keys(*block, {"top_k", "resolved_confidence", "tol", "outcome_probability", "confidence", "max_iters"}, at);
  if (auto* v = optional_field(*block, "top_k")) {
    const int k = integer(*v, child(at, "top_k"));
    if (k < 1) fail(ScenarioErrorKind::invalid_value, child(at, "top_k"), "top_k must be at least 1");
    config.top_k = static_cast<std::size_t>(k);
  }
  if (auto* v = optional_field(*block, "resolved_confidence")) {
    config.resolved_confidence = number(*v, child(at, "resolved_confidence"));
    if (!(config.resolved_confidence > 0.5 && config.resolved_confidence <= 1.0))
      fail(ScenarioErrorKind::invalid_value, child(at, "resolved_confidence"), "must lie in (0.5, 1]");
  }
  if (auto* v = optional_field(*block, "tol")) {
    config.tol = number(*v, child(at, "tol"));
    if (!(config.tol > 0.0)) fail(ScenarioErrorKind::invalid_value, child(at, "tol"), "must be positive");
  }
  if (auto* v = optional_field(*block, "confidence")) {
    config.confidence = number(*v, child(at, "confidence"));
    if (!(config.confidence > 0.0 && config.confidence <= 1.0))
      fail(ScenarioErrorKind::invalid_value, child(at, "confidence"), "must lie in (0, 1]");
  }
  if (auto* v = optional_field(*block, "max_iters")) {
    config.max_iters = integer(*v, child(at, "max_iters"));
    if (*config.max_iters < 1) fail(ScenarioErrorKind::invalid_value, child(at, "max_iters"), "must be at least 1");
  }
  if (auto* v = optional_field(*block, "outcome_probability")) {
    const auto mode = text(*v, child(at, "outcome_probability"));
    if (mode == "belief") config.outcome_probability = OutcomeProbability::belief_proportional;
    else if (mode == "uniform") config.outcome_probability = OutcomeProbability::uniform;
    else fail(ScenarioErrorKind::invalid_value, child(at, "outcome_probability"), "expected 'belief' or 'uniform'");
  }
  return config;
}

bool connected(const Roadmap& roadmap, std::size_t from, std::size_t to) {
  std::vector<std::vector<std::size_t>> adjacency(roadmap.vertices.size());
  for (const auto& link : roadmap.links) {
    const auto a = *roadmap.find(link.from);
    const auto b = *roadmap.find(link.to);
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  std::vector<bool> seen(adjacency.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(from);
  seen[from] = true;
  while (!frontier.empty()) {
    const auto v = frontier.front();
    frontier.pop();
    if (v == to) return true;
    for (auto w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  return false;
}

}  // namespace

Scenario parse_scenario(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    fail(ScenarioErrorKind::parse, "byte " + std::to_string(e.byte), e.what());
  }
  expect_object(root, "");
  reject_unknown_keys(root,
                      {"schema", "name", "classes", "vertices", "links", "ground_truth", "priors",
                       "default_covariance", "cost_model", "observation_model", "planner", "start", "goal"},
                      "");
  const auto schema = text(require(root, "schema", ""), "/schema");
  if (schema != kScenarioSchema)
    fail(ScenarioErrorKind::schema, "/schema", "unsupported schema '" + schema + "'");

  Scenario s;
  s.name = text(require(root, "name", ""), "/name");

  const auto& classes = require(root, "classes", "");
  expect_array(classes, "/classes");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < classes.size(); ++i) names.push_back(text(classes[i], child("/classes", i)));
  if (names.empty()) fail(ScenarioErrorKind::invalid_value, "/classes", "at least one named class is required");
  try {
    s.classes = ClassSet(names);
  } catch (const std::invalid_argument& e) {
    fail(ScenarioErrorKind::invalid_value, "/classes", e.what());
  }

  const auto& vertices = require(root, "vertices", "");
  expect_array(vertices, "/vertices");
  std::vector<const json*> vertex_priors;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto at = child("/vertices", i);
    expect_object(vertices[i], at);
    reject_unknown_keys(vertices[i], {"id", "position", "prior"}, at);
    RoadmapVertex v;
    v.id = text(require(vertices[i], "id", at), child(at, "id"));
    v.position = vector3(require(vertices[i], "position", at), child(at, "position"));
    if (s.roadmap.find(v.id)) fail(ScenarioErrorKind::invalid_value, child(at, "id"), "duplicate vertex id '" + v.id + "'");
    s.roadmap.vertices.push_back(std::move(v));
    vertex_priors.push_back(optional_field(vertices[i], "prior"));
  }
  if (s.roadmap.vertices.empty()) fail(ScenarioErrorKind::invalid_value, "/vertices", "roadmap has no vertices");

  if (auto* links = optional_field(root, "links")) {
    expect_array(*links, "/links");
    for (std::size_t i = 0; i < links->size(); ++i) {
      const auto at = child("/links", i);
      const auto& l = (*links)[i];
      expect_object(l, at);
      reject_unknown_keys(l, {"from", "to", "length"}, at);
      RoadmapLink link;
      link.from = text(require(l, "from", at), child(at, "from"));
      link.to = text(require(l, "to", at), child(at, "to"));
      auto a = s.roadmap.find(link.from);
      auto b = s.roadmap.find(link.to);
      if (!a) fail(ScenarioErrorKind::unknown_vertex, child(at, "from"), "no vertex '" + link.from + "'");
      if (!b) fail(ScenarioErrorKind::unknown_vertex, child(at, "to"), "no vertex '" + link.to + "'");
      if (auto* len = optional_field(l, "length")) {
        link.length = number(*len, child(at, "length"));
      } else {
        link.length = (s.roadmap.vertices[*a].position - s.roadmap.vertices[*b].position).norm();
      }
      s.roadmap.links.push_back(std::move(link));
    }
  }
  try {
    s.roadmap.validate();
  } catch (const std::invalid_argument& e) {
    fail(ScenarioErrorKind::invalid_value, "/links", e.what());
  }

  const auto& truth = require(root, "ground_truth", "");
  expect_object(truth, "/ground_truth");
  for (const auto& [key, _] : truth.items()) {
    if (!s.roadmap.find(key))
      fail(ScenarioErrorKind::unknown_vertex, child("/ground_truth", key), "no vertex '" + key + "'");
  }
  for (const auto& v : s.roadmap.vertices) {
    const auto at = child("/ground_truth", v.id);
    auto it = truth.find(v.id);
    if (it == truth.end()) fail(ScenarioErrorKind::schema, at, "vertex '" + v.id + "' has no ground-truth label");
    const auto cls = class_named(s.classes, *it, at);
    if (s.classes.is_unknown(cls))
      fail(ScenarioErrorKind::unknown_class, at, "ground truth must be a named class");
    s.truth.terrain.push_back(cls);
  }

  if (auto* priors = optional_field(root, "priors")) {
    const std::string at = "/priors";
    expect_object(*priors, at);
    reject_unknown_keys(*priors, {"default", "unknown_mass"}, at);
    if (auto* mode = optional_field(*priors, "default")) {
      const auto m = text(*mode, child(at, "default"));
      if (m == "unknown") s.prior_default.mode = PriorMode::unknown;
      else if (m == "uniform") s.prior_default.mode = PriorMode::uniform;
      else fail(ScenarioErrorKind::invalid_value, child(at, "default"), "expected 'unknown' or 'uniform'");
    }
    if (auto* mass = optional_field(*priors, "unknown_mass")) {
      s.prior_default.unknown_mass = number(*mass, child(at, "unknown_mass"));
    }
    try {
      (void)s.default_prior();
    } catch (const std::invalid_argument& e) {
      fail(ScenarioErrorKind::invalid_value, child(at, "unknown_mass"), e.what());
    }
  }
  for (std::size_t i = 0; i < vertex_priors.size(); ++i) {
    if (vertex_priors[i]) s.priors.push_back(parse_prior(s.classes, *vertex_priors[i], child(child("/vertices", i), "prior")));
    else s.priors.emplace_back(std::nullopt);
  }

  if (auto* cov = optional_field(root, "default_covariance")) {
    const std::string at = "/default_covariance";
    expect_array(*cov, at);
    if (cov->size() != 3) fail(ScenarioErrorKind::dimension_mismatch, at, "expected a 3x3 matrix");
    for (int r = 0; r < 3; ++r) {
      const auto row = vector3((*cov)[r], child(at, static_cast<std::size_t>(r)));
      s.default_covariance.row(r) = row.transpose();
    }
    try {
      GeometricBelief(Eigen::Vector3d::Zero(), s.default_covariance);
    } catch (const std::invalid_argument& e) {
      fail(ScenarioErrorKind::invalid_value, at, e.what());
    }
  }

  s.cost = parse_cost(s.classes, optional_field(root, "cost_model"));
  s.observation = parse_observation(s.classes, optional_field(root, "observation_model"));
  s.planner = parse_planner(optional_field(root, "planner"));

  s.start = text(require(root, "start", ""), "/start");
  s.goal = text(require(root, "goal", ""), "/goal");
  const auto start = s.start_vertex();
  const auto goal = s.goal_vertex();
  if (!connected(s.roadmap, start, goal))
    fail(ScenarioErrorKind::unreachable_goal, "/goal", "goal '" + s.goal + "' is not reachable from '" + s.start + "'");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ScenarioErrorKind::io, "", "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& s) {
  ordered_json root;
  root["schema"] = kScenarioSchema;
  root["name"] = s.name;
  auto names = s.classes.names();
  names.pop_back();
  root["classes"] = names;

  auto vertices = ordered_json::array();
  for (std::size_t i = 0; i < s.roadmap.vertices.size(); ++i) {
    const auto& v = s.roadmap.vertices[i];
    ordered_json jv;
    jv["id"] = v.id;
    jv["position"] = {v.position.x(), v.position.y(), v.position.z()};
    if (!s.priors.empty() && s.priors[i]) {
      const auto probs = s.priors[i]->probs();
      jv["prior"] = std::vector<double>(probs.begin(), probs.end());
    }
    vertices.push_back(std::move(jv));
  }
  root["vertices"] = std::move(vertices);

  auto links = ordered_json::array();
  for (const auto& l : s.roadmap.links) links.push_back({{"from", l.from}, {"to", l.to}, {"length", l.length}});
  root["links"] = std::move(links);

  ordered_json truth = ordered_json::object();
  for (std::size_t i = 0; i < s.roadmap.vertices.size(); ++i)
    truth[s.roadmap.vertices[i].id] = s.classes.name(s.truth.at(i));
  root["ground_truth"] = std::move(truth);

  root["priors"] = {{"default", s.prior_default.mode == PriorMode::uniform ? "uniform" : "unknown"},
                    {"unknown_mass", s.prior_default.unknown_mass}};

  auto cov = ordered_json::array();
  for (int r = 0; r < 3; ++r)
    cov.push_back({s.default_covariance(r, 0), s.default_covariance(r, 1), s.default_covariance(r, 2)});
  root["default_covariance"] = std::move(cov);

  auto nav = ordered_json::array();
  for (ClassIndex c = 0; c < s.cost.controller_count(); ++c) {
    auto row = ordered_json::array();
    for (ClassIndex t = 0; t < s.cost.class_count(); ++t) {
      if (s.cost.is_unsafe(c, t)) row.push_back("unsafe");
      else row.push_back(s.cost.table_entry(c, t));
    }
    nav.push_back(std::move(row));
  }
  root["cost_model"] = {{"nav_cost", std::move(nav)},
                        {"ig_cost", s.cost.ig_cost()},
                        {"unsafe_cost", s.cost.unsafe_cost()}};

  root["observation_model"] = {{"accuracy_at_zero", s.observation.accuracy_at_zero},
                               {"accuracy_floor", s.observation.accuracy_floor},
                               {"falloff_rate", s.observation.falloff_rate},
                               {"ig_accuracy", s.observation.ig_accuracy}};

  ordered_json planner;
  planner["top_k"] = s.planner.top_k;
  planner["resolved_confidence"] = s.planner.resolved_confidence;
  planner["tol"] = s.planner.tol;
  planner["outcome_probability"] =
      s.planner.outcome_probability == OutcomeProbability::uniform ? "uniform" : "belief";
  planner["confidence"] = s.planner.confidence;
  if (s.planner.max_iters) planner["max_iters"] = *s.planner.max_iters;
  root["planner"] = std::move(planner);

  root["start"] = s.start;
  root["goal"] = s.goal;
  return root.dump(2) + "\n";
}

Sbg build_scenario_graph(const Scenario& s) {
  std::vector<std::optional<SemanticBelief>> priors(s.roadmap.vertices.size());
  for (std::size_t i = 0; i < priors.size(); ++i) {
    priors[i] = (!s.priors.empty() && s.priors[i]) ? *s.priors[i] : s.default_prior();
  }
  Sbg sbg = build_sbg(s.roadmap, priors, s.classes, s.default_covariance);
  IgExpansionOptions options;
  options.top_k = s.planner.top_k;
  options.resolved_confidence = s.planner.resolved_confidence;
  options.probability = s.planner.outcome_probability;
  sbg.expand_all(options, sbg.base_node(s.goal_vertex()));
  return sbg;
}

PlannerOptions planner_options(const Scenario& s, unsigned jobs) {
  PlannerOptions options;
  options.tol = s.planner.tol;
  options.max_iters = s.planner.max_iters;
  options.jobs = jobs;
  options.confidence = s.planner.confidence;
  return options;
}

}  // namespace sbg
