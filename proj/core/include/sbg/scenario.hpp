#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sbg/belief.hpp"
#include "sbg/cost.hpp"
#include "sbg/graph.hpp"
#include "sbg/ground_truth.hpp"
#include "sbg/observation.hpp"
#include "sbg/planner.hpp"

namespace sbg {

inline constexpr std::string_view kScenarioSchema = "sbg-scenario/1";

enum class ScenarioErrorKind {
  io,
  parse,
  schema,
  unknown_class,
  unknown_vertex,
  dimension_mismatch,
  negative_cost,
  invalid_value,
  unreachable_goal,
};

std::string_view to_string(ScenarioErrorKind kind);

/// Load/validation failure. `location` is a JSON pointer into the document.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrorKind kind, std::string location, const std::string& message);

  ScenarioErrorKind kind() const noexcept { return kind_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ScenarioErrorKind kind_;
  std::string location_;
};

enum class PriorMode { unknown, uniform };

struct PriorDefault {
  PriorMode mode = PriorMode::unknown;
  double unknown_mass = 1.0;
};

struct PlannerConfig {
  std::size_t top_k = 2;
  double resolved_confidence = 1.0;
  double tol = 1e-6;
  OutcomeProbability outcome_probability = OutcomeProbability::belief_proportional;
  double confidence = 0.95;
  std::optional<int> max_iters;
};

struct Scenario {
  std::string name;
  ClassSet classes;
  Roadmap roadmap;
  GroundTruth truth;
  std::vector<std::optional<SemanticBelief>> priors;  // per vertex; empty = default
  PriorDefault prior_default;
  Eigen::Matrix3d default_covariance = Eigen::Matrix3d::Identity() * 0.01;
  CostModel cost = default_cost_model(ClassSet({"flat_ground", "stair", "rubble"}));
  ObservationModel observation;
  PlannerConfig planner;
  std::string start;
  std::string goal;

  std::size_t start_vertex() const;
  std::size_t goal_vertex() const;
  SemanticBelief default_prior() const;
};

/// Parses and fully validates a scenario document. Throws ScenarioError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON document: every optional block written out explicitly.
std::string serialize_scenario(const Scenario& scenario);

/// Base graph with every non-goal node expanded per the planner config.
Sbg build_scenario_graph(const Scenario& scenario);

PlannerOptions planner_options(const Scenario& scenario, unsigned jobs = 1);

struct UrbanCourseParams {
  int segments = 27;
  double total_length = 300.0;  // meters
  double stair_fraction = 0.15;
  double rubble_fraction = 0.2;
  std::uint64_t seed = 7;
};

/// Procedural urban course: a main chain of `segments` links whose lengths sum to
/// `total_length`, terrain drawn per the given fractions, and a flat detour around
/// every run of stair/rubble vertices.
Scenario generate_urban_course(const UrbanCourseParams& params = {});

}  // namespace sbg
