#pragma once

#include <cstddef>
#include <vector>

#include "sbg/belief.hpp"
#include "sbg/graph.hpp"

namespace sbg {

/// Traversal-time model. `unit_cost(c, t)` is seconds per meter for controller `c`
/// (a named class) on true terrain `t` (any class, `unknown` included).
class CostModel {
 public:
  static constexpr double kDefaultUnsafeCost = 1e4;

  /// `nav_cost` has one row per named controller and one column per class.
  /// Entries flagged in `unsafe` are charged `unsafe_cost` instead of their table
  /// value. Throws std::invalid_argument on shape errors, non-positive entries,
  /// negative ig_cost, or a controller that is slower on its own terrain than
  /// on some other terrain.
  CostModel(std::vector<std::vector<double>> nav_cost, std::vector<std::vector<bool>> unsafe,
            double ig_cost, double unsafe_cost = kDefaultUnsafeCost);

  std::size_t controller_count() const noexcept { return nav_cost_.size(); }
  std::size_t class_count() const noexcept { return nav_cost_.empty() ? 0 : nav_cost_[0].size(); }

  double unit_cost(ClassIndex controller, ClassIndex true_class) const;
  bool is_unsafe(ClassIndex controller, ClassIndex true_class) const;
  double ig_cost() const noexcept { return ig_cost_; }
  double unsafe_cost() const noexcept { return unsafe_cost_; }
  /// Raw table value, ignoring the unsafe flag.
  double table_entry(ClassIndex controller, ClassIndex true_class) const;

  /// Named class with the largest matched-controller cost (lowest index on ties).
  ClassIndex most_expensive_class() const;

  bool operator==(const CostModel&) const = default;

 private:
  void check_controller(ClassIndex controller) const;

  std::vector<std::vector<double>> nav_cost_;
  std::vector<std::vector<bool>> unsafe_;
  double ig_cost_;
  double unsafe_cost_;
};

inline constexpr double kDefaultIgCost = 5.0;

/// Bundled defaults for the classes flat_ground, stair and rubble (any order).
/// Throws std::invalid_argument for any other class set.
CostModel default_cost_model(const ClassSet& classes, double ig_cost = kDefaultIgCost,
                             double unsafe_cost = CostModel::kDefaultUnsafeCost);

/// length * sum_m belief[m] * unit_cost(controller, m).
double expected_nav_cost(const CostModel& model, const SemanticBelief& belief,
                         ClassIndex controller, double length);

/// Constant per IG action; the node is accepted for per-terrain scan times later.
double ig_action_cost(const CostModel& model, const SbgNode& node);

double true_nav_cost(const CostModel& model, ClassIndex true_class, ClassIndex controller,
                     double length);

}  // namespace sbg
