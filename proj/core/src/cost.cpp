#include "sbg/cost.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbg {

CostModel::CostModel(std::vector<std::vector<double>> nav_cost,
                     std::vector<std::vector<bool>> unsafe, double ig_cost, double unsafe_cost)
    : nav_cost_(std::move(nav_cost)),
      unsafe_(std::move(unsafe)),
      ig_cost_(ig_cost),
      unsafe_cost_(unsafe_cost) {
  if (nav_cost_.empty()) throw std::invalid_argument("cost table has no controllers");
  const std::size_t classes = nav_cost_.size() + 1;
  if (unsafe_.empty()) unsafe_.assign(nav_cost_.size(), std::vector<bool>(classes, false));
  if (unsafe_.size() != nav_cost_.size())
    throw std::invalid_argument("unsafe mask row count does not match cost table");
  for (std::size_t c = 0; c < nav_cost_.size(); ++c) {
    if (nav_cost_[c].size() != classes || unsafe_[c].size() != classes)
      throw std::invalid_argument("cost table row " + std::to_string(c) + " must have " +
                                  std::to_string(classes) + " columns");
  }
  if (!std::isfinite(ig_cost_) || ig_cost_ < 0.0)
    throw std::invalid_argument("ig_cost must be finite and non-negative");
  if (!std::isfinite(unsafe_cost_) || unsafe_cost_ <= 0.0)
    throw std::invalid_argument("unsafe_cost must be finite and positive");
  for (std::size_t c = 0; c < nav_cost_.size(); ++c) {
    for (std::size_t t = 0; t < classes; ++t) {
      const double v = nav_cost_[c][t];
      if (!unsafe_[c][t] && !(std::isfinite(v) && v > 0.0))
        throw std::invalid_argument("cost table entry [" + std::to_string(c) + "][" +
                                    std::to_string(t) + "] must be finite and positive");
    }
    for (std::size_t t = 0; t < classes; ++t) {
      if (unit_cost(c, c) > unit_cost(c, t))
        throw std::invalid_argument("controller " + std::to_string(c) +
                                    " is cheaper on class " + std::to_string(t) +
                                    " than on its own terrain");
    }
  }
}

void CostModel::check_controller(ClassIndex controller) const {
  if (controller >= nav_cost_.size())
    throw std::invalid_argument("controller " + std::to_string(controller) +
                                " is not a named terrain class");
}

double CostModel::unit_cost(ClassIndex controller, ClassIndex true_class) const {
  check_controller(controller);
  if (true_class >= class_count()) throw std::invalid_argument("terrain class out of range");
  return unsafe_[controller][true_class] ? unsafe_cost_ : nav_cost_[controller][true_class];
}

bool CostModel::is_unsafe(ClassIndex controller, ClassIndex true_class) const {
  check_controller(controller);
  return unsafe_.at(controller).at(true_class);
}

double CostModel::table_entry(ClassIndex controller, ClassIndex true_class) const {
  check_controller(controller);
  return nav_cost_.at(controller).at(true_class);
}

ClassIndex CostModel::most_expensive_class() const {
  ClassIndex best = 0;
  for (ClassIndex c = 1; c < controller_count(); ++c) {
    if (unit_cost(c, c) > unit_cost(best, best)) best = c;
  }
  return best;
}

CostModel default_cost_model(const ClassSet& classes, double ig_cost, double unsafe_cost) {
  if (classes.named_count() != 3)
    throw std::invalid_argument("default cost table needs exactly flat_ground, stair, rubble");
  const std::array<std::string, 3> names{"flat_ground", "stair", "rubble"};
  std::array<ClassIndex, 3> idx{};
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto found = classes.find(names[i]);
    if (!found) throw std::invalid_argument("default cost table has no entry for class set without '" +
                                            names[i] + "'");
    idx[i] = *found;
  }
  const ClassIndex flat = idx[0], stair = idx[1], rubble = idx[2];
  const ClassIndex unknown = classes.unknown_index();

  std::vector<std::vector<double>> table(3, std::vector<double>(4, 0.0));
  std::vector<std::vector<bool>> unsafe(3, std::vector<bool>(4, false));
  auto set = [&](ClassIndex c, ClassIndex t, double v) { table[c][t] = v; };
  auto mark = [&](ClassIndex c, ClassIndex t) {
    unsafe[c][t] = true;
    table[c][t] = unsafe_cost;
  };

  set(flat, flat, 1.0);
  mark(flat, stair);
  mark(flat, rubble);

  set(stair, flat, 2.0);
  set(stair, stair, 2.0);
  set(stair, rubble, 6.0);

  set(rubble, flat, 3.0);
  mark(rubble, stair);
  set(rubble, rubble, 3.0);

  // Unknown terrain is charged at the controller's worst named-class rate.
  for (ClassIndex c : idx) {
    ClassIndex worst = flat;
    for (ClassIndex t : idx) {
      const double v = unsafe[c][t] ? unsafe_cost : table[c][t];
      const double w = unsafe[c][worst] ? unsafe_cost : table[c][worst];
      if (v > w) worst = t;
    }
    table[c][unknown] = table[c][worst];
    unsafe[c][unknown] = unsafe[c][worst];
  }
  return CostModel(std::move(table), std::move(unsafe), ig_cost, unsafe_cost);
}

double expected_nav_cost(const CostModel& model, const SemanticBelief& belief,
                         ClassIndex controller, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("expected_nav_cost: length must be positive");
  if (belief.size() != model.class_count())
    throw std::invalid_argument("expected_nav_cost: belief size does not match cost table");
  double per_meter = 0.0;
  for (ClassIndex m = 0; m < belief.size(); ++m) per_meter += belief[m] * model.unit_cost(controller, m);
  return length * per_meter;
}

double ig_action_cost(const CostModel& model, const SbgNode& /*node*/) { return model.ig_cost(); }

double true_nav_cost(const CostModel& model, ClassIndex true_class, ClassIndex controller,
                     double length) {
  if (!(length > 0.0)) throw std::invalid_argument("true_nav_cost: length must be positive");
  return length * model.unit_cost(controller, true_class);
}

}  // namespace sbg
