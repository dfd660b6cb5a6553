#include "sbg/observation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbg {

ObservationModel ObservationModel::defaults(std::size_t class_count) {
  if (class_count == 0) throw std::invalid_argument("observation model needs at least one class");
  ObservationModel model;
  model.accuracy_floor = 1.0 / static_cast<double>(class_count);
  return model;
}

void ObservationModel::validate() const {
  auto probability = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (!probability(accuracy_at_zero) || !probability(accuracy_floor) || !probability(ig_accuracy))
    throw std::invalid_argument("observation accuracies must be probabilities");
  if (accuracy_floor > accuracy_at_zero)
    throw std::invalid_argument("accuracy_floor must not exceed accuracy_at_zero");
  if (ig_accuracy < accuracy_at_zero)
    throw std::invalid_argument("ig_accuracy must be at least accuracy_at_zero");
  if (!std::isfinite(falloff_rate) || falloff_rate < 0.0)
    throw std::invalid_argument("falloff_rate must be non-negative");
}

double accuracy(const ObservationModel& model, double distance) {
  if (!(distance >= 0.0)) throw std::invalid_argument("accuracy: distance must be non-negative");
  const double linear = model.accuracy_at_zero - model.falloff_rate * distance;
  return std::clamp(linear, model.accuracy_floor, model.accuracy_at_zero);
}

std::vector<double> likelihood_row(double observed_accuracy, ClassIndex observed,
                                   std::size_t class_count) {
  if (class_count < 2) throw std::invalid_argument("likelihood_row: need at least two classes");
  if (observed >= class_count) throw std::invalid_argument("likelihood_row: class index out of range");
  if (!(observed_accuracy >= 0.0 && observed_accuracy <= 1.0))
    throw std::invalid_argument("likelihood_row: accuracy must be a probability");
  const double confusion = (1.0 - observed_accuracy) / static_cast<double>(class_count - 1);
  std::vector<double> row(class_count, confusion);
  row[observed] = observed_accuracy;
  return row;
}

std::vector<double> likelihood_row(const ObservationModel& model, ClassIndex observed,
                                   double distance, std::size_t class_count) {
  return likelihood_row(accuracy(model, distance), observed, class_count);
}

std::vector<double> ig_likelihood_row(const ObservationModel& model, ClassIndex observed,
                                      std::size_t class_count) {
  return likelihood_row(model.ig_accuracy, observed, class_count);
}

ClassIndex sample_observation(double observed_accuracy, ClassIndex true_class,
                              std::size_t class_count, Rng& rng) {
  if (class_count < 2) throw std::invalid_argument("sample_observation: need at least two classes");
  if (true_class >= class_count)
    throw std::invalid_argument("sample_observation: class index out of range");
  std::bernoulli_distribution correct(observed_accuracy);
  if (correct(rng)) return true_class;
  std::uniform_int_distribution<std::size_t> other(0, class_count - 2);
  const std::size_t draw = other(rng);
  return draw >= true_class ? draw + 1 : draw;
}

ClassIndex sample_observation(const ObservationModel& model, ClassIndex true_class,
                              double distance, std::size_t class_count, Rng& rng) {
  return sample_observation(accuracy(model, distance), true_class, class_count, rng);
}

ClassIndex sample_ig_observation(const ObservationModel& model, ClassIndex true_class,
                                 std::size_t class_count, Rng& rng) {
  return sample_observation(model.ig_accuracy, true_class, class_count, rng);
}

}  // namespace sbg
