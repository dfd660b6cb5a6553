#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "sbg/belief.hpp"

namespace sbg {

/// Generator type used throughout simulation. Every caller owns its own.
using Rng = std::mt19937_64;

/// Semantic classifier model: accuracy falls off linearly with distance and is
/// clamped to [accuracy_floor, accuracy_at_zero]. Confusions are symmetric.
struct ObservationModel {
  double accuracy_at_zero = 0.95;
  double accuracy_floor = 0.25;
  double falloff_rate = 0.05;  // per meter
  double ig_accuracy = 0.99;

  /// Defaults with the floor at chance level for `class_count` classes.
  static ObservationModel defaults(std::size_t class_count);

  /// Throws std::invalid_argument if the parameter invariants do not hold.
  void validate() const;

  bool operator==(const ObservationModel&) const = default;
};

double accuracy(const ObservationModel& model, double distance);

/// p(z = observed | true = c) for every class c, given the observed-class accuracy.
std::vector<double> likelihood_row(double observed_accuracy, ClassIndex observed,
                                   std::size_t class_count);
std::vector<double> likelihood_row(const ObservationModel& model, ClassIndex observed,
                                   double distance, std::size_t class_count);
/// Row for an information-gathering scan (distance 0, ig_accuracy).
std::vector<double> ig_likelihood_row(const ObservationModel& model, ClassIndex observed,
                                      std::size_t class_count);

/// Returns `true_class` with probability `observed_accuracy`, otherwise one of the
/// other classes uniformly at random.
ClassIndex sample_observation(double observed_accuracy, ClassIndex true_class,
                              std::size_t class_count, Rng& rng);
ClassIndex sample_observation(const ObservationModel& model, ClassIndex true_class,
                              double distance, std::size_t class_count, Rng& rng);
ClassIndex sample_ig_observation(const ObservationModel& model, ClassIndex true_class,
                                 std::size_t class_count, Rng& rng);

}  // namespace sbg
