#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sbg {

/// Index into a ClassSet. The last index is always the reserved `unknown` class.
using ClassIndex = std::size_t;

struct TerrainClass {
  ClassIndex index = 0;
  std::string name;
};

inline constexpr std::string_view kUnknownClassName = "unknown";

/// Fixed, ordered set of terrain classes: the d_l named classes followed by
/// `unknown`. A default-constructed set is empty and is rejected by the priors.
class ClassSet {
 public:
  ClassSet() = default;
  /// Builds a set from named classes; `unknown` is appended. Throws
  /// std::invalid_argument on duplicate names or an explicit "unknown" entry.
  explicit ClassSet(std::vector<std::string> named);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t named_count() const noexcept { return names_.empty() ? 0 : names_.size() - 1; }
  bool empty() const noexcept { return names_.empty(); }
  ClassIndex unknown_index() const;
  bool is_unknown(ClassIndex index) const { return index == unknown_index(); }

  const std::string& name(ClassIndex index) const;
  TerrainClass at(ClassIndex index) const { return {index, name(index)}; }
  std::optional<ClassIndex> find(std::string_view name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const ClassSet&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Categorical distribution over a ClassSet, `unknown` included as the last entry.
class SemanticBelief {
 public:
  static constexpr double kSumTolerance = 1e-9;
  static constexpr double kRenormalizeTolerance = 1e-6;

  /// Validates and (if the sum is off by at most 1e-6) renormalizes `probs`.
  /// Throws std::invalid_argument on negative/non-finite entries or a worse sum.
  explicit SemanticBelief(std::vector<double> probs);

  /// Dirac belief on `index` in a distribution of `size` entries.
  static SemanticBelief dirac(std::size_t size, ClassIndex index);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](ClassIndex index) const { return probs_[index]; }
  std::span<const double> probs() const noexcept { return probs_; }

  bool operator==(const SemanticBelief&) const = default;

 private:
  std::vector<double> probs_;
};

/// Mean position and covariance. Stored and validated, never propagated.
class GeometricBelief {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;
  static constexpr double kEigenTolerance = -1e-9;

  GeometricBelief() : GeometricBelief(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()) {}
  /// Throws std::invalid_argument unless the covariance is symmetric and PSD.
  GeometricBelief(const Eigen::Vector3d& mean, const Eigen::Matrix3d& covariance);

  const Eigen::Vector3d& mean() const noexcept { return mean_; }
  const Eigen::Matrix3d& covariance() const noexcept { return covariance_; }

  bool operator==(const GeometricBelief& other) const {
    return mean_ == other.mean_ && covariance_ == other.covariance_;
  }

 private:
  Eigen::Vector3d mean_;
  Eigen::Matrix3d covariance_;
};

/// Independent geometric and semantic factors of a node belief.
struct GeoSemanticBelief {
  GeometricBelief geometric;
  SemanticBelief semantic;

  bool operator==(const GeoSemanticBelief&) const = default;
};

struct ClassProbability {
  ClassIndex index = 0;
  double probability = 0.0;
};

SemanticBelief uniform_prior(const ClassSet& classes);

/// `unknown_mass` on the unknown class, the rest spread evenly over named classes.
SemanticBelief unknown_prior(const ClassSet& classes, double unknown_mass);

/// Posterior proportional to prior[i] * likelihood[i]. Throws ContradictionError
/// when the observation has zero probability under the prior.
SemanticBelief bayes_update(const SemanticBelief& prior, std::span<const double> likelihood);

/// Most probable class; ties resolve to the lowest index.
ClassProbability argmax_class(const SemanticBelief& belief);

/// Most probable named class, ignoring the trailing unknown entry.
ClassProbability argmax_named_class(const SemanticBelief& belief);

/// True iff some named (non-unknown) class has probability strictly above `threshold`.
bool is_confident(const SemanticBelief& belief, double threshold);

/// Shannon entropy in nats.
double entropy(const SemanticBelief& belief);

}  // namespace sbg
