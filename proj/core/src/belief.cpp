#include "sbg/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sbg/error.hpp"

namespace sbg {

ClassSet::ClassSet(std::vector<std::string> named) : names_(std::move(named)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw std::invalid_argument("terrain class name must not be empty");
    if (names_[i] == kUnknownClassName)
      throw std::invalid_argument("'unknown' is reserved and appended automatically");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j])
        throw std::invalid_argument("duplicate terrain class '" + names_[i] + "'");
    }
  }
  names_.emplace_back(kUnknownClassName);
}

ClassIndex ClassSet::unknown_index() const {
  if (names_.empty()) throw std::invalid_argument("class set is empty");
  return names_.size() - 1;
}

const std::string& ClassSet::name(ClassIndex index) const {
  if (index >= names_.size())
    throw std::invalid_argument("class index " + std::to_string(index) + " out of range");
  return names_[index];
}

std::optional<ClassIndex> ClassSet::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ClassIndex>(it - names_.begin());
}

SemanticBelief::SemanticBelief(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("semantic belief must not be empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument("semantic belief entries must be finite and non-negative");
    sum += p;
  }
  const double deviation = std::abs(sum - 1.0);
  if (deviation > kRenormalizeTolerance)
    throw std::invalid_argument("semantic belief sums to " + std::to_string(sum) + ", expected 1");
  if (deviation > 0.0) {
    for (double& p : probs_) p /= sum;
  }
}

SemanticBelief SemanticBelief::dirac(std::size_t size, ClassIndex index) {
  if (index >= size) throw std::invalid_argument("dirac index out of range");
  std::vector<double> probs(size, 0.0);
  probs[index] = 1.0;
  return SemanticBelief(std::move(probs));
}

GeometricBelief::GeometricBelief(const Eigen::Vector3d& mean, const Eigen::Matrix3d& covariance)
    : mean_(mean), covariance_(covariance) {
  if (!mean_.allFinite() || !covariance_.allFinite())
    throw std::invalid_argument("geometric belief must be finite");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw std::invalid_argument("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < kEigenTolerance)
    throw std::invalid_argument("covariance is not positive semi-definite");
}

SemanticBelief uniform_prior(const ClassSet& classes) {
  if (classes.empty()) throw std::invalid_argument("uniform_prior: class set is empty");
  const double p = 1.0 / static_cast<double>(classes.size());
  return SemanticBelief(std::vector<double>(classes.size(), p));
}

SemanticBelief unknown_prior(const ClassSet& classes, double unknown_mass) {
  if (classes.empty()) throw std::invalid_argument("unknown_prior: class set is empty");
  if (!(unknown_mass > 0.0 && unknown_mass <= 1.0))
    throw std::invalid_argument("unknown_prior: unknown mass must lie in (0, 1]");
  const std::size_t named = classes.named_count();
  if (named == 0 && unknown_mass < 1.0)
    throw std::invalid_argument("unknown_prior: no named classes to hold the residual mass");
  std::vector<double> probs(classes.size(), 0.0);
  if (named > 0) {
    const double residual = (1.0 - unknown_mass) / static_cast<double>(named);
    std::fill(probs.begin(), probs.end() - 1, residual);
  }
  probs.back() = unknown_mass;
  return SemanticBelief(std::move(probs));
}

SemanticBelief bayes_update(const SemanticBelief& prior, std::span<const double> likelihood) {
  if (likelihood.size() != prior.size())
    throw std::invalid_argument("bayes_update: likelihood row length does not match belief");
  std::vector<double> posterior(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if (!std::isfinite(likelihood[i]) || likelihood[i] < 0.0)
      throw std::invalid_argument("bayes_update: likelihood entries must be finite and non-negative");
    posterior[i] = prior[i] * likelihood[i];
    total += posterior[i];
  }
  if (!(total > 0.0))
    throw ContradictionError("bayes_update: observation is impossible under the prior");
  for (double& p : posterior) p /= total;
  return SemanticBelief(std::move(posterior));
}

namespace {

ClassProbability argmax_over(std::span<const double> probs) {
  ClassProbability best{0, probs[0]};
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > best.probability) best = {i, probs[i]};
  }
  return best;
}

}  // namespace

ClassProbability argmax_class(const SemanticBelief& belief) { return argmax_over(belief.probs()); }

ClassProbability argmax_named_class(const SemanticBelief& belief) {
  if (belief.size() < 2) throw std::invalid_argument("belief has no named classes");
  return argmax_over(belief.probs().first(belief.size() - 1));
}

bool is_confident(const SemanticBelief& belief, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw std::invalid_argument("is_confident: threshold must lie in (0, 1]");
  if (belief.size() < 2) return false;
  return argmax_named_class(belief).probability > threshold;
}

double entropy(const SemanticBelief& belief) {
  double h = 0.0;
  for (double p : belief.probs()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace sbg
