#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "sbg/scenario.hpp"

namespace sbg {

namespace {

enum Terrain : ClassIndex { kFlat = 0, kStair = 1, kRubble = 2 };

// Prior signatures a terrain callout can produce, as [flat, stair, rubble, unknown].
struct Signature {
  double weight;
  std::vector<double> prior;
};

const std::vector<Signature>& signatures(ClassIndex truth) {
  static const std::vector<Signature> flat{
      {0.72, {1.0, 0.0, 0.0, 0.0}},     // mapped clear corridor
      {0.20, {0.45, 0.0, 0.55, 0.0}},   // debris, flat or rubble
      {0.08, {0.35, 0.65, 0.0, 0.0}},   // possible stair (false callout)
  };
  static const std::vector<Signature> stair{
      {1.0, {0.35, 0.65, 0.0, 0.0}},
  };
  static const std::vector<Signature> rubble{
      {0.45, {0.45, 0.0, 0.55, 0.0}},
      {0.30, {0.04, 0.0, 0.96, 0.0}},   // confirmed rubble field
      {0.25, {0.05, 0.5, 0.45, 0.0}},   // rubble pile that looks like steps
  };
  switch (truth) {
    case kFlat: return flat;
    case kStair: return stair;
    default: return rubble;
  }
}

std::string pad(int i) { return (i < 10 ? "0" : "") + std::to_string(i); }

}  // namespace

Scenario generate_urban_course(const UrbanCourseParams& params) {
  if (params.segments < 2) throw std::invalid_argument("urban course needs at least 2 segments");
  if (!(params.total_length > 0.0)) throw std::invalid_argument("urban course length must be positive");
  if (params.stair_fraction < 0.0 || params.rubble_fraction < 0.0 ||
      params.stair_fraction + params.rubble_fraction > 1.0)
    throw std::invalid_argument("terrain fractions must be non-negative and sum to at most 1");

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> turn(0.0, 0.35);

  Scenario s;
  s.name = "urban_callout_seed" + std::to_string(params.seed);
  s.classes = ClassSet({"flat_ground", "stair", "rubble"});
  {
    // A flat-ground gait stumbles over rubble rather than falling, so that pair
    // is slow instead of unsafe here.
    const CostModel base = default_cost_model(s.classes, 15.0);
    std::vector<std::vector<double>> table(3, std::vector<double>(4));
    std::vector<std::vector<bool>> unsafe(3, std::vector<bool>(4));
    for (ClassIndex c = 0; c < 3; ++c) {
      for (ClassIndex t = 0; t < 4; ++t) {
        table[c][t] = base.table_entry(c, t);
        unsafe[c][t] = base.is_unsafe(c, t);
      }
    }
    table[kFlat][kRubble] = 6.0;
    unsafe[kFlat][kRubble] = false;
    s.cost = CostModel(std::move(table), std::move(unsafe), base.ig_cost(), base.unsafe_cost());
  }
  s.observation = ObservationModel::defaults(s.classes.size());

  const int n = params.segments;
  std::vector<double> lengths(n);
  double weight_sum = 0.0;
  for (auto& l : lengths) {
    l = 0.3 + 1.4 * unit(rng);
    weight_sum += l;
  }
  for (auto& l : lengths) l *= params.total_length / weight_sum;

  // Interior labels; the start and goal stay flat so every cluster has a flat
  // vertex on both sides to anchor its detour.
  std::vector<ClassIndex> truth(n + 1, kFlat);
  for (int i = 1; i < n; ++i) {
    const double u = unit(rng);
    if (u < params.stair_fraction) truth[i] = kStair;
    else if (u < params.stair_fraction + params.rubble_fraction) truth[i] = kRubble;
  }

  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double heading = 0.0;
  for (int i = 0; i <= n; ++i) {
    s.roadmap.vertices.push_back({"m" + pad(i), position});
    if (i == n) break;
    heading += turn(rng);
    const double pitch = truth[i] == kStair ? 0.45 : 0.0;
    const Eigen::Vector3d dir(std::cos(heading) * std::cos(pitch), std::sin(heading) * std::cos(pitch),
                              std::sin(pitch));
    position += lengths[i] * dir;
    s.roadmap.links.push_back({"m" + pad(i), "m" + pad(i + 1), lengths[i]});
  }

  std::vector<std::optional<SemanticBelief>> priors;
  for (int i = 0; i <= n; ++i) {
    const auto& menu = signatures(truth[i]);
    double u = unit(rng);
    const Signature* chosen = &menu.back();
    for (const auto& sig : menu) {
      if (u < sig.weight) {
        chosen = &sig;
        break;
      }
      u -= sig.weight;
    }
    priors.emplace_back(SemanticBelief(i == 0 || i == n ? std::vector<double>{1.0, 0.0, 0.0, 0.0}
                                                        : chosen->prior));
  }

  // One flat detour around each maximal run of stair/rubble vertices.
  int detour = 0;
  for (int i = 1; i < n;) {
    if (truth[i] == kFlat) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && truth[j + 1] != kFlat) ++j;
    const int before = i - 1, after = j + 1;
    double span = 0.0;
    for (int k = before; k < after; ++k) span += lengths[k];
    const auto& p0 = s.roadmap.vertices[before].position;
    const auto& p1 = s.roadmap.vertices[after].position;
    const Eigen::Vector3d chord = p1 - p0;
    const double target = (3.5 + unit(rng)) * span;
    const double offset = std::max(1.0, (target - chord.norm()) / 2.0);
    Eigen::Vector3d lateral(-chord.y(), chord.x(), 0.0);
    lateral = lateral.norm() > 1e-9 ? lateral.normalized() : Eigen::Vector3d::UnitY();
    const std::string a = "d" + pad(detour) + "a", b = "d" + pad(detour) + "b";
    s.roadmap.vertices.push_back({a, p0 + offset * lateral});
    s.roadmap.vertices.push_back({b, p1 + offset * lateral});
    s.roadmap.links.push_back({"m" + pad(before), a, offset});
    s.roadmap.links.push_back({a, b, chord.norm() > 1e-6 ? chord.norm() : 1.0});
    s.roadmap.links.push_back({b, "m" + pad(after), offset});
    truth.push_back(kFlat);
    truth.push_back(kFlat);
    priors.emplace_back(SemanticBelief::dirac(4, kFlat));
    priors.emplace_back(SemanticBelief::dirac(4, kFlat));
    ++detour;
    i = after;
  }

  s.truth.terrain = truth;
  s.priors = std::move(priors);
  s.start = "m00";
  s.goal = "m" + pad(n);
  return s;
}

}  // namespace sbg
