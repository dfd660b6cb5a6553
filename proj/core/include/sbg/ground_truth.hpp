#pragma once

#include <cstddef>
#include <vector>

#include "sbg/belief.hpp"

namespace sbg {

/// True terrain class of every roadmap vertex, indexed like Roadmap::vertices.
/// Labels are always named classes, never `unknown`.
struct GroundTruth {
  std::vector<ClassIndex> terrain;

  ClassIndex at(std::size_t vertex) const { return terrain.at(vertex); }
  bool operator==(const GroundTruth&) const = default;
};

}  // namespace sbg
