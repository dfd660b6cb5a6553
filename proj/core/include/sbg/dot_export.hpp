#pragma once

#include <optional>
#include <string>

#include "sbg/graph.hpp"
#include "sbg/planner.hpp"

namespace sbg {

/// Graphviz digraph of the SBG. Nodes are labeled with their most likely class,
/// IG outcome transitions are dotted, and edges chosen by `policy` are drawn bold
/// red. Output is deterministic: nodes then edges, both in id order.
std::string export_dot(const Sbg& sbg, const std::optional<Policy>& policy = std::nullopt);

}  // namespace sbg
