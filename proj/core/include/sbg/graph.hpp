#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sbg/belief.hpp"

namespace sbg {

/// Dense node handle. Base nodes occupy [0, vertex count) in roadmap order; outcome
/// nodes follow, grouped by parent. Outcome ids are reassigned on every expansion.
struct NodeId {
  std::size_t value = 0;
  friend auto operator<=>(NodeId, NodeId) = default;
};

struct RoadmapVertex {
  std::string id;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

struct RoadmapLink {
  std::string from;
  std::string to;
  double length = 0.0;  // meters
};

struct Roadmap {
  std::vector<RoadmapVertex> vertices;
  std::vector<RoadmapLink> links;

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws std::invalid_argument on duplicate ids, dangling or duplicate links,
  /// self links, and lengths that are non-positive or shorter than the chord.
  void validate() const;
};

enum class NodeKind { base, ig_outcome };

struct SbgNode {
  NodeId id;
  std::string name;
  GeoSemanticBelief belief;
  NodeKind kind = NodeKind::base;
  NodeId parent;           // self for base nodes
  std::size_t vertex = 0;  // roadmap vertex index
  std::size_t outcome_index = 0;
  ClassIndex outcome_class = 0;  // concentrated class of an ig_outcome node
};

enum class EdgeKind { navigate, info_gather };

struct SbgEdge {
  EdgeKind kind = EdgeKind::navigate;
  NodeId from;
  NodeId to;                // equals `from` for info_gather loops
  ClassIndex controller = 0;  // navigate only
  double length = 0.0;      // navigate only, meters

  bool is_navigate() const noexcept { return kind == EdgeKind::navigate; }
  bool operator==(const SbgEdge&) const = default;
};

struct IgOutcome {
  NodeId node;
  double probability = 0.0;
};

enum class OutcomeProbability { belief_proportional, uniform };

struct IgExpansionOptions {
  std::size_t top_k = 2;
  double resolved_confidence = 1.0;
  OutcomeProbability probability = OutcomeProbability::belief_proportional;
};

/// Semantic belief graph: belief nodes, parallel per-controller navigate edges,
/// information-gathering self-loops and the outcome nodes those loops lead to.
class Sbg {
 public:
  Sbg() = default;

  const ClassSet& classes() const noexcept { return classes_; }
  std::size_t base_count() const noexcept { return base_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  std::span<const SbgNode> nodes() const noexcept { return nodes_; }
  std::span<const SbgEdge> edges() const noexcept { return edges_; }
  const SbgNode& node(NodeId id) const;
  bool contains(NodeId id) const noexcept { return id.value < nodes_.size(); }
  std::optional<NodeId> find(std::string_view name) const;
  NodeId base_node(std::size_t vertex) const;

  /// Navigate edges out of `id` in (target, controller) order, then its IG loop.
  std::span<const std::size_t> action_edges(NodeId id) const;
  const SbgEdge& edge(std::size_t index) const { return edges_.at(index); }

  /// Outcome distribution of the IG loop at a base node; empty until expanded.
  std::span<const IgOutcome> ig_transitions(NodeId base) const;
  bool is_expanded(NodeId base) const;

  /// Replaces the semantic belief of a base node and discards its expansion.
  void set_semantic_belief(NodeId base, SemanticBelief belief);

  /// Replaces any previous expansion of `base` with fresh outcome nodes.
  void expand_ig_outcomes(NodeId base, const IgExpansionOptions& options);
  /// Expands every base node except `skip`.
  void expand_all(const IgExpansionOptions& options, std::optional<NodeId> skip = std::nullopt);

 private:
  friend Sbg build_sbg(const Roadmap&, std::span<const std::optional<SemanticBelief>>,
                       const ClassSet&, const Eigen::Matrix3d&);

  struct Neighbor {
    std::size_t vertex;
    double length;
  };
  struct OutcomeSpec {
    ClassIndex cls;
    SemanticBelief belief;
    double probability;
  };
  struct BaseVertex {
    std::string name;
    GeoSemanticBelief belief;
    std::vector<Neighbor> neighbors;  // sorted by vertex index
    std::vector<OutcomeSpec> outcomes;
    bool expanded = false;
  };

  void expand_outcomes(NodeId base, const IgExpansionOptions& options);
  void rebuild();
  const BaseVertex& base_of(NodeId id, const char* context) const;

  ClassSet classes_;
  std::vector<BaseVertex> base_;
  std::vector<SbgNode> nodes_;
  std::vector<SbgEdge> edges_;
  std::vector<std::vector<std::size_t>> actions_;
  std::vector<std::vector<IgOutcome>> transitions_;  // indexed by base vertex
};

/// One base node per vertex (given prior or unknown_prior(1.0)), one navigate edge
/// per named controller per link direction, one IG loop per base node.
Sbg build_sbg(const Roadmap& roadmap, std::span<const std::optional<SemanticBelief>> priors,
              const ClassSet& classes, const Eigen::Matrix3d& default_covariance);

void expand_ig_outcomes(Sbg& sbg, NodeId base, std::size_t top_k, double resolved_confidence);

std::vector<SbgEdge> actions_from(const Sbg& sbg, NodeId id);

}  // namespace sbg
