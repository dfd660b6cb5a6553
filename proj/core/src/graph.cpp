#include "sbg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace sbg {

std::optional<std::size_t> Roadmap::find(std::string_view id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id == id) return i;
  }
  return std::nullopt;
}

void Roadmap::validate() const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id.empty()) throw std::invalid_argument("roadmap vertex id must not be empty");
    if (!vertices[i].position.allFinite())
      throw std::invalid_argument("roadmap vertex '" + vertices[i].id + "' has a non-finite position");
    if (!index.emplace(vertices[i].id, i).second)
      throw std::invalid_argument("duplicate roadmap vertex id '" + vertices[i].id + "'");
  }
  std::unordered_set<std::string> seen;
  for (const auto& link : links) {
    auto a = index.find(link.from);
    auto b = index.find(link.to);
    if (a == index.end() || b == index.end())
      throw std::invalid_argument("roadmap link " + link.from + "-" + link.to +
                                  " references a missing vertex");
    if (a->second == b->second)
      throw std::invalid_argument("roadmap link on '" + link.from + "' is a self link");
    if (!(std::isfinite(link.length) && link.length > 0.0))
      throw std::invalid_argument("roadmap link " + link.from + "-" + link.to +
                                  " must have positive length");
    const double chord = (vertices[a->second].position - vertices[b->second].position).norm();
    if (link.length < chord - 1e-6)
      throw std::invalid_argument("roadmap link " + link.from + "-" + link.to +
                                  " is shorter than the distance between its endpoints");
    const auto lo = std::min(a->second, b->second);
    const auto hi = std::max(a->second, b->second);
    if (!seen.insert(std::to_string(lo) + ":" + std::to_string(hi)).second)
      throw std::invalid_argument("duplicate roadmap link " + link.from + "-" + link.to);
  }
}

Sbg build_sbg(const Roadmap& roadmap, std::span<const std::optional<SemanticBelief>> priors,
              const ClassSet& classes, const Eigen::Matrix3d& default_covariance) {
  if (classes.named_count() == 0) throw std::invalid_argument("build_sbg: no named terrain classes");
  roadmap.validate();
  if (!priors.empty() && priors.size() != roadmap.vertices.size())
    throw std::invalid_argument("build_sbg: prior count does not match vertex count");

  const SemanticBelief fallback = unknown_prior(classes, 1.0);
  Sbg sbg;
  sbg.classes_ = classes;
  sbg.base_.reserve(roadmap.vertices.size());
  for (std::size_t i = 0; i < roadmap.vertices.size(); ++i) {
    const auto& prior = priors.empty() ? std::nullopt : priors[i];
    if (prior && prior->size() != classes.size())
      throw std::invalid_argument("build_sbg: prior of '" + roadmap.vertices[i].id +
                                  "' has the wrong number of classes");
    Sbg::BaseVertex base{
        roadmap.vertices[i].id,
        {GeometricBelief(roadmap.vertices[i].position, default_covariance), prior.value_or(fallback)},
        {},
        {},
        false};
    sbg.base_.push_back(std::move(base));
  }
  for (const auto& link : roadmap.links) {
    const auto a = *roadmap.find(link.from);
    const auto b = *roadmap.find(link.to);
    sbg.base_[a].neighbors.push_back({b, link.length});
    sbg.base_[b].neighbors.push_back({a, link.length});
  }
  for (auto& base : sbg.base_) {
    std::sort(base.neighbors.begin(), base.neighbors.end(),
              [](const auto& x, const auto& y) { return x.vertex < y.vertex; });
  }
  sbg.rebuild();
  return sbg;
}

void Sbg::rebuild() {
  nodes_.clear();
  edges_.clear();
  actions_.clear();
  transitions_.assign(base_.size(), {});

  for (std::size_t v = 0; v < base_.size(); ++v) {
    nodes_.push_back(SbgNode{.id = NodeId{v},
                             .name = base_[v].name,
                             .belief = base_[v].belief,
                             .kind = NodeKind::base,
                             .parent = NodeId{v},
                             .vertex = v});
  }
  for (std::size_t v = 0; v < base_.size(); ++v) {
    for (std::size_t m = 0; m < base_[v].outcomes.size(); ++m) {
      const auto& spec = base_[v].outcomes[m];
      const NodeId id{nodes_.size()};
      transitions_[v].push_back({id, spec.probability});
      nodes_.push_back(SbgNode{.id = id,
                               .name = base_[v].name + "#" + classes_.name(spec.cls),
                               .belief = {base_[v].belief.geometric, spec.belief},
                               .kind = NodeKind::ig_outcome,
                               .parent = NodeId{v},
                               .vertex = v,
                               .outcome_index = m,
                               .outcome_class = spec.cls});
    }
  }

  actions_.resize(nodes_.size());
  const std::size_t named = classes_.named_count();
  for (const auto& node : nodes_) {
    auto& actions = actions_[node.id.value];
    for (const auto& neighbor : base_[node.vertex].neighbors) {
      for (ClassIndex c = 0; c < named; ++c) {
        actions.push_back(edges_.size());
        edges_.push_back({EdgeKind::navigate, node.id, NodeId{neighbor.vertex}, c, neighbor.length});
      }
    }
    if (node.kind == NodeKind::base) {
      actions.push_back(edges_.size());
      edges_.push_back({EdgeKind::info_gather, node.id, node.id, 0, 0.0});
    }
  }
}

const Sbg::BaseVertex& Sbg::base_of(NodeId id, const char* context) const {
  if (id.value >= base_.size())
    throw std::invalid_argument(std::string(context) + ": node " + std::to_string(id.value) +
                                " is not a base node");
  return base_[id.value];
}

const SbgNode& Sbg::node(NodeId id) const {
  if (!contains(id)) throw std::invalid_argument("node " + std::to_string(id.value) + " not found");
  return nodes_[id.value];
}

std::optional<NodeId> Sbg::find(std::string_view name) const {
  for (const auto& node : nodes_) {
    if (node.name == name) return node.id;
  }
  return std::nullopt;
}

NodeId Sbg::base_node(std::size_t vertex) const {
  if (vertex >= base_.size()) throw std::invalid_argument("vertex index out of range");
  return NodeId{vertex};
}

std::span<const std::size_t> Sbg::action_edges(NodeId id) const {
  if (!contains(id)) throw std::invalid_argument("node " + std::to_string(id.value) + " not found");
  return actions_[id.value];
}

std::span<const IgOutcome> Sbg::ig_transitions(NodeId base) const {
  base_of(base, "ig_transitions");
  return transitions_[base.value];
}

bool Sbg::is_expanded(NodeId base) const { return base_of(base, "is_expanded").expanded; }

void Sbg::set_semantic_belief(NodeId base, SemanticBelief belief) {
  base_of(base, "set_semantic_belief");
  if (belief.size() != classes_.size())
    throw std::invalid_argument("set_semantic_belief: wrong number of classes");
  auto& vertex = base_[base.value];
  vertex.belief.semantic = std::move(belief);
  vertex.outcomes.clear();
  vertex.expanded = false;
  rebuild();
}

namespace {

SemanticBelief concentrated(std::size_t size, ClassIndex cls, double confidence) {
  if (confidence >= 1.0) return SemanticBelief::dirac(size, cls);
  std::vector<double> probs(size, (1.0 - confidence) / static_cast<double>(size - 1));
  probs[cls] = confidence;
  return SemanticBelief(std::move(probs));
}

}  // namespace

void Sbg::expand_ig_outcomes(NodeId base, const IgExpansionOptions& options) {
  expand_outcomes(base, options);
  rebuild();
}

void Sbg::expand_outcomes(NodeId base, const IgExpansionOptions& options) {
  base_of(base, "expand_ig_outcomes");
  if (options.top_k < 1) throw std::invalid_argument("expand_ig_outcomes: top_k must be at least 1");
  if (!(options.resolved_confidence > 0.5 && options.resolved_confidence <= 1.0))
    throw std::invalid_argument("expand_ig_outcomes: resolved_confidence must lie in (0.5, 1]");

  auto& vertex = base_[base.value];
  const auto& prior = vertex.belief.semantic;
  const ClassIndex unknown = classes_.unknown_index();

  std::vector<ClassIndex> candidates;
  for (ClassIndex c = 0; c < unknown; ++c) {
    if (prior[c] > 0.0) candidates.push_back(c);
  }
  if (candidates.empty()) candidates.push_back(unknown);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](ClassIndex a, ClassIndex b) { return prior[a] > prior[b]; });
  candidates.resize(std::min(options.top_k, candidates.size()));

  double selected_mass = 0.0;
  for (ClassIndex c : candidates) selected_mass += prior[c];

  vertex.outcomes.clear();
  for (ClassIndex c : candidates) {
    const double p = options.probability == OutcomeProbability::uniform
                         ? 1.0 / static_cast<double>(candidates.size())
                         : prior[c] / selected_mass;
    vertex.outcomes.push_back({c, concentrated(classes_.size(), c, options.resolved_confidence), p});
  }
  vertex.expanded = true;
}

void Sbg::expand_all(const IgExpansionOptions& options, std::optional<NodeId> skip) {
  for (std::size_t v = 0; v < base_.size(); ++v) {
    if (skip && skip->value == v) continue;
    expand_outcomes(NodeId{v}, options);
  }
  rebuild();
}

void expand_ig_outcomes(Sbg& sbg, NodeId base, std::size_t top_k, double resolved_confidence) {
  IgExpansionOptions options;
  options.top_k = top_k;
  options.resolved_confidence = resolved_confidence;
  sbg.expand_ig_outcomes(base, options);
}

std::vector<SbgEdge> actions_from(const Sbg& sbg, NodeId id) {
  std::vector<SbgEdge> out;
  for (std::size_t e : sbg.action_edges(id)) out.push_back(sbg.edge(e));
  return out;
}

}  // namespace sbg
