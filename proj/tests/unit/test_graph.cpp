#include <gtest/gtest.h>

#include "sbg/belief.hpp"
#include "sbg/dot_export.hpp"
#include "sbg/graph.hpp"

namespace sbg {
namespace {

const ClassSet kClasses({"flat_ground", "stair", "rubble"});
const Eigen::Matrix3d kCov = Eigen::Matrix3d::Identity() * 0.01;

Roadmap line(std::size_t n) {
  Roadmap r;
  for (std::size_t i = 0; i < n; ++i) r.vertices.push_back({"v" + std::to_string(i), Eigen::Vector3d(4.0 * i, 0, 0)});
  for (std::size_t i = 0; i + 1 < n; ++i) r.links.push_back({r.vertices[i].id, r.vertices[i + 1].id, 4.0});
  return r;
}

Sbg build(const Roadmap& r, std::vector<std::optional<SemanticBelief>> priors = {}) {
  priors.resize(r.vertices.size());
  return build_sbg(r, priors, kClasses, kCov);
}

std::size_t count(const Sbg& g, EdgeKind kind) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.kind == kind ? 1 : 0;
  return n;
}

TEST(BuildSbg, TwoVerticesOneLink) {
  const Sbg g = build(line(2));
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(count(g, EdgeKind::navigate), 6u);
  EXPECT_EQ(count(g, EdgeKind::info_gather), 2u);
}

TEST(BuildSbg, SingleVertex) {
  const Sbg g = build(line(1));
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(count(g, EdgeKind::navigate), 0u);
  EXPECT_EQ(count(g, EdgeKind::info_gather), 1u);
}

TEST(BuildSbg, DefaultPriorIsUnknown) {
  const Sbg g = build(line(2));
  EXPECT_EQ(g.node(NodeId{0}).belief.semantic, SemanticBelief::dirac(4, 3));
}

TEST(BuildSbg, RejectsBadRoadmaps) {
  Roadmap r = line(2);
  r.links.push_back({"v0", "missing", 4.0});
  EXPECT_THROW(build(r), std::invalid_argument);
  Roadmap dup = line(2);
  dup.vertices[1].id = "v0";
  EXPECT_THROW(build(dup), std::invalid_argument);
  Roadmap shortlink = line(2);
  shortlink.links[0].length = 1.0;
  EXPECT_THROW(build(shortlink), std::invalid_argument);
}

TEST(ExpandIgOutcomes, TopTwoRenormalized) {
  Sbg g = build(line(2), {SemanticBelief({0.1, 0.6, 0.3, 0.0})});
  expand_ig_outcomes(g, NodeId{0}, 2, 1.0);
  const auto t = g.ig_transitions(NodeId{0});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(g.node(t[0].node).belief.semantic, SemanticBelief::dirac(4, 1));
  EXPECT_NEAR(t[0].probability, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(g.node(t[1].node).belief.semantic, SemanticBelief::dirac(4, 2));
  EXPECT_NEAR(t[1].probability, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(g.node(t[0].node).name, "v0#stair");
}

TEST(ExpandIgOutcomes, DiracHasSingleOutcome) {
  Sbg g = build(line(2), {SemanticBelief::dirac(4, 1)});
  expand_ig_outcomes(g, NodeId{0}, 2, 1.0);
  const auto t = g.ig_transitions(NodeId{0});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t[0].probability, 1.0);
  EXPECT_EQ(g.node(t[0].node).outcome_class, 1u);
}

TEST(ExpandIgOutcomes, UniformNamedTopThree) {
  const double third = 1.0 / 3.0;
  Sbg g = build(line(2), {SemanticBelief({third, third, third, 0.0})});
  expand_ig_outcomes(g, NodeId{0}, 3, 1.0);
  const auto t = g.ig_transitions(NodeId{0});
  ASSERT_EQ(t.size(), 3u);
  for (const auto& o : t) EXPECT_NEAR(o.probability, third, 1e-12);
}

TEST(ExpandIgOutcomes, PartialConfidenceKeepsRestSpread) {
  Sbg g = build(line(2), {SemanticBelief({0.5, 0.5, 0.0, 0.0})});
  expand_ig_outcomes(g, NodeId{0}, 2, 0.9);
  const auto& b = g.node(g.ig_transitions(NodeId{0})[0].node).belief.semantic;
  EXPECT_NEAR(b[0], 0.9, 1e-12);
  double total = 0.0;
  for (double p : b.probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ExpandIgOutcomes, OutcomesNeverIncreaseEntropy) {
  Sbg g = build(line(3), {SemanticBelief({0.3, 0.45, 0.15, 0.1}), SemanticBelief({0.2, 0.2, 0.2, 0.4})});
  g.expand_all({});
  for (NodeId base : {NodeId{0}, NodeId{1}}) {
    const double parent = entropy(g.node(base).belief.semantic);
    for (const auto& o : g.ig_transitions(base)) EXPECT_LE(entropy(g.node(o.node).belief.semantic), parent);
  }
}

TEST(ExpandIgOutcomes, RejectsOutcomeNodes) {
  Sbg g = build(line(2), {SemanticBelief({0.5, 0.5, 0.0, 0.0})});
  g.expand_all({});
  const NodeId outcome = g.ig_transitions(NodeId{0})[0].node;
  EXPECT_THROW(expand_ig_outcomes(g, outcome, 2, 1.0), std::invalid_argument);
  EXPECT_THROW(expand_ig_outcomes(g, NodeId{99}, 2, 1.0), std::invalid_argument);
}

TEST(ActionsFrom, Counts) {
  Sbg g = build(line(3), {std::nullopt, SemanticBelief({0.5, 0.5, 0.0, 0.0})});
  g.expand_all({});
  EXPECT_EQ(actions_from(g, NodeId{1}).size(), 7u);
  const NodeId outcome = g.ig_transitions(NodeId{1})[0].node;
  EXPECT_EQ(actions_from(g, outcome).size(), 6u);
  EXPECT_EQ(actions_from(build(line(1)), NodeId{0}).size(), 1u);
  EXPECT_THROW(actions_from(g, NodeId{1000}), std::invalid_argument);
}

TEST(ActionsFrom, OutcomeNodesShareParentNeighbors) {
  Sbg g = build(line(3), {std::nullopt, SemanticBelief({0.5, 0.5, 0.0, 0.0})});
  g.expand_all({});
  const NodeId outcome = g.ig_transitions(NodeId{1})[1].node;
  for (const auto& e : actions_from(g, outcome)) {
    ASSERT_TRUE(e.is_navigate());
    EXPECT_EQ(g.node(e.to).kind, NodeKind::base);
  }
}

TEST(SetSemanticBelief, DropsExpansion) {
  Sbg g = build(line(2), {SemanticBelief({0.5, 0.5, 0.0, 0.0})});
  g.expand_all({});
  const std::size_t expanded = g.node_count();
  g.set_semantic_belief(NodeId{0}, SemanticBelief::dirac(4, 0));
  EXPECT_FALSE(g.is_expanded(NodeId{0}));
  EXPECT_LT(g.node_count(), expanded);
}

TEST(ExportDot, EmptyGraph) { EXPECT_EQ(export_dot(Sbg{}), "digraph sbg {\n}\n"); }

TEST(ExportDot, TwoNodesInIdOrder) {
  const Sbg g = build(line(2));
  const std::string dot = export_dot(g);
  const auto n0 = dot.find("n0 [");
  const auto n1 = dot.find("n1 [");
  ASSERT_NE(n0, std::string::npos);
  ASSERT_NE(n1, std::string::npos);
  EXPECT_LT(n0, n1);
  EXPECT_NE(dot.find("n0 -> n1"), std::string::npos);
  EXPECT_LT(n1, dot.find("n0 -> n1"));
  EXPECT_EQ(dot, export_dot(g));
}

}  // namespace
}  // namespace sbg
