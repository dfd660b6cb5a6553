#include "sbg/dot_export.hpp"

#include <cstdio>
#include <sstream>

namespace sbg {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const Sbg& sbg, const std::optional<Policy>& policy) {
  std::ostringstream out;
  out << "digraph sbg {\n";
  for (const auto& node : sbg.nodes()) {
    const auto top = argmax_class(node.belief.semantic);
    out << "  n" << node.id.value << " [label="
        << quoted(node.name + "\\n" + sbg.classes().name(top.index) + " " + fixed(top.probability, 2))
        << (node.kind == NodeKind::ig_outcome ? ", shape=box" : "") << "];\n";
  }
  for (const auto& edge : sbg.edges()) {
    const bool chosen = policy && edge.from.value < policy->size() && policy->action(edge.from) &&
                        *policy->action(edge.from) == edge;
    out << "  n" << edge.from.value << " -> n" << edge.to.value << " [label=";
    if (edge.is_navigate()) {
      out << quoted(sbg.classes().name(edge.controller) + " " + fixed(edge.length, 1) + "m");
    } else {
      out << "\"ig\", style=dashed";
    }
    if (chosen) out << ", color=red, penwidth=2";
    out << "];\n";
  }
  for (std::size_t v = 0; v < sbg.base_count(); ++v) {
    for (const auto& o : sbg.ig_transitions(NodeId{v})) {
      out << "  n" << v << " -> n" << o.node.value << " [label=\"p=" << fixed(o.probability, 3)
          << "\", style=dotted];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace sbg
