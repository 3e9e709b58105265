#pragma once

// Graphviz DOT export. Thimacs become nested clusters, stages become nodes,
// flow arcs are solid edges and trigger arcs dashed ones.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "thimac/dynamics.hpp"

namespace thimac {

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline constexpr const char* kEventColors[] = {
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
};

inline std::string event_color(EventId id) {
  return kEventColors[id.value % (sizeof(kEventColors) / sizeof(kEventColors[0]))];
}

}  // namespace detail

/// Deterministic DOT text for a valid model. With `dyn`, every stage in some
/// region is filled with its events' colors (striped when shared) and tagged
/// with one class per event.
inline std::string export_dot(const StaticModel& model, const DynamicModel* dyn = nullptr) {
  if (has_errors(validate_model(model))) throw Error(Errc::InvalidModel, "model has validation errors");
  if (model.empty()) return "digraph tm {}";

  std::map<StageId, std::vector<const Event*>> membership;
  if (dyn) {
    for (const Event& e : dyn->events()) {
      for (StageId s : e.region.stages) {
        if (model.has_stage(s)) membership[s].push_back(&e);
      }
    }
  }

  const auto node = [&](StageId id, const std::string& indent) {
    const Stage& s = model.stage(id);
    std::string label(to_string(s.kind));
    if (s.direction) label += std::string(" ") + std::string(to_string(*s.direction));
    std::string out = indent + "s" + std::to_string(id.value) + " [label=" + detail::dot_quote(label);
    auto it = membership.find(id);
    if (it != membership.end()) {
      std::string colors, classes;
      for (const Event* e : it->second) {
        colors += (colors.empty() ? "" : ":") + detail::event_color(e->id);
        classes += (classes.empty() ? "" : " ") + ("event-" + e->label);
      }
      out += it->second.size() == 1 ? ", shape=box, style=filled" : ", shape=box, style=striped";
      out += ", fillcolor=" + detail::dot_quote(colors) + ", class=" + detail::dot_quote(classes);
    }
    return out + "];\n";
  };

  std::string body;
  std::function<void(ThimacId, const std::string&)> cluster = [&](ThimacId id, const std::string& indent) {
    const Thimac& t = model.thimac(id);
    body += indent + "subgraph cluster_t" + std::to_string(id.value) + " {\n";
    body += indent + "  label=" + detail::dot_quote(t.name) + ";\n";
    for (StageId s : t.stages) body += node(s, indent + "  ");
    for (ThimacId child : model.children(id)) cluster(child, indent + "  ");
    body += indent + "}\n";
  };
  for (ThimacId root : model.children(std::nullopt)) cluster(root, "  ");

  for (const Arc& a : model.arcs()) {
    body += "  s" + std::to_string(a.from.value) + " -> s" + std::to_string(a.to.value);
    body += a.kind == ArcKind::Trigger ? " [style=dashed];\n" : ";\n";
  }
  return "digraph tm {\n" + body + "}";
}

}  // namespace thimac
