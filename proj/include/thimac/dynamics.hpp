#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "thimac/core_model.hpp"

namespace thimac {

using EventId = Id<struct EventTag>;

/// The subdiagram of the static model where an event happens. `arcs` holds
/// every host arc whose endpoints both lie in `stages`.
struct Region {
  std::set<StageId> stages;
  std::set<ArcId> arcs;

  friend bool operator==(const Region&, const Region&) = default;
};

struct Event {
  EventId id;
  std::string label;
  Region region;
  std::string description;
};

/// A static model plus the events the modeler identified on it. Events may
/// share stages, or even an identical region, as long as labels differ.
class DynamicModel {
 public:
  explicit DynamicModel(StaticModel host) : host_(std::move(host)) {}

  EventId define_event(std::string label, const std::set<StageId>& stages,
                       std::string description = {}) {
    if (stages.empty()) throw Error(Errc::EmptyRegion, "event '" + label + "' has no stages");
    for (StageId s : stages) {
      if (!host_.has_stage(s)) {
        throw Error(Errc::UnknownStage,
                    "event '" + label + "' references stage " + std::to_string(s.value));
      }
    }
    if (find_event(label)) throw Error(Errc::DuplicateLabel, "event '" + label + "' already defined");

    Region region{stages, {}};
    for (const Arc& a : host_.arcs()) {
      if (stages.count(a.from) && stages.count(a.to)) region.arcs.insert(a.id);
    }
    const EventId id{static_cast<std::uint32_t>(events_.size())};
    events_.push_back(Event{id, std::move(label), std::move(region), std::move(description)});
    return id;
  }

  const StaticModel& host() const { return host_; }
  const std::vector<Event>& events() const { return events_; }

  const Event& event(EventId id) const {
    if (id.value >= events_.size()) {
      throw Error(Errc::UnknownEvent, "no event with id " + std::to_string(id.value));
    }
    return events_[id.value];
  }

  std::optional<EventId> find_event(std::string_view label) const {
    for (const Event& e : events_) {
      if (e.label == label) return e.id;
    }
    return std::nullopt;
  }

 private:
  StaticModel host_;
  std::vector<Event> events_;
};

struct Overlap {
  EventId first;
  EventId second;
  std::vector<StageId> shared;

  friend bool operator==(const Overlap&, const Overlap&) = default;
};

/// Every unordered pair of events whose regions intersect, sorted by ids.
inline std::vector<Overlap> events_overlapping(const DynamicModel& dyn) {
  std::vector<Overlap> out;
  const auto& events = dyn.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      std::vector<StageId> shared;
      std::set_intersection(events[i].region.stages.begin(), events[i].region.stages.end(),
                            events[j].region.stages.begin(), events[j].region.stages.end(),
                            std::back_inserter(shared));
      if (!shared.empty()) out.push_back(Overlap{events[i].id, events[j].id, std::move(shared)});
    }
  }
  return out;
}

/// Warns about regions that fall apart into several pieces when only the
/// region's own arcs connect its stages.
inline std::vector<Diagnostic> region_warnings(const DynamicModel& dyn) {
  std::vector<Diagnostic> out;
  const StaticModel& host = dyn.host();
  for (const Event& e : dyn.events()) {
    std::map<StageId, StageId> parent;
    for (StageId s : e.region.stages) parent[s] = s;
    const auto find = [&](StageId s) {
      while (parent[s] != s) s = parent[s] = parent[parent[s]];
      return s;
    };
    for (ArcId aid : e.region.arcs) {
      const Arc& a = host.arc(aid);
      parent[find(a.from)] = find(a.to);
    }
    std::set<StageId> roots;
    for (StageId s : e.region.stages) roots.insert(find(s));
    if (roots.size() > 1) {
      out.push_back({Severity::Warning, "DisconnectedRegion", "event '" + e.label + "'",
                     "region splits into " + std::to_string(roots.size()) + " unconnected parts"});
    }
  }
  return out;
}

struct EventNode {
  EventId id;
  std::string label;

  friend bool operator==(const EventNode&, const EventNode&) = default;
};

struct EventEdge {
  EventId from;
  EventId to;
  ArcKind kind = ArcKind::Flow;

  friend auto operator<=>(const EventEdge& a, const EventEdge& b) {
    return std::tie(a.from, a.to, a.kind) <=> std::tie(b.from, b.to, b.kind);
  }
  friend bool operator==(const EventEdge&, const EventEdge&) = default;
};

/// Events as nodes; an edge A->B for each kind of host arc running from a
/// stage of A's region to a stage of B's region (A != B), unless the arc is
/// internal to either region. Overlap alone never orders events. Node ids
/// are positional. Edges are sorted and unique.
struct EventGraph {
  std::vector<EventNode> events;
  std::vector<EventEdge> edges;

  bool has_edge(EventId from, EventId to, ArcKind kind) const {
    return std::binary_search(edges.begin(), edges.end(), EventEdge{from, to, kind});
  }

  friend bool operator==(const EventGraph&, const EventGraph&) = default;
};

inline EventGraph derive_event_graph(const DynamicModel& dyn) {
  EventGraph graph;
  std::map<StageId, std::vector<EventId>> owners;
  for (const Event& e : dyn.events()) {
    graph.events.push_back(EventNode{e.id, e.label});
    for (StageId s : e.region.stages) owners[s].push_back(e.id);
  }

  std::set<EventEdge> edges;
  for (const Arc& a : dyn.host().arcs()) {
    auto from = owners.find(a.from);
    auto to = owners.find(a.to);
    if (from == owners.end() || to == owners.end()) continue;
    for (EventId x : from->second) {
      for (EventId y : to->second) {
        if (x == y) continue;
        if (dyn.event(x).region.arcs.count(a.id) || dyn.event(y).region.arcs.count(a.id)) continue;
        edges.insert(EventEdge{x, y, a.kind});
      }
    }
  }
  graph.edges.assign(edges.begin(), edges.end());
  return graph;
}

}  // namespace thimac
