#pragma once

// From event graph to acceptable chronologies.
//
// A flow edge A->B means B needs A: A occurs strictly earlier whenever both
// occur (precedence), and B may only occur once all of its flow sources have
// (conjunctive enablement).
//
// A trigger edge A->B means A obliges B: if A occurs in slot i then B occurs
// in some slot <= i+1, never in A's own slot; and an event with trigger
// sources may only occur right after one of them (disjunctive enablement).
// An event with both kinds of sources is enabled by either discipline.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "thimac/dynamics.hpp"

namespace thimac {

struct ConstraintSet {
  std::vector<EventNode> events;
  std::set<std::pair<EventId, EventId>> precedence;  // from flow edges
  std::set<std::pair<EventId, EventId>> obligation;  // from trigger edges
  std::map<EventId, std::set<EventId>> enablement_flow;
  std::map<EventId, std::set<EventId>> enablement_trigger;

  std::size_t size() const { return events.size(); }

  const std::string& label(EventId id) const {
    if (id.value >= events.size()) {
      throw Error(Errc::UnknownEvent, "no event with id " + std::to_string(id.value));
    }
    return events[id.value].label;
  }

  std::optional<EventId> find(std::string_view label) const {
    for (const EventNode& e : events) {
      if (e.label == label) return e.id;
    }
    return std::nullopt;
  }

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

inline ConstraintSet derive_constraints(const EventGraph& graph) {
  ConstraintSet cs;
  cs.events = graph.events;
  for (std::size_t i = 0; i < cs.events.size(); ++i) {
    if (cs.events[i].id.value != i) throw Error(Errc::InvalidArgument, "event ids must be positional");
  }
  for (const EventEdge& e : graph.edges) {
    if (e.from.value >= cs.size() || e.to.value >= cs.size()) {
      throw Error(Errc::UnknownEvent, "edge references an undefined event");
    }
    if (e.kind == ArcKind::Flow) {
      cs.precedence.insert({e.from, e.to});
      cs.enablement_flow[e.to].insert(e.from);
    } else {
      cs.obligation.insert({e.from, e.to});
      cs.enablement_trigger[e.to].insert(e.from);
    }
  }
  return cs;
}

/// An ordered sequence of non-empty, disjoint sets of simultaneous events.
class Chronology {
 public:
  Chronology() = default;

  explicit Chronology(std::vector<std::vector<EventId>> slots) : slots_(std::move(slots)) {
    std::set<EventId> seen;
    for (auto& slot : slots_) {
      if (slot.empty()) throw Error(Errc::InvalidChronology, "empty slot");
      std::sort(slot.begin(), slot.end());
      for (EventId e : slot) {
        if (!seen.insert(e).second) {
          throw Error(Errc::InvalidChronology,
                      "event " + std::to_string(e.value) + " occurs more than once");
        }
      }
    }
    if (seen.empty()) throw Error(Errc::InvalidChronology, "a chronology needs at least one event");
  }

  const std::vector<std::vector<EventId>>& slots() const { return slots_; }

  std::optional<std::size_t> slot_of(EventId e) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (std::binary_search(slots_[i].begin(), slots_[i].end(), e)) return i;
    }
    return std::nullopt;
  }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& s : slots_) n += s.size();
    return n;
  }

  friend auto operator<=>(const Chronology&, const Chronology&) = default;
  friend bool operator==(const Chronology&, const Chronology&) = default;

 private:
  std::vector<std::vector<EventId>> slots_;
};

enum class ConstraintKind { Precedence, Obligation, Enablement, Simultaneity };

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Precedence: return "precedence";
    case ConstraintKind::Obligation: return "obligation";
    case ConstraintKind::Enablement: return "enablement";
    case ConstraintKind::Simultaneity: return "simultaneity";
  }
  return "?";
}

struct Violation {
  ConstraintKind kind = ConstraintKind::Precedence;
  std::vector<EventId> events;
  std::vector<std::size_t> slots;  // slot of each event, or the slot it was due by
  std::string message;
};

struct Verdict {
  bool accepted = true;
  std::vector<Violation> violations;
};

/// Checks `trace` against every constraint and names each one it breaks.
inline Verdict check_trace(const ConstraintSet& cs, const Chronology& trace) {
  const std::size_t n = cs.size();
  std::vector<long> pos(n, -1);
  for (std::size_t i = 0; i < trace.slots().size(); ++i) {
    for (EventId e : trace.slots()[i]) {
      if (e.value >= n) throw Error(Errc::UnknownEvent, "trace mentions event " + std::to_string(e.value));
      pos[e.value] = static_cast<long>(i);
    }
  }
  const auto at = [&](EventId e) { return pos[e.value]; };
  const auto name = [&](EventId e) { return cs.label(e); };

  Verdict v;
  const auto report = [&](ConstraintKind kind, std::vector<EventId> events,
                          std::vector<std::size_t> slots, std::string msg) {
    v.violations.push_back(Violation{kind, std::move(events), std::move(slots), std::move(msg)});
  };

  for (const auto& [a, b] : cs.precedence) {
    if (at(a) >= 0 && at(b) >= 0 && at(a) >= at(b)) {
      report(ConstraintKind::Precedence, {a, b},
             {static_cast<std::size_t>(at(a)), static_cast<std::size_t>(at(b))},
             name(a) + " must precede " + name(b) + " (slots " + std::to_string(at(a)) + " and " +
                 std::to_string(at(b)) + ")");
    }
  }

  for (const auto& [a, b] : cs.obligation) {
    if (at(a) < 0) continue;
    const auto due = static_cast<std::size_t>(at(a) + 1);
    if (at(b) < 0) {
      report(ConstraintKind::Obligation, {a, b}, {static_cast<std::size_t>(at(a)), due},
             name(a) + " ⊳ " + name(b) + ": " + name(a) + " at slot " +
                 std::to_string(at(a)) + " obliges " + name(b) + " by slot " +
                 std::to_string(due) + " but it never occurs");
    } else if (at(b) > at(a) + 1) {
      report(ConstraintKind::Obligation, {a, b},
             {static_cast<std::size_t>(at(a)), static_cast<std::size_t>(at(b))},
             name(a) + " ⊳ " + name(b) + ": " + name(a) + " at slot " +
                 std::to_string(at(a)) + " obliges " + name(b) + " by slot " +
                 std::to_string(due) + " but it occurs at slot " + std::to_string(at(b)));
    }
    if (at(b) >= 0 && at(a) == at(b)) {
      report(ConstraintKind::Simultaneity, {a, b},
             {static_cast<std::size_t>(at(a)), static_cast<std::size_t>(at(b))},
             name(b) + " shares slot " + std::to_string(at(a)) + " with its trigger " + name(a));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const EventId b{static_cast<std::uint32_t>(i)};
    if (at(b) < 0) continue;
    auto f = cs.enablement_flow.find(b);
    auto t = cs.enablement_trigger.find(b);
    const bool has_flow = f != cs.enablement_flow.end() && !f->second.empty();
    const bool has_trigger = t != cs.enablement_trigger.end() && !t->second.empty();
    if (!has_flow && !has_trigger) continue;

    bool flow_ok = has_flow;
    if (has_flow) {
      for (EventId s : f->second) flow_ok = flow_ok && at(s) >= 0 && at(s) < at(b);
    }
    bool trigger_ok = false;
    if (has_trigger) {
      for (EventId s : t->second) trigger_ok = trigger_ok || (at(s) >= 0 && at(s) == at(b) - 1);
    }
    if (flow_ok || trigger_ok) continue;

    std::vector<EventId> involved{b};
    std::string why;
    if (has_flow) {
      involved.insert(involved.end(), f->second.begin(), f->second.end());
      why += "not every flow source occurs earlier";
    }
    if (has_trigger) {
      involved.insert(involved.end(), t->second.begin(), t->second.end());
      if (!why.empty()) why += " and ";
      why += "no trigger source occurs in slot " + std::to_string(at(b) - 1);
    }
    report(ConstraintKind::Enablement, involved, {static_cast<std::size_t>(at(b))},
           name(b) + " at slot " + std::to_string(at(b)) + " is not enabled: " + why);
  }

  v.accepted = v.violations.empty();
  return v;
}

inline std::vector<EventId> all_events(const ConstraintSet& cs) {
  std::vector<EventId> out;
  for (const EventNode& e : cs.events) out.push_back(e.id);
  return out;
}

/// Orders labels with digit runs compared by value: "E2" before "E10".
inline bool label_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  const auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::string_view na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na[0] == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb[0] == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return a.size() - i < b.size() - j;
  return a < b;
}

inline std::vector<std::string> slot_labels(const ConstraintSet& cs, const std::vector<EventId>& slot) {
  std::vector<std::string> labels;
  for (EventId e : slot) labels.push_back(cs.label(e));
  std::sort(labels.begin(), labels.end(), [](const std::string& x, const std::string& y) { return label_less(x, y); });
  return labels;
}

/// Sorts chronologies by slot count, then by their slots' label lists.
inline void sort_canonically(const ConstraintSet& cs, std::vector<Chronology>& list) {
  using Key = std::pair<std::size_t, std::vector<std::vector<std::string>>>;
  std::vector<std::pair<Key, Chronology>> keyed;
  for (Chronology& c : list) {
    Key k{c.slots().size(), {}};
    for (const auto& slot : c.slots()) k.second.push_back(slot_labels(cs, slot));
    keyed.emplace_back(std::move(k), std::move(c));
  }
  const auto slot_less = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                        [](const std::string& p, const std::string& q) { return label_less(p, q); });
  };
  std::sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
    if (x.first.first != y.first.first) return x.first.first < y.first.first;
    return std::lexicographical_compare(x.first.second.begin(), x.first.second.end(),
                                        y.first.second.begin(), y.first.second.end(), slot_less);
  });
  list.clear();
  for (auto& [k, c] : keyed) list.push_back(std::move(c));
}

/// "(E1,E2) → E3"
inline std::string render(const ConstraintSet& cs, const Chronology& c) {
  std::string out;
  for (const auto& slot : c.slots()) {
    const std::vector<std::string> labels = slot_labels(cs, slot);
    if (!out.empty()) out += " → ";
    if (labels.size() == 1) {
      out += labels.front();
    } else {
      out += "(";
      for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? "," : "") + labels[i];
      out += ")";
    }
  }
  return out;
}

struct EnumerationOptions {
  std::size_t max_events = 12;
  bool allow_simultaneity = true;
};

struct BehaviorSet {
  std::vector<Chronology> behaviors;
  std::vector<std::string> notes;
};

namespace detail {

// Groups of events that sit on a cycle of edges (self-loops included).
inline std::vector<std::vector<EventId>> edge_cycles(const ConstraintSet& cs) {
  const std::size_t n = cs.size();
  std::vector<std::vector<std::size_t>> next(n);
  std::vector<bool> self(n, false);
  const auto add = [&](EventId a, EventId b) {
    next[a.value].push_back(b.value);
    if (a == b) self[a.value] = true;
  };
  for (const auto& [a, b] : cs.precedence) add(a, b);
  for (const auto& [a, b] : cs.obligation) add(a, b);

  // Tarjan's strongly connected components.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0;
  std::vector<std::vector<EventId>> out;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : next[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<EventId> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(EventId{static_cast<std::uint32_t>(w)});
      } while (w != v);
      if (comp.size() > 1 || self[v]) {
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

class Enumerator {
 public:
  Enumerator(const ConstraintSet& cs, const std::vector<EventId>& universe, bool simultaneity)
      : cs_(cs), universe_(universe), simultaneity_(simultaneity), pos_(cs.size(), -1),
        flow_succ_(cs.size()), obliges_(cs.size()), conflict_(cs.size()), blocked_(cs.size()) {
    for (const auto& [a, b] : cs.precedence) {
      flow_succ_[a.value].push_back(b);
      mark_conflict(a, b);
    }
    for (const auto& [a, b] : cs.obligation) {
      obliges_[a.value].push_back(b);
      mark_conflict(a, b);
    }
  }

  std::vector<Chronology> run() {
    extend(0);
    return std::move(found_);
  }

 private:
  void mark_conflict(EventId a, EventId b) {
    if (a == b) {
      blocked_[a.value] = true;
      return;
    }
    conflict_[a.value].insert(b);
    conflict_[b.value].insert(a);
  }

  bool enabled(EventId e, long slot) const {
    auto f = cs_.enablement_flow.find(e);
    auto t = cs_.enablement_trigger.find(e);
    const bool has_flow = f != cs_.enablement_flow.end() && !f->second.empty();
    const bool has_trigger = t != cs_.enablement_trigger.end() && !t->second.empty();
    if (!has_flow && !has_trigger) return true;
    if (has_flow) {
      const bool all = std::all_of(f->second.begin(), f->second.end(),
                                   [&](EventId s) { return pos_[s.value] >= 0; });
      if (all) return true;
    }
    if (has_trigger) {
      for (EventId s : t->second) {
        if (pos_[s.value] >= 0 && pos_[s.value] == slot - 1) return true;
      }
    }
    return false;
  }

  // Unplaced events that the previous slot obliges to occur now.
  std::set<EventId> due(long slot) const {
    std::set<EventId> out;
    if (slot == 0) return out;
    for (EventId a : slots_.back()) {
      for (EventId b : obliges_[a.value]) {
        if (pos_[b.value] < 0) out.insert(b);
      }
    }
    return out;
  }

  void extend(long slot) {
    std::vector<EventId> cand;
    for (EventId e : universe_) {
      if (pos_[e.value] >= 0 || blocked_[e.value]) continue;
      const bool successor_placed = std::any_of(flow_succ_[e.value].begin(),
                                                flow_succ_[e.value].end(),
                                                [&](EventId s) { return pos_[s.value] >= 0; });
      if (successor_placed || !enabled(e, slot)) continue;
      cand.push_back(e);
    }
    const std::set<EventId> required = due(slot);
    std::uint64_t required_mask = 0;
    for (EventId r : required) {
      auto it = std::find(cand.begin(), cand.end(), r);
      if (it == cand.end()) return;
      required_mask |= std::uint64_t{1} << (it - cand.begin());
    }
    if (cand.empty()) return;

    const std::uint64_t full = (std::uint64_t{1} << cand.size()) - 1;
    for (std::uint64_t mask = 1; mask <= full; ++mask) {
      if ((mask & required_mask) != required_mask) continue;
      if (!simultaneity_ && (mask & (mask - 1)) != 0) continue;

      std::vector<EventId> chosen;
      bool clash = false;
      for (std::size_t i = 0; i < cand.size() && !clash; ++i) {
        if (!(mask >> i & 1)) continue;
        for (EventId c : chosen) {
          if (conflict_[cand[i].value].count(c)) {
            clash = true;
            break;
          }
        }
        chosen.push_back(cand[i]);
      }
      if (clash) continue;

      for (EventId e : chosen) pos_[e.value] = slot;
      slots_.push_back(chosen);

      bool pending = false;
      for (EventId a : chosen) {
        for (EventId b : obliges_[a.value]) pending = pending || pos_[b.value] < 0;
      }
      if (!pending) found_.emplace_back(slots_);
      extend(slot + 1);

      slots_.pop_back();
      for (EventId e : chosen) pos_[e.value] = -1;
    }
  }

  const ConstraintSet& cs_;
  std::vector<EventId> universe_;
  bool simultaneity_;
  std::vector<long> pos_;
  std::vector<std::vector<EventId>> flow_succ_;
  std::vector<std::vector<EventId>> obliges_;
  std::vector<std::set<EventId>> conflict_;
  std::vector<bool> blocked_;
  std::vector<std::vector<EventId>> slots_;
  std::vector<Chronology> found_;
};

inline std::vector<EventId> checked_universe(const ConstraintSet& cs, std::vector<EventId> events,
                                             std::size_t limit) {
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  for (EventId e : events) {
    if (e.value >= cs.size()) throw Error(Errc::UnknownEvent, "no event with id " + std::to_string(e.value));
  }
  if (events.size() > limit) {
    throw Error(Errc::TooManyEvents, std::to_string(events.size()) + " events exceed the limit of " +
                                         std::to_string(limit));
  }
  return events;
}

}  // namespace detail

/// All non-empty chronologies over subsets of `events` that satisfy `cs`,
/// built slot by slot with pruning, canonically sorted. Events outside
/// `events` are treated as never occurring.
inline BehaviorSet enumerate_behaviors(const ConstraintSet& cs, std::vector<EventId> events,
                                       const EnumerationOptions& options = {}) {
  const std::size_t limit = std::min<std::size_t>(options.max_events, 63);
  const auto universe = detail::checked_universe(cs, std::move(events), limit);

  BehaviorSet out;
  for (const auto& cycle : detail::edge_cycles(cs)) {
    std::string names;
    for (EventId e : cycle) names += (names.empty() ? "" : ", ") + cs.label(e);
    out.notes.push_back("CyclicObligation: " + names + " constrain each other in a cycle");
  }
  out.behaviors = detail::Enumerator(cs, universe, options.allow_simultaneity).run();
  sort_canonically(cs, out.behaviors);
  return out;
}

inline BehaviorSet enumerate_behaviors(const ConstraintSet& cs, const EnumerationOptions& options = {}) {
  return enumerate_behaviors(cs, all_events(cs), options);
}

/// Reference answer by exhaustion: every ordered partition of every
/// non-empty subset of `events`, kept when check_trace accepts it.
inline std::vector<Chronology> brute_force_oracle(const ConstraintSet& cs, std::vector<EventId> events,
                                                  std::size_t limit = 6) {
  const auto universe = detail::checked_universe(cs, std::move(events), limit);
  const std::size_t n = universe.size();
  std::vector<Chronology> out;
  if (n == 0) return out;

  // Each event gets a value in [0, n]; n means absent. Assignments whose used
  // values are exactly 0..k-1 are the ordered partitions, each seen once.
  std::vector<std::size_t> value(n, 0);
  while (true) {
    std::vector<std::vector<EventId>> slots(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (value[i] < n) slots[value[i]].push_back(universe[i]);
    }
    std::size_t used = 0;
    while (used < n && !slots[used].empty()) ++used;
    bool contiguous = used > 0;
    for (std::size_t k = used; k < n && contiguous; ++k) contiguous = slots[k].empty();
    if (contiguous) {
      slots.resize(used);
      Chronology c(std::move(slots));
      if (check_trace(cs, c).accepted) out.push_back(std::move(c));
    }

    std::size_t i = 0;
    while (i < n && value[i] == n) value[i++] = 0;
    if (i == n) break;
    ++value[i];
  }
  sort_canonically(cs, out);
  return out;
}

enum class LinkKind { FlowBased, TriggerBased, ModelerChoice };

inline std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::FlowBased: return "FlowBased";
    case LinkKind::TriggerBased: return "TriggerBased";
    case LinkKind::ModelerChoice: return "ModelerChoice";
  }
  return "?";
}

struct Link {
  std::size_t slot = 0;  // link runs from this slot to the next
  EventId from;
  EventId to;
  LinkKind kind = LinkKind::ModelerChoice;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Labels every pair of events in adjacent slots of an accepted trace by what
/// orders them: a flow edge, else a trigger edge, else the modeler's choice.
inline std::vector<Link> classify_links(const EventGraph& graph, const Chronology& trace) {
  const ConstraintSet cs = derive_constraints(graph);
  const Verdict verdict = check_trace(cs, trace);
  if (!verdict.accepted) {
    throw Error(Errc::TraceNotAccepted, verdict.violations.front().message);
  }
  std::vector<Link> out;
  const auto& slots = trace.slots();
  for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
    for (EventId a : slots[i]) {
      for (EventId b : slots[i + 1]) {
        LinkKind kind = LinkKind::ModelerChoice;
        if (graph.has_edge(a, b, ArcKind::Flow)) kind = LinkKind::FlowBased;
        else if (graph.has_edge(a, b, ArcKind::Trigger)) kind = LinkKind::TriggerBased;
        out.push_back(Link{i, a, b, kind});
      }
    }
  }
  return out;
}

}  // namespace thimac
