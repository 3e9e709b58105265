#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "thimac/error.hpp"

namespace thimac {

// Strongly typed integer identifiers. Values are assigned in insertion order
// starting at zero, so an id doubles as the index into its owning vector.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  friend auto operator<=>(Id, Id) = default;
};

using ThimacId = Id<struct ThimacTag>;
using StageId = Id<struct StageTag>;
using ArcId = Id<struct ArcTag>;

enum class StageKind { Create, Process, Release, Transfer, Receive, Arrive, Accept };
enum class Direction { Input, Output };
enum class ArcKind { Flow, Trigger };

inline constexpr StageKind kAllStageKinds[] = {
    StageKind::Create,  StageKind::Process, StageKind::Release, StageKind::Transfer,
    StageKind::Receive, StageKind::Arrive,  StageKind::Accept,
};

inline std::string_view to_string(StageKind kind) {
  switch (kind) {
    case StageKind::Create: return "create";
    case StageKind::Process: return "process";
    case StageKind::Release: return "release";
    case StageKind::Transfer: return "transfer";
    case StageKind::Receive: return "receive";
    case StageKind::Arrive: return "arrive";
    case StageKind::Accept: return "accept";
  }
  return "?";
}

inline std::string_view to_string(Direction dir) {
  return dir == Direction::Input ? "input" : "output";
}

inline std::string_view to_string(ArcKind kind) {
  return kind == ArcKind::Flow ? "flow" : "trigger";
}

/// Thimac names and keywords compare with the case of the first letter folded:
/// "Workshop" and "workshop" denote the same thing.
inline std::string name_key(std::string_view name) {
  std::string key(name);
  if (!key.empty() && key[0] >= 'A' && key[0] <= 'Z') key[0] = static_cast<char>(key[0] - 'A' + 'a');
  return key;
}

inline std::optional<StageKind> stage_kind_from_keyword(std::string_view word) {
  const std::string key = name_key(word);
  for (StageKind kind : kAllStageKinds) {
    if (key == to_string(kind)) return kind;
  }
  return std::nullopt;
}

inline std::optional<Direction> direction_from_keyword(std::string_view word) {
  const std::string key = name_key(word);
  if (key == "input") return Direction::Input;
  if (key == "output") return Direction::Output;
  return std::nullopt;
}

inline std::optional<ArcKind> arc_kind_from_string(std::string_view word) {
  if (word == "flow") return ArcKind::Flow;
  if (word == "trigger") return ArcKind::Trigger;
  return std::nullopt;
}

struct Thimac {
  ThimacId id;
  std::string name;
  std::optional<ThimacId> parent;
  std::vector<StageId> stages;  // sorted

  friend bool operator==(const Thimac&, const Thimac&) = default;
};

struct Stage {
  StageId id;
  ThimacId owner;
  StageKind kind = StageKind::Create;
  std::optional<Direction> direction;  // Transfer only

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct Arc {
  ArcId id;
  ArcKind kind = ArcKind::Flow;
  StageId from;
  StageId to;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Returns the violated rule when a flow arc `from -> to` is not allowed by the
/// stage succession, or nullopt when the pair is legal.
///
/// Within one thimac a thing moves create/receive -> process -> release ->
/// transfer, with arrive/accept refining receive. Between thimacs only
/// transfer -> transfer is allowed, from the output side to the input side
/// when directions are given.
inline std::optional<std::string> flow_violation(const Stage& from, const Stage& to) {
  const auto sends = [](const Stage& s) {
    return s.kind == StageKind::Transfer && s.direction != Direction::Input;
  };
  const auto takes_in = [](const Stage& s) {
    return s.kind == StageKind::Transfer && s.direction != Direction::Output;
  };

  if (from.owner != to.owner) {
    if (sends(from) && takes_in(to)) return std::nullopt;
    return std::string("between thimacs only transfer(output) -> transfer(input) is allowed");
  }

  bool legal = false;
  std::string_view rule;
  switch (from.kind) {
    case StageKind::Create:
      legal = to.kind == StageKind::Process || to.kind == StageKind::Release;
      rule = "create -> {process, release}";
      break;
    case StageKind::Receive:
      legal = to.kind == StageKind::Process || to.kind == StageKind::Release || sends(to);
      rule = "receive -> {process, release, transfer(output)}";
      break;
    case StageKind::Arrive:
      legal = to.kind == StageKind::Accept || to.kind == StageKind::Release;
      rule = "arrive -> {accept, release}";
      break;
    case StageKind::Accept:
      legal = to.kind == StageKind::Process || to.kind == StageKind::Release;
      rule = "accept -> {process, release}";
      break;
    case StageKind::Process:
      legal = to.kind == StageKind::Release;
      rule = "process -> {release}";
      break;
    case StageKind::Release:
      legal = sends(to);
      rule = "release -> {transfer(output)}";
      break;
    case StageKind::Transfer:
      legal = takes_in(from) && (to.kind == StageKind::Receive || to.kind == StageKind::Arrive);
      rule = "transfer(input) -> {receive, arrive}";
      break;
  }
  if (legal) return std::nullopt;
  return std::string(rule);
}

/// The static description: thimacs in a containment forest, their stages,
/// and flow/trigger arcs between stages. Built through the add_* operations,
/// which reject anything validate_model() would report as an error.
class StaticModel {
 public:
  StaticModel() = default;

  /// Assembles a model from raw records without enforcing structural rules;
  /// only positional ids are required. Deserializers use this so that
  /// validate_model() can report what is wrong with the input.
  static StaticModel from_parts(std::vector<Thimac> thimacs, std::vector<Stage> stages,
                                std::vector<Arc> arcs) {
    StaticModel model;
    for (std::size_t i = 0; i < thimacs.size(); ++i) {
      if (thimacs[i].id.value != i) throw Error(Errc::InvalidModel, "thimac ids must be positional");
      thimacs[i].stages.clear();
    }
    for (std::size_t i = 0; i < stages.size(); ++i) {
      if (stages[i].id.value != i) throw Error(Errc::InvalidModel, "stage ids must be positional");
      if (stages[i].owner.value < thimacs.size()) {
        thimacs[stages[i].owner.value].stages.push_back(stages[i].id);
      }
    }
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].id.value != i) throw Error(Errc::InvalidModel, "arc ids must be positional");
    }
    model.thimacs_ = std::move(thimacs);
    model.stages_ = std::move(stages);
    model.arcs_ = std::move(arcs);
    return model;
  }

  ThimacId add_thimac(std::string name, std::optional<ThimacId> parent = std::nullopt) {
    if (parent && !has_thimac(*parent)) {
      throw Error(Errc::UnknownParent, "no thimac with id " + std::to_string(parent->value));
    }
    if (find_thimac(parent, name)) {
      throw Error(Errc::DuplicateName, "'" + name + "' already exists under the same parent");
    }
    const ThimacId id{static_cast<std::uint32_t>(thimacs_.size())};
    thimacs_.push_back(Thimac{id, std::move(name), parent, {}});
    return id;
  }

  StageId add_stage(ThimacId owner, StageKind kind,
                    std::optional<Direction> direction = std::nullopt) {
    if (!has_thimac(owner)) {
      throw Error(Errc::UnknownThimac, "no thimac with id " + std::to_string(owner.value));
    }
    if (direction && kind != StageKind::Transfer) {
      throw Error(Errc::DirectionOnNonTransfer,
                  std::string(to_string(kind)) + " cannot carry a direction marker");
    }
    if (find_stage(owner, kind, direction)) {
      throw Error(Errc::DuplicateStage, "thimac '" + thimacs_[owner.value].name +
                                            "' already has this stage");
    }
    if (auto clash = receive_clash(owner, kind)) {
      throw Error(Errc::MixedReceiveRefinement,
                  "thimac '" + thimacs_[owner.value].name + "' already uses " +
                      std::string(to_string(*clash)));
    }
    const StageId id{static_cast<std::uint32_t>(stages_.size())};
    stages_.push_back(Stage{id, owner, kind, direction});
    thimacs_[owner.value].stages.push_back(id);
    return id;
  }

  ArcId add_flow(StageId from, StageId to) {
    require_stage(from);
    require_stage(to);
    if (auto rule = flow_violation(stage(from), stage(to))) {
      throw Error(Errc::IllegalFlowPair, "flow " + std::to_string(from.value) + " -> " +
                                             std::to_string(to.value) + " breaks " + *rule);
    }
    return push_arc(ArcKind::Flow, from, to);
  }

  ArcId add_trigger(StageId from, StageId to) {
    require_stage(from);
    require_stage(to);
    return push_arc(ArcKind::Trigger, from, to);
  }

  const std::vector<Thimac>& thimacs() const { return thimacs_; }
  const std::vector<Stage>& stages() const { return stages_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return thimacs_.empty() && stages_.empty() && arcs_.empty(); }

  bool has_thimac(ThimacId id) const { return id.value < thimacs_.size(); }
  bool has_stage(StageId id) const { return id.value < stages_.size(); }
  bool has_arc(ArcId id) const { return id.value < arcs_.size(); }

  const Thimac& thimac(ThimacId id) const {
    if (!has_thimac(id)) throw Error(Errc::UnknownThimac, "no thimac with id " + std::to_string(id.value));
    return thimacs_[id.value];
  }
  const Stage& stage(StageId id) const {
    require_stage(id);
    return stages_[id.value];
  }
  const Arc& arc(ArcId id) const {
    if (!has_arc(id)) throw Error(Errc::InvalidModel, "no arc with id " + std::to_string(id.value));
    return arcs_[id.value];
  }

  std::optional<ThimacId> find_thimac(std::optional<ThimacId> parent, std::string_view name) const {
    const std::string key = name_key(name);
    for (const Thimac& t : thimacs_) {
      if (t.parent == parent && name_key(t.name) == key) return t.id;
    }
    return std::nullopt;
  }

  std::optional<StageId> find_stage(ThimacId owner, StageKind kind,
                                    std::optional<Direction> direction = std::nullopt) const {
    if (!has_thimac(owner)) return std::nullopt;
    for (StageId sid : thimacs_[owner.value].stages) {
      const Stage& s = stages_[sid.value];
      if (s.kind == kind && s.direction == direction) return sid;
    }
    return std::nullopt;
  }

  std::optional<ArcId> find_arc(ArcKind kind, StageId from, StageId to) const {
    for (const Arc& a : arcs_) {
      if (a.kind == kind && a.from == from && a.to == to) return a.id;
    }
    return std::nullopt;
  }

  std::vector<ThimacId> children(std::optional<ThimacId> parent) const {
    std::vector<ThimacId> out;
    for (const Thimac& t : thimacs_) {
      if (t.parent == parent) out.push_back(t.id);
    }
    return out;
  }

  friend bool operator==(const StaticModel&, const StaticModel&) = default;

 private:
  void require_stage(StageId id) const {
    if (!has_stage(id)) throw Error(Errc::UnknownStage, "no stage with id " + std::to_string(id.value));
  }

  // Receive and its arrive/accept refinement are mutually exclusive per thimac.
  std::optional<StageKind> receive_clash(ThimacId owner, StageKind kind) const {
    const bool refined = kind == StageKind::Arrive || kind == StageKind::Accept;
    if (kind != StageKind::Receive && !refined) return std::nullopt;
    for (StageId sid : thimacs_[owner.value].stages) {
      const StageKind other = stages_[sid.value].kind;
      if (kind == StageKind::Receive && (other == StageKind::Arrive || other == StageKind::Accept)) {
        return other;
      }
      if (refined && other == StageKind::Receive) return other;
    }
    return std::nullopt;
  }

  ArcId push_arc(ArcKind kind, StageId from, StageId to) {
    const ArcId id{static_cast<std::uint32_t>(arcs_.size())};
    arcs_.push_back(Arc{id, kind, from, to});
    return id;
  }

  std::vector<Thimac> thimacs_;
  std::vector<Stage> stages_;
  std::vector<Arc> arcs_;
};

/// Dotted containment path, e.g. "Apollo.temple.statue". The anonymous
/// context thimac (empty name) contributes nothing.
inline std::string thimac_path(const StaticModel& model, ThimacId id) {
  std::vector<std::string_view> parts;
  std::set<std::uint32_t> seen;
  std::optional<ThimacId> cur = id;
  while (cur && model.has_thimac(*cur) && seen.insert(cur->value).second) {
    const Thimac& t = model.thimac(*cur);
    if (!t.name.empty()) parts.push_back(t.name);
    cur = t.parent;
  }
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out.empty()) out += '.';
    out += *it;
  }
  return out;
}

/// Stage reference as written in TM text, e.g. "Water.transfer.input".
inline std::string stage_path(const StaticModel& model, StageId id) {
  const Stage& s = model.stage(id);
  std::string out = model.has_thimac(s.owner) ? thimac_path(model, s.owner) : "?";
  if (!out.empty()) out += '.';
  out += to_string(s.kind);
  if (s.direction) {
    out += '.';
    out += to_string(*s.direction);
  }
  return out;
}

/// Resolves a stage reference such as "Grass.wet.create" or
/// "Multiply.transfer.input" against existing thimacs and stages.
inline StageId resolve_stage_path(const StaticModel& model, std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    parts.push_back(path.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                     : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  const auto fail = [&](const std::string& why) {
    return Error(Errc::UnknownStage, "'" + std::string(path) + "': " + why);
  };

  std::optional<Direction> direction;
  if (parts.size() >= 2) {
    if (auto d = direction_from_keyword(parts.back())) {
      direction = d;
      parts.pop_back();
    }
  }
  const auto kind = stage_kind_from_keyword(parts.back());
  if (!kind) throw fail("does not end in a stage keyword");
  parts.pop_back();

  std::optional<ThimacId> owner;
  if (parts.empty()) {
    owner = model.find_thimac(std::nullopt, "");
    if (!owner) throw fail("no anonymous thimac");
  }
  for (std::string_view name : parts) {
    owner = model.find_thimac(owner, name);
    if (!owner) throw fail("no thimac '" + std::string(name) + "'");
  }
  if (auto sid = model.find_stage(*owner, *kind, direction)) return *sid;
  throw fail("thimac has no such stage");
}

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string location;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace detail {

inline std::string thimac_loc(const StaticModel& m, ThimacId id) {
  return "thimac#" + std::to_string(id.value) + " " + thimac_path(m, id);
}

inline std::string stage_loc(const StaticModel& m, StageId id) {
  std::string loc = "stage#" + std::to_string(id.value);
  const Stage& s = m.stages()[id.value];
  if (m.has_thimac(s.owner)) loc += " " + stage_path(m, id);
  return loc;
}

inline std::string arc_loc(ArcId id) { return "arc#" + std::to_string(id.value); }

// True when the flow arcs restricted to one thimac's own stages form a cycle.
inline bool has_intra_cycle(const StaticModel& m, const Thimac& t) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> next;
  for (const Arc& a : m.arcs()) {
    if (a.kind != ArcKind::Flow || !m.has_stage(a.from) || !m.has_stage(a.to)) continue;
    if (m.stage(a.from).owner == t.id && m.stage(a.to).owner == t.id) {
      next[a.from.value].push_back(a.to.value);
    }
  }
  // 0 = unvisited, 1 = on stack, 2 = done
  std::map<std::uint32_t, int> state;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (StageId root : t.stages) {
    if (state[root.value] != 0) continue;
    stack.push_back({root.value, 0});
    state[root.value] = 1;
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      const auto& succ = next[node];
      if (idx < succ.size()) {
        const std::uint32_t n = succ[idx++];
        if (state[n] == 1) return true;
        if (state[n] == 0) {
          state[n] = 1;
          stack.push_back({n, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace detail

/// Reports every structural problem in `model`. Errors: dangling ids,
/// containment cycles, duplicate sibling names, duplicate or malformed
/// stages, illegal flow pairs. Warnings: repeated arcs, self-triggers, flow
/// cycles inside a single thimac, stages unreachable from any create/transfer
/// entry stage.
/// Errors precede warnings; within a category the order follows ids.
inline std::vector<Diagnostic> validate_model(const StaticModel& model) {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
  const auto error = [&](std::string code, std::string loc, std::string msg) {
    errors.push_back({Severity::Error, std::move(code), std::move(loc), std::move(msg)});
  };
  const auto warn = [&](std::string code, std::string loc, std::string msg) {
    warnings.push_back({Severity::Warning, std::move(code), std::move(loc), std::move(msg)});
  };

  const auto& thimacs = model.thimacs();
  const auto& stages = model.stages();
  const auto& arcs = model.arcs();

  // Containment.
  for (const Thimac& t : thimacs) {
    if (t.parent && !model.has_thimac(*t.parent)) {
      error("DanglingId", "thimac#" + std::to_string(t.id.value),
            "parent " + std::to_string(t.parent->value) + " does not exist");
    }
  }
  std::set<std::uint32_t> reported_cycle;
  for (const Thimac& t : thimacs) {
    std::vector<std::uint32_t> chain;
    std::set<std::uint32_t> seen;
    std::optional<ThimacId> cur = t.id;
    while (cur && model.has_thimac(*cur) && seen.insert(cur->value).second) {
      chain.push_back(cur->value);
      cur = model.thimac(*cur).parent;
    }
    if (cur && model.has_thimac(*cur) && cur->value == t.id.value) {
      const std::uint32_t lowest = *std::min_element(chain.begin(), chain.end());
      if (reported_cycle.insert(lowest).second) {
        error("ContainmentCycle", "thimac#" + std::to_string(lowest),
              "thimac is its own ancestor");
      }
    }
  }
  {
    std::map<std::pair<std::int64_t, std::string>, ThimacId> first;
    for (const Thimac& t : thimacs) {
      const std::int64_t parent = t.parent ? static_cast<std::int64_t>(t.parent->value) : -1;
      auto [it, inserted] = first.try_emplace({parent, name_key(t.name)}, t.id);
      if (!inserted) {
        error("DuplicateName", "thimac#" + std::to_string(t.id.value),
              "name '" + t.name + "' repeats thimac#" + std::to_string(it->second.value));
      }
    }
  }

  // Stages.
  {
    std::map<std::tuple<std::uint32_t, int, int>, StageId> first;
    std::map<std::uint32_t, std::set<StageKind>> kinds;
    for (const Stage& s : stages) {
      if (!model.has_thimac(s.owner)) {
        error("DanglingId", "stage#" + std::to_string(s.id.value),
              "owner " + std::to_string(s.owner.value) + " does not exist");
        continue;
      }
      if (s.direction && s.kind != StageKind::Transfer) {
        error("DirectionOnNonTransfer", detail::stage_loc(model, s.id),
              "only transfer stages carry input/output markers");
      }
      const int dir = s.direction ? static_cast<int>(*s.direction) : -1;
      auto [it, inserted] =
          first.try_emplace({s.owner.value, static_cast<int>(s.kind), dir}, s.id);
      if (!inserted) {
        error("DuplicateStage", detail::stage_loc(model, s.id),
              "repeats stage#" + std::to_string(it->second.value));
      }
      kinds[s.owner.value].insert(s.kind);
    }
    for (const auto& [owner, set] : kinds) {
      if (set.count(StageKind::Receive) &&
          (set.count(StageKind::Arrive) || set.count(StageKind::Accept))) {
        error("MixedReceiveRefinement", detail::thimac_loc(model, ThimacId{owner}),
              "receive is combined with its arrive/accept refinement");
      }
    }
  }

  // Arcs.
  std::map<std::tuple<int, std::uint32_t, std::uint32_t>, ArcId> first_arc;
  for (const Arc& a : arcs) {
    if (!model.has_stage(a.from) || !model.has_stage(a.to)) {
      error("DanglingId", detail::arc_loc(a.id), "endpoint stage does not exist");
      continue;
    }
    auto [it, inserted] =
        first_arc.try_emplace({static_cast<int>(a.kind), a.from.value, a.to.value}, a.id);
    if (!inserted) {
      warn("DuplicateArc", detail::arc_loc(a.id), "repeats arc#" + std::to_string(it->second.value));
    }
    if (a.kind == ArcKind::Flow) {
      if (auto rule = flow_violation(model.stage(a.from), model.stage(a.to))) {
        error("IllegalFlowPair", detail::arc_loc(a.id),
              stage_path(model, a.from) + " -> " + stage_path(model, a.to) + " breaks " + *rule);
      }
    } else if (a.from == a.to) {
      warn("SelfTrigger", detail::arc_loc(a.id), stage_path(model, a.from) + " triggers itself");
    }
  }

  for (const Thimac& t : thimacs) {
    if (detail::has_intra_cycle(model, t)) {
      warn("IntraMachineFlowCycle", detail::thimac_loc(model, t.id),
           "flow arcs cycle among the stages of one thimac");
    }
  }

  // Reachability from entry stages along flow and trigger arcs.
  std::vector<bool> reached(stages.size(), false);
  std::vector<std::uint32_t> frontier;
  for (const Stage& s : stages) {
    const bool entry = s.kind == StageKind::Create ||
                       (s.kind == StageKind::Transfer && s.direction != Direction::Output);
    if (entry) {
      reached[s.id.value] = true;
      frontier.push_back(s.id.value);
    }
  }
  std::map<std::uint32_t, std::vector<std::uint32_t>> next;
  for (const Arc& a : arcs) {
    if (model.has_stage(a.from) && model.has_stage(a.to)) next[a.from.value].push_back(a.to.value);
  }
  while (!frontier.empty()) {
    const std::uint32_t cur = frontier.back();
    frontier.pop_back();
    for (std::uint32_t n : next[cur]) {
      if (!reached[n]) {
        reached[n] = true;
        frontier.push_back(n);
      }
    }
  }
  for (const Stage& s : stages) {
    if (!reached[s.id.value] && model.has_thimac(s.owner)) {
      warn("UnreachableStage", detail::stage_loc(model, s.id),
           "no create or transfer stage leads here");
    }
  }

  errors.insert(errors.end(), warnings.begin(), warnings.end());
  return errors;
}

}  // namespace thimac
