#pragma once

// Bounded token flow over a static model. One stage per token per tick.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "thimac/behavior.hpp"

namespace thimac {

struct SourceSpec {
  StageId stage;
  std::size_t tick = 0;

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

struct SimulationOptions {
  std::size_t max_ticks = 64;
  // Off: a token leaves by its lowest-id flow arc. On: it also forks a new
  // token onto every other outgoing flow arc.
  bool fork_at_fanout = false;
};

struct Occupation {
  std::uint32_t token = 0;
  StageId stage;

  friend auto operator<=>(const Occupation&, const Occupation&) = default;
};

struct TickRecord {
  std::size_t tick = 0;
  std::vector<Occupation> occupations;  // sorted by token id
  std::vector<ArcId> fired;             // trigger arcs fired this tick

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct Trace {
  std::vector<TickRecord> ticks;

  friend bool operator==(const Trace&, const Trace&) = default;
};

inline bool is_source_stage(const Stage& s) {
  return s.kind == StageKind::Create ||
         (s.kind == StageKind::Transfer && s.direction == Direction::Input);
}

inline Trace simulate(const StaticModel& model, const std::vector<SourceSpec>& sources,
                      const SimulationOptions& options = {}) {
  if (has_errors(validate_model(model))) throw Error(Errc::InvalidModel, "model has validation errors");
  if (options.max_ticks < 1) throw Error(Errc::InvalidArgument, "max_ticks must be at least 1");
  for (const SourceSpec& src : sources) {
    if (!model.has_stage(src.stage)) {
      throw Error(Errc::UnknownStage, "no stage with id " + std::to_string(src.stage.value));
    }
    if (!is_source_stage(model.stage(src.stage))) {
      throw Error(Errc::InvalidSourceStage,
                  stage_path(model, src.stage) + " is neither a create nor an input transfer stage");
    }
  }

  std::map<StageId, std::vector<const Arc*>> flows_out;
  std::map<StageId, std::vector<const Arc*>> triggers_out;
  for (const Arc& a : model.arcs()) {
    (a.kind == ArcKind::Flow ? flows_out : triggers_out)[a.from].push_back(&a);
  }
  // arcs() is in id order, so each list is already sorted by arc id.

  Trace trace;
  std::vector<Occupation> alive;
  std::uint32_t next_token = 0;

  for (std::size_t t = 0; t < options.max_ticks; ++t) {
    TickRecord rec{t, {}, {}};

    for (const Occupation& occ : alive) {
      auto out = flows_out.find(occ.stage);
      if (out == flows_out.end()) continue;
      rec.occupations.push_back({occ.token, out->second.front()->to});
      if (options.fork_at_fanout) {
        for (std::size_t i = 1; i < out->second.size(); ++i) {
          rec.occupations.push_back({next_token++, out->second[i]->to});
        }
      }
    }

    std::set<StageId> previously;
    for (const Occupation& occ : alive) previously.insert(occ.stage);
    for (StageId s : previously) {
      auto out = triggers_out.find(s);
      if (out == triggers_out.end()) continue;
      for (const Arc* a : out->second) rec.fired.push_back(a->id);
    }
    std::sort(rec.fired.begin(), rec.fired.end());
    for (ArcId id : rec.fired) rec.occupations.push_back({next_token++, model.arc(id).to});

    for (const SourceSpec& src : sources) {
      if (src.tick == t) rec.occupations.push_back({next_token++, src.stage});
    }

    const bool future = std::any_of(sources.begin(), sources.end(),
                                    [&](const SourceSpec& s) { return s.tick > t; });
    if (rec.occupations.empty() && rec.fired.empty() && !future) break;

    std::sort(rec.occupations.begin(), rec.occupations.end());
    alive = rec.occupations;
    trace.ticks.push_back(std::move(rec));
  }
  return trace;
}

/// An event occurs at the first tick any stage of its region is occupied.
/// Ticks in which no event starts are dropped.
inline Chronology trace_to_chronology(const Trace& trace, const DynamicModel& dyn) {
  const StaticModel& host = dyn.host();
  std::map<StageId, std::vector<EventId>> owners;
  for (const Event& e : dyn.events()) {
    for (StageId s : e.region.stages) owners[s].push_back(e.id);
  }

  std::set<EventId> seen;
  std::vector<std::vector<EventId>> slots;
  for (const TickRecord& rec : trace.ticks) {
    std::set<EventId> fresh;
    for (const Occupation& occ : rec.occupations) {
      if (!host.has_stage(occ.stage)) {
        throw Error(Errc::ForeignStage, "trace occupies stage " + std::to_string(occ.stage.value) +
                                            " which is not in the host model");
      }
      auto it = owners.find(occ.stage);
      if (it == owners.end()) continue;
      for (EventId e : it->second) {
        if (!seen.count(e)) fresh.insert(e);
      }
    }
    if (fresh.empty()) continue;
    seen.insert(fresh.begin(), fresh.end());
    slots.emplace_back(fresh.begin(), fresh.end());
  }
  if (slots.empty()) throw Error(Errc::EmptyChronology, "no event region was entered");
  return Chronology(std::move(slots));
}

}  // namespace thimac
