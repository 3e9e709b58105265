#pragma once

// JSON reading and writing for models, events, traces and results.
// Model records come out in id order with keys in schema order.

#include <string>
#include <vector>

#include "json.hpp"

#include "thimac/simulator.hpp"

namespace thimac {

using Json = nlohmann::json;

/// Malformed JSON input. `pointer()` is a JSON pointer to the offending value.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error(Errc::SchemaError, (pointer.empty() ? std::string("/") : pointer) + ": " + message),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

namespace detail {

inline const Json& member(const Json& obj, const std::string& key, const std::string& at) {
  if (!obj.is_object()) throw SchemaError(at, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(at + "/" + key, "missing");
  return *it;
}

inline const Json& array_at(const Json& obj, const std::string& key, const std::string& at) {
  const Json& v = member(obj, key, at);
  if (!v.is_array()) throw SchemaError(at + "/" + key, "expected an array");
  return v;
}

inline std::uint32_t index_at(const Json& v, const std::string& at) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw SchemaError(at, "expected a non-negative integer");
  }
  const auto n = v.get<unsigned long long>();
  if (n > 0xffffffffull) throw SchemaError(at, "id out of range");
  return static_cast<std::uint32_t>(n);
}

inline std::string string_at(const Json& v, const std::string& at) {
  if (!v.is_string()) throw SchemaError(at, "expected a string");
  return v.get<std::string>();
}

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("not valid JSON: ") + e.what());
  }
}

}  // namespace detail

inline nlohmann::ordered_json model_to_json(const StaticModel& model) {
  using Json = nlohmann::ordered_json;
  Json out = {{"thimacs", Json::array()}, {"stages", Json::array()}, {"arcs", Json::array()}};
  for (const Thimac& t : model.thimacs()) {
    out["thimacs"].push_back({{"id", t.id.value},
                              {"name", t.name},
                              {"parent", t.parent ? Json(t.parent->value) : Json(nullptr)}});
  }
  for (const Stage& s : model.stages()) {
    out["stages"].push_back({{"id", s.id.value},
                             {"owner", s.owner.value},
                             {"kind", to_string(s.kind)},
                             {"direction", s.direction ? Json(to_string(*s.direction)) : Json(nullptr)}});
  }
  for (const Arc& a : model.arcs()) {
    out["arcs"].push_back(
        {{"id", a.id.value}, {"kind", to_string(a.kind)}, {"from", a.from.value}, {"to", a.to.value}});
  }
  return out;
}

inline std::string model_to_json_text(const StaticModel& model) { return model_to_json(model).dump(); }

/// Reads the interchange form. Ids must equal record positions and every
/// reference must resolve; structural rules are left to validate_model().
inline StaticModel model_from_json(const Json& doc) {
  using namespace detail;
  const Json& jt = array_at(doc, "thimacs", "");
  const Json& js = array_at(doc, "stages", "");
  const Json& ja = array_at(doc, "arcs", "");

  const auto positional = [](const Json& rec, std::size_t i, const std::string& at) {
    if (index_at(member(rec, "id", at), at + "/id") != i) {
      throw SchemaError(at + "/id", "expected id " + std::to_string(i));
    }
  };
  const auto ref = [](const Json& v, std::size_t limit, const std::string& at) {
    const std::uint32_t n = index_at(v, at);
    if (n >= limit) throw SchemaError(at, "dangling reference " + std::to_string(n));
    return n;
  };

  std::vector<Thimac> thimacs;
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string at = "/thimacs/" + std::to_string(i);
    positional(jt[i], i, at);
    Thimac t;
    t.id = ThimacId{static_cast<std::uint32_t>(i)};
    t.name = string_at(member(jt[i], "name", at), at + "/name");
    const Json& p = member(jt[i], "parent", at);
    if (!p.is_null()) t.parent = ThimacId{ref(p, jt.size(), at + "/parent")};
    thimacs.push_back(std::move(t));
  }

  std::vector<Stage> stages;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string at = "/stages/" + std::to_string(i);
    positional(js[i], i, at);
    Stage s;
    s.id = StageId{static_cast<std::uint32_t>(i)};
    s.owner = ThimacId{ref(member(js[i], "owner", at), jt.size(), at + "/owner")};
    const std::string kind = string_at(member(js[i], "kind", at), at + "/kind");
    auto k = stage_kind_from_keyword(kind);
    if (!k || kind != to_string(*k)) throw SchemaError(at + "/kind", "unknown stage kind '" + kind + "'");
    s.kind = *k;
    const Json& d = member(js[i], "direction", at);
    if (!d.is_null()) {
      const std::string dir = string_at(d, at + "/direction");
      auto parsed = direction_from_keyword(dir);
      if (!parsed || dir != to_string(*parsed)) {
        throw SchemaError(at + "/direction", "unknown direction '" + dir + "'");
      }
      s.direction = *parsed;
    }
    stages.push_back(s);
  }

  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string at = "/arcs/" + std::to_string(i);
    positional(ja[i], i, at);
    Arc a;
    a.id = ArcId{static_cast<std::uint32_t>(i)};
    const std::string kind = string_at(member(ja[i], "kind", at), at + "/kind");
    auto k = arc_kind_from_string(kind);
    if (!k) throw SchemaError(at + "/kind", "unknown arc kind '" + kind + "'");
    a.kind = *k;
    a.from = StageId{ref(member(ja[i], "from", at), js.size(), at + "/from")};
    a.to = StageId{ref(member(ja[i], "to", at), js.size(), at + "/to")};
    arcs.push_back(a);
  }
  return StaticModel::from_parts(std::move(thimacs), std::move(stages), std::move(arcs));
}

inline StaticModel model_from_json_text(const std::string& text) {
  return model_from_json(detail::parse_text(text));
}

/// Events file: [{"label": "E1", "stages": [0, "Grass.wet.create"], "description": "..."}].
/// A stage is given by id or by its dotted path.
inline DynamicModel events_from_json(StaticModel host, const Json& doc) {
  using namespace detail;
  if (!doc.is_array()) throw SchemaError("", "expected an array of events");
  DynamicModel dyn(std::move(host));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = "/" + std::to_string(i);
    const std::string label = string_at(member(doc[i], "label", at), at + "/label");
    const Json& list = array_at(doc[i], "stages", at);
    std::set<StageId> stages;
    for (std::size_t j = 0; j < list.size(); ++j) {
      const std::string sat = at + "/stages/" + std::to_string(j);
      if (list[j].is_string()) {
        try {
          stages.insert(resolve_stage_path(dyn.host(), list[j].get<std::string>()));
        } catch (const Error& e) {
          throw SchemaError(sat, e.what());
        }
      } else {
        stages.insert(StageId{index_at(list[j], sat)});
      }
    }
    std::string description;
    if (doc[i].contains("description")) {
      description = string_at(doc[i]["description"], at + "/description");
    }
    dyn.define_event(label, stages, std::move(description));
  }
  return dyn;
}

inline Json events_to_json(const DynamicModel& dyn) {
  Json out = Json::array();
  for (const Event& e : dyn.events()) {
    Json stages = Json::array();
    for (StageId s : e.region.stages) stages.push_back(s.value);
    Json rec = {{"label", e.label}, {"stages", stages}};
    if (!e.description.empty()) rec["description"] = e.description;
    out.push_back(std::move(rec));
  }
  return out;
}

inline Json chronology_to_json(const ConstraintSet& cs, const Chronology& c) {
  Json slots = Json::array();
  for (const auto& slot : c.slots()) slots.push_back(slot_labels(cs, slot));
  return Json{{"slots", slots}};
}

/// Trace file: {"slots": [["E1", "E2"], ["E3"]]}.
inline Chronology chronology_from_json(const ConstraintSet& cs, const Json& doc) {
  using namespace detail;
  const Json& slots = array_at(doc, "slots", "");
  std::vector<std::vector<EventId>> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::string at = "/slots/" + std::to_string(i);
    if (!slots[i].is_array()) throw SchemaError(at, "expected an array of labels");
    std::vector<EventId> slot;
    for (std::size_t j = 0; j < slots[i].size(); ++j) {
      const std::string label = string_at(slots[i][j], at + "/" + std::to_string(j));
      auto id = cs.find(label);
      if (!id) throw SchemaError(at + "/" + std::to_string(j), "unknown event '" + label + "'");
      slot.push_back(*id);
    }
    out.push_back(std::move(slot));
  }
  return Chronology(std::move(out));
}

inline Json behaviors_to_json(const ConstraintSet& cs, const std::vector<Chronology>& list) {
  Json out = Json::array();
  for (const Chronology& c : list) out.push_back(chronology_to_json(cs, c));
  return out;
}

inline std::vector<Chronology> behaviors_from_json(const ConstraintSet& cs, const Json& doc) {
  if (!doc.is_array()) throw SchemaError("", "expected an array of chronologies");
  std::vector<Chronology> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      out.push_back(chronology_from_json(cs, doc[i]));
    } catch (const SchemaError& e) {
      throw SchemaError("/" + std::to_string(i) + e.pointer(), e.what());
    }
  }
  return out;
}

/// Sources file: [{"stage": "Rain.create", "tick": 0}]; stage by path or id.
inline std::vector<SourceSpec> sources_from_json(const StaticModel& model, const Json& doc) {
  using namespace detail;
  if (!doc.is_array()) throw SchemaError("", "expected an array of sources");
  std::vector<SourceSpec> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = "/" + std::to_string(i);
    const Json& s = member(doc[i], "stage", at);
    SourceSpec spec;
    if (s.is_string()) {
      try {
        spec.stage = resolve_stage_path(model, s.get<std::string>());
      } catch (const Error& e) {
        throw SchemaError(at + "/stage", e.what());
      }
    } else {
      spec.stage = StageId{index_at(s, at + "/stage")};
    }
    if (doc[i].contains("tick")) spec.tick = index_at(doc[i]["tick"], at + "/tick");
    out.push_back(spec);
  }
  return out;
}

inline Json trace_to_json(const Trace& trace) {
  Json ticks = Json::array();
  for (const TickRecord& rec : trace.ticks) {
    Json occ = Json::array();
    for (const Occupation& o : rec.occupations) occ.push_back({o.token, o.stage.value});
    Json fired = Json::array();
    for (ArcId a : rec.fired) fired.push_back(a.value);
    ticks.push_back({{"occupations", occ}, {"fired", fired}});
  }
  return Json{{"ticks", ticks}};
}

inline Trace trace_from_json(const Json& doc) {
  using namespace detail;
  const Json& ticks = array_at(doc, "ticks", "");
  Trace out;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const std::string at = "/ticks/" + std::to_string(i);
    TickRecord rec;
    rec.tick = i;
    const Json& occ = array_at(ticks[i], "occupations", at);
    for (std::size_t j = 0; j < occ.size(); ++j) {
      const std::string oat = at + "/occupations/" + std::to_string(j);
      if (!occ[j].is_array() || occ[j].size() != 2) throw SchemaError(oat, "expected [token, stage]");
      rec.occupations.push_back({index_at(occ[j][0], oat + "/0"), StageId{index_at(occ[j][1], oat + "/1")}});
    }
    const Json& fired = array_at(ticks[i], "fired", at);
    for (std::size_t j = 0; j < fired.size(); ++j) {
      rec.fired.push_back(ArcId{index_at(fired[j], at + "/fired/" + std::to_string(j))});
    }
    out.ticks.push_back(std::move(rec));
  }
  return out;
}

inline Json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  Json out = Json::array();
  for (const Diagnostic& d : diags) {
    out.push_back({{"severity", d.severity == Severity::Error ? "error" : "warning"},
                   {"code", d.code},
                   {"location", d.location},
                   {"message", d.message}});
  }
  return out;
}

inline Json verdict_to_json(const ConstraintSet& cs, const Verdict& v) {
  Json list = Json::array();
  for (const Violation& x : v.violations) {
    std::vector<std::string> events;
    for (EventId e : x.events) events.push_back(cs.label(e));
    list.push_back({{"kind", to_string(x.kind)}, {"events", events}, {"slots", x.slots}, {"message", x.message}});
  }
  return Json{{"accepted", v.accepted}, {"violations", list}};
}

inline Json links_to_json(const ConstraintSet& cs, const std::vector<Link>& links) {
  Json out = Json::array();
  for (const Link& l : links) {
    out.push_back({{"slot", l.slot}, {"from", cs.label(l.from)}, {"to", cs.label(l.to)}, {"kind", to_string(l.kind)}});
  }
  return out;
}

}  // namespace thimac
