// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>

#include "cli.hpp"
#include "test_support.hpp"

using namespace thimac;
using thimac::testing::fixture_path;
using thimac::testing::load_fixture;
using thimac::testing::read_json;
using thimac::testing::rendered;

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

// Criterion 1: the wet-grass behavior set and two obligation rejections.
Outcome wet_grass() {
  const std::string model = fixture_path("grass/model.tm"), events = fixture_path("grass/events.json");
  const auto r = cli::run_command({"--format", "json", "behaviors", model, "--events", events});
  if (r.exit_code != 0) return fail("behaviors exited " + std::to_string(r.exit_code));
  const auto f = load_fixture("grass");
  const auto got = rendered(f.cs, behaviors_from_json(f.cs, Json::parse(r.out)));
  const std::set<std::string> want = {"(E1,E2) → E3", "E1 → E3 → E2", "E1 → E3", "E2 → E3 → E1", "E2 → E3"};
  if (got != want) return fail("behavior set differs (" + std::to_string(got.size()) + " found)");
  for (const char* trace : {"grass/trace-e1e2e3.json", "grass/trace-e2e1e3.json"}) {
    const auto c = cli::run_command({"--format", "json", "check", model, "--events", events, "--trace", fixture_path(trace)});
    const Json v = Json::parse(c.out);
    if (c.exit_code != 1 || v["accepted"].get<bool>()) return fail(std::string(trace) + " was accepted");
    bool obligation = false;
    for (const auto& x : v["violations"]) obligation = obligation || x["kind"] == "obligation";
    if (!obligation) return fail(std::string(trace) + " rejected without an obligation violation");
  }
  return {true, "5 behaviors, both traces rejected by obligation"};
}

bool is_prefix_chain(const ConstraintSet& cs, const Chronology& c, const std::vector<std::string>& chain) {
  if (c.slots().size() != c.event_count()) return false;
  for (std::size_t i = 0; i < c.slots().size(); ++i) {
    if (i >= chain.size() || cs.label(c.slots()[i][0]) != chain[i]) return false;
  }
  return true;
}

// Criterion 2: the two equation systems differ, both are chains, and Y=0
// adds a behavior that starts with the assignment to Y.
Outcome equations() {
  const auto a = load_fixture("equations-A");
  const auto b = load_fixture("equations-B");
  const auto y0 = load_fixture("equations-Y0");
  const auto ba = enumerate_behaviors(a.cs).behaviors;
  const auto bb = enumerate_behaviors(b.cs).behaviors;
  const auto by0 = enumerate_behaviors(y0.cs).behaviors;
  const auto ra = rendered(a.cs, ba), rb = rendered(b.cs, bb);
  if (ra == rb) return fail("behavior sets are equal");
  for (const Chronology& c : ba) {
    if (!is_prefix_chain(a.cs, c, {"X", "2X", "Y", "Y+1", "Z"})) return fail("Y=2X system: " + render(a.cs, c));
  }
  for (const Chronology& c : bb) {
    if (!is_prefix_chain(b.cs, c, {"Z", "Z-1", "Y", "Y/2", "X"})) return fail("X=Y/2 system: " + render(b.cs, c));
  }
  const EventId y = *a.cs.find("Y"), two_x = *a.cs.find("2X");
  for (const Chronology& c : ba) {
    const auto sy = c.slot_of(y);
    if (sy && !(c.slot_of(two_x) && *c.slot_of(two_x) < *sy)) return fail("Y found without 2X");
  }
  const EventId assign = *y0.cs.find("Y=0");
  std::size_t extra = 0;
  for (const Chronology& c : by0) {
    if (!ra.count(render(y0.cs, c)) && c.slot_of(assign) == 0u) ++extra;
  }
  if (extra == 0) return fail("Y=0 adds no behavior starting at the assignment");
  return {true, std::to_string(ba.size()) + " vs " + std::to_string(bb.size()) + " behaviors, " +
                    std::to_string(extra) + " new with Y=0 first"};
}

// Criterion 3: enumerator against brute force on random event graphs.
Outcome oracle() {
  std::mt19937 rng(20240531);
  std::size_t graphs = 0, behaviors = 0;
  for (int i = 0; i < 250; ++i) {
    const std::size_t n = 1 + i % 5;
    const EventGraph g = thimac::testing::random_event_graph(rng, n, 0.2, 0.15, i % 10 == 0);
    const ConstraintSet cs = derive_constraints(g);
    const auto got = enumerate_behaviors(cs).behaviors;
    const auto want = brute_force_oracle(cs, all_events(cs));
    if (got != want) return fail("mismatch on graph " + std::to_string(i));
    ++graphs;
    behaviors += got.size();
  }
  return {true, std::to_string(graphs) + " graphs, " + std::to_string(behaviors) + " behaviors"};
}

// Criterion 4: the quoted TM-language strings.
Outcome parser_corpus() {
  const std::vector<std::string> strings = {
      "Flow.Create.release.transfer.output*",
      "Flow.Create.process.release.transfer.output*",
      "Flow.Transfer.input.receive.arrive.release.transfer.output*",
      "Flow.Transfer.input.receive.arrive.accept.release.transfer.output*",
      "Flow.Transfer.input.receive.arrive.accept.process.release.transfer.output*",
      "Flow.Marble.create.release.transfer.Phydias.transfer.receive.transfer.workshop.",
      "Flow.Apollo.image.create.release.transfer.Phydias.transfer.receive.release.transfer.workshop.",
      "Flow.Workshop.transfer.receive.process--> Apollo.temple.statue.create.process.",
  };
  const std::vector<std::string> triggers = {
      "Rooster.sound.create.release.transfer.sun.transfer.receive.process-->Rising.create.",
      "Rooster.sound.create-->Sun.rising.create.",
      "Flame.create-->Flame.heat.create.",
  };
  std::size_t n = 0;
  for (const std::string& s : strings) {
    try {
      const StaticModel m = parse(s).model;
      const StaticModel again = parse(serialize(m)).model;
      if (thimac::testing::canonical_form(again) != thimac::testing::canonical_form(m)) return fail("not idempotent: " + s);
      ++n;
    } catch (const Error& e) {
      return fail(s + ": " + e.what());
    }
  }
  for (const std::string& s : triggers) {
    try {
      const StaticModel m = parse(s).model;
      if (thimac::testing::canonical_form(parse(serialize(m)).model) != thimac::testing::canonical_form(m)) {
        return fail("not idempotent: " + s);
      }
      std::size_t t = 0;
      for (const Arc& arc : m.arcs()) t += arc.kind == ArcKind::Trigger;
      if (t != 1) return fail(s + ": " + std::to_string(t) + " trigger arcs");
      ++n;
    } catch (const Error& e) {
      return fail(s + ": " + e.what());
    }
  }
  return {true, std::to_string(n) + " strings"};
}

// Criterion 5: elevator validation and link labels on the documented trace.
Outcome elevator() {
  const auto f = load_fixture("elevator");
  for (const Diagnostic& d : validate_model(f.model)) {
    if (d.severity == Severity::Error) return fail(d.code + " at " + d.location);
  }
  const Chronology trace = chronology_from_json(f.cs, read_json(fixture_path("elevator/trace.json")));
  std::map<std::pair<std::string, std::string>, LinkKind> kinds;
  for (const Link& l : classify_links(f.graph, trace)) kinds[{f.cs.label(l.from), f.cs.label(l.to)}] = l.kind;
  const std::vector<std::tuple<std::string, std::string, LinkKind>> want = {
      {"E1", "E2", LinkKind::TriggerBased},  // button press -> request signal
      {"E3", "E5", LinkKind::FlowBased},     // request travels to the controller
      {"E6", "E10", LinkKind::ModelerChoice},  // door opens -> passenger enters
  };
  for (const auto& [from, to, kind] : want) {
    auto it = kinds.find({from, to});
    if (it == kinds.end()) return fail(from + " → " + to + " not adjacent");
    if (it->second != kind) return fail(from + " → " + to + " is " + std::string(to_string(it->second)));
  }
  return {true, std::to_string(f.model.stages().size()) + " stages, 0 errors, links as documented"};
}

// Criterion 6: every bundled source configuration simulates into the
// behavior space.
Outcome simulation() {
  std::size_t runs = 0;
  for (const auto& dir : fs::directory_iterator(THIMAC_FIXTURES)) {
    if (!fs::exists(dir.path() / "events.json")) continue;
    const std::string name = dir.path().filename();
    const auto f = load_fixture(name);
    for (const auto& entry : fs::directory_iterator(dir.path())) {
      const std::string file = entry.path().filename();
      if (file.rfind("sources", 0) != 0) continue;
      const auto sources = sources_from_json(f.model, read_json(entry.path().string()));
      const Chronology c = trace_to_chronology(simulate(f.model, sources), f.dyn);
      if (!check_trace(f.cs, c).accepted) return fail(name + "/" + file + " gives " + render(f.cs, c));
      ++runs;
    }
  }
  return {true, std::to_string(runs) + " configurations, 0 rejections"};
}

// Criterion 7: aim and worship share one region; some behavior starts with
// aim and ends with worship.
Outcome apollo() {
  const auto f = load_fixture("apollo");
  const EventId aim = *f.dyn.find_event("aim"), worship = *f.dyn.find_event("worship");
  if (f.dyn.event(aim).region != f.dyn.event(worship).region) return fail("regions differ");
  const auto all = enumerate_behaviors(f.cs).behaviors;
  std::size_t hits = 0;
  for (const Chronology& c : all) {
    if (c.slots().size() < 2) continue;
    if (c.slot_of(aim) == 0u && c.slot_of(worship) == c.slots().size() - 1) ++hits;
  }
  if (hits == 0) return fail("no behavior with aim first and worship last");
  const Chronology narrative = chronology_from_json(f.cs, read_json(fixture_path("apollo/trace.json")));
  if (std::find(all.begin(), all.end(), narrative) == all.end()) return fail("narrative trace not enumerated");
  return {true, std::to_string(hits) + " of " + std::to_string(all.size()) + " behaviors, narrative order included"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 wet-grass behaviors", wet_grass},    {"2 equation systems", equations},
      {"3 oracle equivalence", oracle},        {"4 parser corpus", parser_corpus},
      {"5 elevator links", elevator},          {"6 simulation soundness", simulation},
      {"7 apollo region sharing", apollo},
  };
  const std::map<std::string, double> budget = {{"1 wet-grass behaviors", 1.0}, {"2 equation systems", 1.0},
                                                {"3 oracle equivalence", 60.0}};
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (auto it = budget.find(name); it != budget.end() && secs >= it->second) {
      o = fail("took " + std::to_string(secs) + " s");
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << name << " (" << std::fixed;
    std::cout.precision(3);
    std::cout << secs << " s): " << o.detail << "\n";
  }
  return failures ? 1 : 0;
}
