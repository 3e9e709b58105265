#pragma once

// The thimac command line, callable in-process.
//
//   exit 0  success
//   exit 1  diagnostics, rejection or a library error
//   exit 2  usage error

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thimac/thimac.hpp"

namespace thimac::cli {

struct CommandOutcome {
  int exit_code = 0;
  std::string out;
  std::string err;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline StaticModel load_model(const std::string& path) {
  const std::string text = read_file(path);
  if (ends_with(path, ".json")) return model_from_json_text(text);
  return parse(text).model;
}

inline DynamicModel load_events(const StaticModel& model, const std::string& path) {
  return events_from_json(model, thimac::detail::parse_text(read_file(path)));
}

inline Json load_json(const std::string& path) { return thimac::detail::parse_text(read_file(path)); }

inline std::string diagnostic_line(const Diagnostic& d) {
  return std::string(d.severity == Severity::Error ? "error" : "warning") + " " + d.code + " " +
         d.location + ": " + d.message;
}

}  // namespace detail

inline CommandOutcome run_command(const std::vector<std::string>& argv) {
  CommandOutcome result;
  std::ostringstream out, err;

  CLI::App app{"Thinging machine models: parse, validate, enumerate behaviors, simulate.", "thimac"};
  app.require_subcommand(1);
  std::string format = "text";
  std::string output;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--output", output, "Write the result to this file instead of stdout");

  std::string file, events_file, trace_file, sources_file;
  std::size_t max_events = 12;
  std::size_t max_ticks = 0;
  bool fork = false;

  const auto model_arg = [&](CLI::App* sub) {
    sub->add_option("FILE", file, "Model (.tm or .json)")->required()->check(CLI::ExistingFile);
    sub->fallthrough();
  };
  const auto events_arg = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--events", events_file, "Events file")->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  const auto trace_arg = [&](CLI::App* sub) {
    sub->add_option("--trace", trace_file, "Chronology file")->required()->check(CLI::ExistingFile);
  };

  auto* parse_cmd = app.add_subcommand("parse", "Parse a model and print it in canonical form");
  model_arg(parse_cmd);
  auto* validate_cmd = app.add_subcommand("validate", "Report structural diagnostics");
  model_arg(validate_cmd);
  auto* behaviors_cmd = app.add_subcommand("behaviors", "Enumerate acceptable chronologies");
  model_arg(behaviors_cmd);
  events_arg(behaviors_cmd, true);
  behaviors_cmd->add_option("--max-events", max_events, "Refuse more events than this");
  auto* check_cmd = app.add_subcommand("check", "Check one chronology");
  model_arg(check_cmd);
  events_arg(check_cmd, true);
  trace_arg(check_cmd);
  auto* simulate_cmd = app.add_subcommand("simulate", "Run tokens through the model");
  model_arg(simulate_cmd);
  simulate_cmd->add_option("--sources", sources_file, "Sources file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--max-ticks", max_ticks, "Tick bound")->required();
  simulate_cmd->add_flag("--fork", fork, "Fork tokens at flow fan-out");
  events_arg(simulate_cmd, false);
  auto* classify_cmd = app.add_subcommand("classify", "Label the links of an accepted chronology");
  model_arg(classify_cmd);
  events_arg(classify_cmd, true);
  trace_arg(classify_cmd);
  auto* dot_cmd = app.add_subcommand("export-dot", "Emit a Graphviz diagram");
  model_arg(dot_cmd);
  events_arg(dot_cmd, false);

  try {
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    result.exit_code = app.exit(e, out, err);
    result.out = out.str();
    return result;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    result.exit_code = 2;
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  const bool json = format == "json";
  int code = 0;
  std::string payload;

  try {
    if (parse_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      const auto diags = validate_model(model);
      if (has_errors(diags)) {
        for (const auto& d : diags) err << detail::diagnostic_line(d) << "\n";
        payload = json ? Json{{"diagnostics", diagnostics_to_json(diags)}}.dump() : "";
        code = 1;
      } else {
        payload = json ? model_to_json_text(model) : serialize(model);
      }
    } else if (validate_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      const auto diags = validate_model(model);
      std::size_t errors = 0;
      for (const auto& d : diags) errors += d.severity == Severity::Error;
      if (json) {
        payload = Json{{"diagnostics", diagnostics_to_json(diags)}}.dump();
      } else {
        for (const auto& d : diags) payload += detail::diagnostic_line(d) + "\n";
        payload += std::to_string(errors) + " errors, " + std::to_string(diags.size() - errors) + " warnings";
      }
      code = errors ? 1 : 0;
    } else if (behaviors_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      const DynamicModel dyn = detail::load_events(model, events_file);
      for (const auto& d : region_warnings(dyn)) err << detail::diagnostic_line(d) << "\n";
      const ConstraintSet cs = derive_constraints(derive_event_graph(dyn));
      const BehaviorSet set = enumerate_behaviors(cs, EnumerationOptions{max_events, true});
      for (const auto& note : set.notes) err << "note " << note << "\n";
      if (json) {
        payload = behaviors_to_json(cs, set.behaviors).dump();
      } else {
        for (const Chronology& c : set.behaviors) payload += render(cs, c) + "\n";
        payload += std::to_string(set.behaviors.size()) + " behaviors";
      }
    } else if (check_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      const DynamicModel dyn = detail::load_events(model, events_file);
      const ConstraintSet cs = derive_constraints(derive_event_graph(dyn));
      const Chronology trace = chronology_from_json(cs, detail::load_json(trace_file));
      const Verdict v = check_trace(cs, trace);
      if (json) {
        payload = verdict_to_json(cs, v).dump();
      } else if (v.accepted) {
        payload = "accepted: " + render(cs, trace);
      } else {
        payload = "rejected: " + render(cs, trace);
        for (const Violation& x : v.violations) payload += "\n" + std::string(to_string(x.kind)) + ": " + x.message;
      }
      code = v.accepted ? 0 : 1;
    } else if (simulate_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      const auto sources = sources_from_json(model, detail::load_json(sources_file));
      const Trace trace = simulate(model, sources, SimulationOptions{max_ticks, fork});
      if (json) {
        payload = trace_to_json(trace).dump();
      } else {
        for (const TickRecord& rec : trace.ticks) {
          payload += "tick " + std::to_string(rec.tick) + ":";
          for (const Occupation& o : rec.occupations) {
            payload += " " + std::to_string(o.token) + "@" + stage_path(model, o.stage);
          }
          for (ArcId a : rec.fired) payload += " fired#" + std::to_string(a.value);
          payload += "\n";
        }
        if (!events_file.empty()) {
          const DynamicModel dyn = detail::load_events(model, events_file);
          const ConstraintSet cs = derive_constraints(derive_event_graph(dyn));
          payload += "chronology: " + render(cs, trace_to_chronology(trace, dyn)) + "\n";
        }
        payload += std::to_string(trace.ticks.size()) + " ticks";
      }
    } else if (classify_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      const DynamicModel dyn = detail::load_events(model, events_file);
      const EventGraph graph = derive_event_graph(dyn);
      const ConstraintSet cs = derive_constraints(graph);
      const Chronology trace = chronology_from_json(cs, detail::load_json(trace_file));
      const auto links = classify_links(graph, trace);
      if (json) {
        payload = links_to_json(cs, links).dump();
      } else {
        for (const Link& l : links) {
          if (!payload.empty()) payload += "\n";
          payload += cs.label(l.from) + " → " + cs.label(l.to) + ": " + std::string(to_string(l.kind));
        }
      }
    } else if (dot_cmd->parsed()) {
      const StaticModel model = detail::load_model(file);
      if (events_file.empty()) {
        payload = export_dot(model);
      } else {
        const DynamicModel dyn = detail::load_events(model, events_file);
        payload = export_dot(model, &dyn);
      }
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    Json error = {{"code", errc_name(e.code())}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
      error["span"] = {{"statement", pe->span().statement}, {"begin", pe->span().begin}, {"end", pe->span().end}};
    } else if (const auto* se = dynamic_cast<const SchemaError*>(&e)) {
      error["pointer"] = se->pointer();
    }
    payload = json ? Json{{"error", error}}.dump() : "";
    code = 1;
  }

  if (!payload.empty() && payload.back() != '\n') payload += "\n";
  if (!output.empty()) {
    std::ofstream file_out(output, std::ios::binary);
    if (!file_out) {
      err << "cannot write '" << output << "'\n";
      code = 1;
    } else {
      file_out << payload;
    }
  } else {
    out << payload;
  }
  result.exit_code = code;
  result.out = out.str();
  result.err = err.str();
  return result;
}

}  // namespace thimac::cli
