// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "ocpn/error.hpp"
#include "ocpn/io.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/replay.hpp"
#include "ocpn/service.hpp"
#include "ocpn/simulation.hpp"

namespace ocpn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag values discovered after parsing (exit code 1).
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LogOptions {
  std::string log;
  std::string timestamp_format = "auto";
  std::string filter_file;
  std::vector<std::string> activities;
  std::vector<std::string> types;
  std::size_t min_frequency = 0;
  std::string start, end;
  std::size_t jobs = 0;
};

void add_log_options(CLI::App* cmd, LogOptions& o, bool with_filters) {
  cmd->add_option("--log", o.log, "Event log (.json, otherwise MDL/CSV)")->required();
  cmd->add_option("--timestamp-format", o.timestamp_format, "auto, iso or day-first")
      ->check(CLI::IsMember({"auto", "iso", "day-first"}));
  if (!with_filters) return;
  cmd->add_option("--types", o.types, "Object types to keep (comma separated)")->delimiter(',');
  cmd->add_option("--filter", o.filter_file, "JSON filter specification");
  cmd->add_option("--activities", o.activities, "Activities to keep (comma separated)")->delimiter(',');
  cmd->add_option("--min-frequency", o.min_frequency, "Drop activities occurring fewer times");
  cmd->add_option("--start", o.start, "Keep events at or after this timestamp");
  cmd->add_option("--end", o.end, "Keep events before this timestamp");
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
}

MdlOptions mdl_options(const LogOptions& o) {
  MdlOptions m;
  if (o.timestamp_format == "iso") m.timestamp_format = TimestampFormat::iso;
  if (o.timestamp_format == "day-first") m.timestamp_format = TimestampFormat::day_first;
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json_file(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw ParseError(path + ": malformed JSON");
  return doc;
}

Timestamp timestamp_flag(const std::string& flag, const std::string& value) {
  const auto t = parse_timestamp(value);
  if (!t) throw UsageError(flag + ": malformed timestamp '" + value + "'");
  return *t;
}

DiscoveryParams params_from_flags(const LogOptions& o, double noise, double tau) {
  DiscoveryParams params;
  params.noise = noise;
  params.tau = tau;
  params.jobs = o.jobs;
  params.types = o.types;
  if (!o.filter_file.empty()) {
    try {
      params.filter = filter_from_json(read_json_file(o.filter_file));
    } catch (const SchemaError& e) {
      throw ParseError(o.filter_file + ": " + e.what());
    }
  }
  if (!o.activities.empty()) params.filter.activities = std::set<std::string>(o.activities.begin(), o.activities.end());
  if (o.min_frequency) params.filter.min_activity_frequency = o.min_frequency;
  if (!o.start.empty()) params.filter.start = timestamp_flag("--start", o.start);
  if (!o.end.empty()) params.filter.end = timestamp_flag("--end", o.end);
  validate(params);
  return params;
}

AnnotatedOCPN read_model(const std::string& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const SchemaError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("OCPN_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  }
  return p;
}

/// Writes to `path` through a temporary sibling renamed into place, or to
/// `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  const fs::path target = resolve_output(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(target.string() + ": cannot write file");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(target.string() + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(target.string() + ": cannot write file");
  }
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string stats_table(const ObjectCentricEventLog& log) {
  std::ostringstream out;
  out << "events: " << log.size() << "\n";
  for (TypeId t = 0; t < log.object_types().size(); ++t) {
    out << "objects of type " << log.type_name(t) << ": " << log.objects_of_type(t).size() << "\n";
  }
  const auto rows = object_type_stats(log);
  std::size_t aw = std::string("activity").size();
  std::size_t tw = std::string("object type").size();
  for (const auto& r : rows) {
    aw = std::max(aw, r.activity.size());
    tw = std::max(tw, r.object_type.size());
  }
  out << "\n" << pad("activity", aw) << "  " << pad("object type", tw) << "  min   mean    max  events  objects\n";
  for (const auto& r : rows) {
    out << pad(r.activity, aw) << "  " << pad(r.object_type, tw) << "  " << std::setw(3) << r.min << "  "
        << std::setw(5) << format_mean(r.mean) << "  " << std::setw(5) << r.max << "  " << std::setw(6) << r.events
        << "  " << std::setw(7) << r.unique_objects << "\n";
  }
  return out.str();
}

std::string diagnostics_text(const FlatteningDiagnostics& d) {
  std::ostringstream out;
  auto section = [&](const char* name, const std::vector<std::string>& ids) {
    out << name << ": " << ids.size() << "\n";
    for (const auto& id : ids) out << "  " << id << "\n";
  };
  out << "object type: " << d.object_type << "\n";
  section("deficient", d.deficient);
  section("convergent", d.convergent);
  section("divergent", d.divergent);
  return out.str();
}

std::string conformance_text(const std::vector<TypeConformance>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    out << r.type << ": cases=" << r.cases << " accepted=" << r.accepted << " undetermined=" << r.undetermined
        << " trace_fraction=" << r.trace_fraction << " token_fitness=" << r.token_fitness << "\n";
  }
  return out.str();
}

std::atomic<HttpServer*> g_server{nullptr};

extern "C" void stop_server(int) {
  if (auto* s = g_server.load()) s->stop();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Object-centric Petri net discovery toolkit", "ocpn"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  LogOptions lo;
  std::string output, model_path, type, activity, population_path, preset, model_out, rankdir = "LR";
  double noise = 0.0, tau = 0.98;
  bool as_json = false, no_annotations = false, no_durations = false;
  std::uint64_t seed = 1;
  std::size_t orders = 2000, max_states = 200000;
  std::string host = "127.0.0.1";
  int port = 8080;
  ServiceConfig service_config;
  std::size_t idle_seconds = 3600;

  auto* stats = app.add_subcommand("stats", "Per activity and object type: min/mean/max objects per event");
  add_log_options(stats, lo, true);
  stats->add_flag("--json", as_json, "Machine-readable output");
  stats->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* flat = app.add_subcommand("flatten", "Flatten the log by one object type into a CSV case log");
  add_log_options(flat, lo, false);
  flat->add_option("--type", type, "Case-notion object type")->required();
  flat->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* diag = app.add_subcommand("diagnose", "Deficient, convergent and divergent events of a flattening");
  add_log_options(diag, lo, false);
  diag->add_option("--type", type, "Case-notion object type")->required();
  diag->add_flag("--json", as_json, "Machine-readable output");
  diag->add_option("-o,--output", output, "Output file (default: standard output)");

  auto add_discovery = [&](CLI::App* cmd) {
    cmd->add_option("--noise", noise, "Noise threshold of the inductive miner")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--tau", tau, "Variable-arc threshold")->check(CLI::Range(0.0, 1.0));
  };
  auto* disc = app.add_subcommand("discover", "Discover an object-centric Petri net (model JSON)");
  add_log_options(disc, lo, true);
  add_discovery(disc);
  disc->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* ann = app.add_subcommand("annotate", "Annotate a model with frequencies, replay results and timings");
  add_log_options(ann, lo, true);
  add_discovery(ann);
  ann->add_option("--model", model_path, "Model JSON (default: discover from the log)");
  ann->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* render = app.add_subcommand("render", "Render a model as Graphviz DOT");
  render->add_option("--model", model_path, "Model JSON")->required();
  render->add_flag("--no-annotations", no_annotations, "Omit annotation labels");
  render->add_flag("--no-durations", no_durations, "Omit durations on arcs");
  render->add_option("--rankdir", rankdir, "Graph direction")->check(CLI::IsMember({"LR", "TB", "RL", "BT"}));
  render->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* sim = app.add_subcommand("simulate", "Generate an event log by playing out a model");
  auto* sim_model = sim->add_option("--model", model_path, "Model JSON");
  sim->add_option("--population", population_path, "Population JSON (with --model)")->needs(sim_model);
  auto* sim_preset = sim->add_option("--preset", preset, "Built-in model and population")
                         ->check(CLI::IsMember({"order-item-route", "order-management"}))
                         ->excludes(sim_model);
  sim->add_option("--orders", orders, "Orders of the order-management preset")->needs(sim_preset);
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--model-out", model_out, "Also write the preset model JSON here")->needs(sim_preset);
  sim->add_option("-o,--output", output, "Output log (.json for JSON, otherwise MDL)");

  auto* conf = app.add_subcommand("conformance", "Per object type fitness of a log against a model");
  add_log_options(conf, lo, true);
  conf->add_option("--model", model_path, "Model JSON")->required();
  conf->add_option("--max-states", max_states, "State cap of the membership search per trace");
  conf->add_flag("--json", as_json, "Machine-readable output");
  conf->add_option("-o,--output", output, "Output file (default: standard output)");

  auto* fail = app.add_subcommand("failures", "How many objects an activity involved once or repeatedly");
  add_log_options(fail, lo, false);
  fail->add_option("--activity", activity, "Activity name")->required();
  fail->add_flag("--json", as_json, "Machine-readable output");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--upload-limit", service_config.upload_limit, "Maximum upload size in bytes");
  serve->add_option("--cache-size", service_config.cache_size, "Discovered models kept in memory");
  serve->add_option("--idle-timeout", idle_seconds, "Seconds before an unused log is dropped (0 = never)");
  serve->add_option("--jobs", service_config.jobs, "Worker threads per discovery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto load = [&] { return read_log(lo.log, mdl_options(lo)); };

    if (*stats) {
      const DiscoveryParams params = params_from_flags(lo, 0.0, 0.98);
      const ObjectCentricEventLog log = prepare_log(load(), params);
      emit(output, as_json ? stats_to_json(log).dump(2) + "\n" : stats_table(log), out);
    } else if (*flat) {
      const ObjectCentricEventLog log = load();
      std::ostringstream csv;
      write_flattened_csv(csv, flatten(log, type));
      emit(output, csv.str(), out);
    } else if (*diag) {
      const ObjectCentricEventLog log = load();
      const auto d = flattening_diagnostics(log, type);
      emit(output, as_json ? diagnostics_to_json(d).dump(2) + "\n" : diagnostics_text(d), out);
    } else if (*disc) {
      const DiscoveryParams params = params_from_flags(lo, noise, tau);
      const ObjectCentricEventLog log = prepare_log(load(), params);
      emit(output, serialize_model({discover_ocpn(log, params), std::nullopt}), out);
    } else if (*ann) {
      const DiscoveryParams params = params_from_flags(lo, noise, tau);
      const ObjectCentricEventLog log = prepare_log(load(), params);
      const AcceptingOCPN model = model_path.empty() ? discover_ocpn(log, params) : read_model(model_path).model;
      emit(output, serialize_model(annotate(log, model, {lo.jobs})), out);
    } else if (*render) {
      DotOptions options;
      options.annotations = !no_annotations;
      options.durations = !no_durations;
      options.rankdir = rankdir;
      emit(output, render_dot(read_model(model_path), options), out);
    } else if (*sim) {
      AcceptingOCPN model;
      ObjectPopulation population;
      if (preset == "order-item-route") {
        population = order_item_route_population();
        model = order_item_route_model(population);
      } else if (preset == "order-management") {
        population = order_management_population(orders);
        model = order_management_model(population);
      } else if (!model_path.empty()) {
        if (population_path.empty()) throw UsageError("simulate --model requires --population");
        model = read_model(model_path).model;
        try {
          population = population_from_json(read_json_file(population_path));
        } catch (const SchemaError& e) {
          throw ParseError(population_path + ": " + e.what());
        }
      } else {
        throw UsageError("simulate needs --preset or --model with --population");
      }
      const ObjectCentricEventLog log = simulate_log(model, population, seed);
      std::ostringstream text;
      if (fs::path(output).extension() == ".json") text << log_to_json(log).dump(2) << "\n";
      else write_mdl(text, log);
      if (!model_out.empty()) emit(model_out, serialize_model({model, std::nullopt}), out);
      emit(output, text.str(), out);
    } else if (*conf) {
      const DiscoveryParams params = params_from_flags(lo, 0.0, 0.98);
      const ObjectCentricEventLog log = prepare_log(load(), params);
      const auto rows = conformance(log, read_model(model_path).model, lo.jobs, max_states);
      emit(output, as_json ? conformance_to_json(rows).dump(2) + "\n" : conformance_text(rows), out);
    } else if (*fail) {
      const auto f = failure_stats(load(), activity);
      if (as_json) {
        out << failure_stats_to_json(f).dump(2) << "\n";
      } else {
        out << f.activity << ": " << f.events << " events\n";
        for (const auto& r : f.types) {
          out << "  " << r.type << ": " << r.at_least_once << " at least once, " << r.at_least_twice
              << " at least twice\n";
        }
      }
    } else if (*serve) {
      service_config.idle_timeout = std::chrono::seconds(idle_seconds);
      Service service(service_config);
      HttpServer server(service);
      const int bound = server.bind(host, port);
      out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      server.run();
      g_server = nullptr;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ocpn
