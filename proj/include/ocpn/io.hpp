// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ocpn/error.hpp"
#include "ocpn/event_log.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/replay.hpp"
#include "ocpn/simulation.hpp"
#include "ocpn/time.hpp"

namespace ocpn {

/// Schema violation in a JSON document; `path` is a JSON pointer such as "/arcs/3/source".
class SchemaError : public ParseError {
public:
  SchemaError(const std::string& path, const std::string& what)
      : ParseError("at " + (path.empty() ? std::string("/") : path) + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// MDL / CSV logs
//
// Columns: event_activity, event_timestamp, optional event_id; other event_*
// columns become attributes (without the prefix); every remaining column is an
// object type whose cells hold lists, either JSON arrays (["a","b"]) or
// single-quoted literals (['a', 'b']). An empty cell is an empty list.

struct MdlOptions {
  TimestampFormat timestamp_format = TimestampFormat::automatic;
};

/// Throws ParseError with the 1-based line of the offending record (header = 1).
ObjectCentricEventLog parse_mdl(std::istream& in, const MdlOptions& options = {});
ObjectCentricEventLog parse_mdl(std::string_view text, const MdlOptions& options = {});
/// Cells are quoted when needed; lists are written as JSON arrays.
void write_mdl(std::ostream& out, const ObjectCentricEventLog& log);

/// Splits CSV text into records (RFC 4180 quoting, CRLF or LF line ends).
/// Each record carries the line it started on.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRecord> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

/// Parses one list cell; throws ParseError without position on malformed input.
std::vector<std::string> parse_list_cell(std::string_view cell);

// ---------------------------------------------------------------------------
// JSON logs
//
// {"object_types": [...], "events": [{"id", "activity", "timestamp",
//  "objects": {type: [ids]}, "attributes": {...}}]}

nlohmann::json log_to_json(const ObjectCentricEventLog& log);
ObjectCentricEventLog log_from_json(const nlohmann::json& doc);

/// Dispatches on the extension: ".json" is a JSON log, anything else MDL/CSV.
/// Errors are prefixed with the path.
ObjectCentricEventLog read_log(const std::filesystem::path& path, const MdlOptions& options = {});
/// Same dispatch on content type for in-memory uploads: text starting with '{' is JSON.
ObjectCentricEventLog parse_log_text(std::string_view text, const MdlOptions& options = {});

/// Classical log as CSV: case_id, activity, timestamp, event_id.
void write_flattened_csv(std::ostream& out, const FlattenedEventLog& flat);

// ---------------------------------------------------------------------------
// Models

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json model_to_json(const AnnotatedOCPN& model);
/// Throws SchemaError naming the JSON path of the first violation.
AnnotatedOCPN model_from_json(const nlohmann::json& doc);

std::string serialize_model(const AnnotatedOCPN& model);
AnnotatedOCPN parse_model(std::string_view text);

nlohmann::json duration_to_json(const DurationStats& d);
nlohmann::json transition_annotation_to_json(const TransitionAnnotation& t);

// ---------------------------------------------------------------------------
// Parameter and report documents shared by the CLI and the service

/// {"retained": {activity: [types]}, "activities": [...], "object_types": [...],
///  "min_activity_frequency": n, "start": ts, "end": ts,
///  "attributes": [{"attribute", "op": "eq|ne|lt|le|gt|ge|exists", "value"}]}
FilterSpec filter_from_json(const nlohmann::json& doc, const std::string& path = "");
nlohmann::json filter_to_json(const FilterSpec& filter);

/// {"noise", "tau", "filter", "types"}; absent fields keep their defaults.
/// Throws SchemaError on type errors and for noise/tau outside [0, 1].
DiscoveryParams params_from_json(const nlohmann::json& doc);
/// Canonical form (sorted keys, no worker count); equal params give equal text.
nlohmann::json params_to_json(const DiscoveryParams& params);

ObjectPopulation population_from_json(const nlohmann::json& doc);
nlohmann::json population_to_json(const ObjectPopulation& population);

nlohmann::json stats_to_json(const ObjectCentricEventLog& log);
nlohmann::json diagnostics_to_json(const FlatteningDiagnostics& d);
nlohmann::json conformance_to_json(const std::vector<TypeConformance>& rows);
nlohmann::json failure_stats_to_json(const FailureStats& f);
nlohmann::json event_to_json(const ObjectCentricEventLog& log, std::size_t index);

// ---------------------------------------------------------------------------
// DOT

struct DotOptions {
  bool annotations = true;  ///< include annotation labels when the model has them
  bool durations = true;    ///< include mean durations on arcs
  std::string rankdir = "LR";
};

/// Fill color of an object type: fixed palette indexed by the type's rank
/// among `types` sorted by name.
std::string type_color(const std::string& type, const std::set<std::string>& types);

/// Deterministic: nodes and edges are emitted in id order.
std::string render_dot(const AnnotatedOCPN& model, const DotOptions& options = {});

}  // namespace ocpn
