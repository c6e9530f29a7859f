// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

namespace ocpn {

using nlohmann::json;

namespace {

constexpr std::string_view kActivity = "event_activity";
constexpr std::string_view kTimestamp = "event_timestamp";
constexpr std::string_view kEventId = "event_id";
constexpr std::string_view kEventPrefix = "event_";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

AttributeValue parse_attribute(std::string_view text) {
  std::int64_t i = 0;
  auto [ip, iec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (iec == std::errc() && ip == text.data() + text.size() && !text.empty()) return i;
  double d = 0;
  auto [dp, dec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (dec == std::errc() && dp == text.data() + text.size() && !text.empty() && std::isfinite(d)) return d;
  return std::string(text);
}

std::string format_double(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, p);
  // Keep the value recognizable as a float on re-read.
  if (s.find_first_of(".eE") == std::string::npos && s.find_first_of("ni") == std::string::npos) s += ".0";
  return s;
}

std::string attribute_text(const AttributeValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_double(x);
        else return x;
      },
      v);
}

json attribute_json(const AttributeValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool quoted = false;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        if (in_quotes) throw ParseError("unterminated quoted field", rec.line);
        rec.fields.push_back(std::move(field));
        break;
      }
      const char c = text[i++];
      if (in_quotes) {
        if (c == '"') {
          if (i < text.size() && text[i] == '"') {
            field += '"';
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || quoted) throw ParseError("stray quote inside field", line);
          in_quotes = quoted = true;
          break;
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          quoted = false;
          break;
        case '\r':
          if (i < text.size() && text[i] == '\n') ++i;
          [[fallthrough]];
        case '\n':
          rec.fields.push_back(std::move(field));
          ++line;
          done = true;
          break;
        default:
          field += c;
      }
    }
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_list_cell(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return {};
  if (cell.front() != '[' || cell.back() != ']') throw ParseError("expected a list like ['a', 'b'], got '" + std::string(cell) + "'");
  std::string_view inner = trim(cell.substr(1, cell.size() - 2));
  if (inner.empty()) return {};
  std::vector<std::string> out;
  if (inner.front() == '"' || std::isdigit(static_cast<unsigned char>(inner.front())) || inner.front() == '-') {
    const json doc = json::parse(cell, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw ParseError("malformed JSON list '" + std::string(cell) + "'");
    for (const auto& item : doc) {
      if (item.is_string()) out.push_back(item.get<std::string>());
      else if (item.is_number_integer()) out.push_back(item.dump());
      else throw ParseError("list items must be strings, got " + item.dump());
    }
    return out;
  }
  std::size_t i = 0;
  while (true) {
    while (i < inner.size() && inner[i] == ' ') ++i;
    if (i >= inner.size() || inner[i] != '\'') throw ParseError("expected a quoted item in '" + std::string(cell) + "'");
    std::string item;
    ++i;
    bool closed = false;
    while (i < inner.size()) {
      const char c = inner[i++];
      if (c == '\\' && i < inner.size()) {
        item += inner[i++];
      } else if (c == '\'') {
        closed = true;
        break;
      } else {
        item += c;
      }
    }
    if (!closed) throw ParseError("unterminated item in '" + std::string(cell) + "'");
    out.push_back(std::move(item));
    while (i < inner.size() && inner[i] == ' ') ++i;
    if (i == inner.size()) break;
    if (inner[i] != ',') throw ParseError("expected ',' in '" + std::string(cell) + "'");
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// MDL

ObjectCentricEventLog parse_mdl(std::string_view text, const MdlOptions& options) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ParseError("missing header row", 1);
  const auto& header = records.front().fields;
  std::optional<std::size_t> activity_col, time_col, id_col;
  std::vector<std::pair<std::size_t, std::string>> type_cols, attribute_cols;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(trim(header[c]));
    if (name.empty()) throw ParseError("empty column name", 1, "#" + std::to_string(c + 1));
    if (!seen.insert(name).second) throw ParseError("duplicate column '" + name + "'", 1, name);
    if (name == kActivity) activity_col = c;
    else if (name == kTimestamp) time_col = c;
    else if (name == kEventId) id_col = c;
    else if (name.starts_with(kEventPrefix)) attribute_cols.emplace_back(c, name.substr(kEventPrefix.size()));
    else type_cols.emplace_back(c, name);
  }
  if (!activity_col) throw ParseError("missing mandatory column 'event_activity'", 1);
  if (!time_col) throw ParseError("missing mandatory column 'event_timestamp'", 1);

  LogBuilder builder;
  for (const auto& [c, name] : type_cols) builder.declare_type(name);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(rec.fields.size()),
                       rec.line);
    }
    EventRecord ev;
    ev.activity = std::string(trim(rec.fields[*activity_col]));
    if (ev.activity.empty()) throw ParseError("empty activity", rec.line, std::string(kActivity));
    const std::string_view ts = trim(rec.fields[*time_col]);
    const auto time = parse_timestamp(ts, options.timestamp_format);
    if (!time) throw ParseError("malformed timestamp '" + std::string(ts) + "'", rec.line, std::string(kTimestamp));
    ev.time = *time;
    if (id_col) ev.id = std::string(trim(rec.fields[*id_col]));
    for (const auto& [c, name] : attribute_cols) {
      const std::string_view v = trim(rec.fields[c]);
      if (!v.empty()) ev.attributes[name] = parse_attribute(v);
    }
    bool any = false;
    for (const auto& [c, name] : type_cols) {
      std::vector<std::string> objects;
      try {
        objects = parse_list_cell(rec.fields[c]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), rec.line, name);
      }
      if (objects.empty()) continue;
      any = true;
      ev.objects[name] = std::move(objects);
    }
    if (!any) throw ParseError("event references no objects", rec.line);
    builder.add(std::move(ev));
  }
  try {
    return builder.build();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

ObjectCentricEventLog parse_mdl(std::istream& in, const MdlOptions& options) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_mdl(std::string_view(text), options);
}

void write_mdl(std::ostream& out, const ObjectCentricEventLog& log) {
  std::set<std::string> attributes;
  for (const Event& e : log.events()) {
    for (const auto& [k, v] : e.attributes) attributes.insert(k);
  }
  out << "event_id,event_activity,event_timestamp";
  for (const auto& a : attributes) out << ',' << csv_escape(std::string(kEventPrefix) + a);
  for (const auto& t : log.object_types()) out << ',' << csv_escape(t);
  out << '\n';
  for (const Event& e : log.events()) {
    out << csv_escape(e.id) << ',' << csv_escape(log.activity_name(e.activity)) << ','
        << format_timestamp(e.time);
    for (const auto& a : attributes) {
      auto it = e.attributes.find(a);
      out << ',' << (it == e.attributes.end() ? std::string() : csv_escape(attribute_text(it->second)));
    }
    for (TypeId t = 0; t < log.object_types().size(); ++t) {
      json list = json::array();
      for (ObjectId o : e.objects_of(t)) list.push_back(log.object_name(o));
      out << ',' << csv_escape(list.empty() ? std::string() : list.dump());
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON logs

json log_to_json(const ObjectCentricEventLog& log) {
  json doc;
  doc["object_types"] = log.object_types();
  json events = json::array();
  for (const Event& e : log.events()) {
    json ev;
    ev["id"] = e.id;
    ev["activity"] = log.activity_name(e.activity);
    ev["timestamp"] = format_timestamp_iso(e.time);
    json objects = json::object();
    for (const auto& refs : e.omap) {
      json list = json::array();
      for (ObjectId o : refs.objects) list.push_back(log.object_name(o));
      objects[log.type_name(refs.type)] = std::move(list);
    }
    ev["objects"] = std::move(objects);
    if (!e.attributes.empty()) {
      json attrs = json::object();
      for (const auto& [k, v] : e.attributes) attrs[k] = attribute_json(v);
      ev["attributes"] = std::move(attrs);
    }
    events.push_back(std::move(ev));
  }
  doc["events"] = std::move(events);
  return doc;
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing field");
  return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

const json& require_array(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "/" + key, "expected an array");
  return v;
}

std::size_t require_count(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw SchemaError(path + "/" + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return v.get<double>();
}

}  // namespace

ObjectCentricEventLog log_from_json(const json& doc) {
  LogBuilder builder;
  if (doc.is_object() && doc.contains("object_types")) {
    const json& types = require_array(doc, "object_types", "");
    for (std::size_t i = 0; i < types.size(); ++i) {
      if (!types[i].is_string()) throw SchemaError("/object_types/" + std::to_string(i), "expected a string");
      builder.declare_type(types[i].get<std::string>());
    }
  }
  const json& events = require_array(doc, "events", "");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string path = "/events/" + std::to_string(i);
    const json& ev = events[i];
    EventRecord rec;
    if (ev.is_object() && ev.contains("id")) rec.id = require_string(ev, "id", path);
    rec.activity = require_string(ev, "activity", path);
    if (rec.activity.empty()) throw SchemaError(path + "/activity", "empty activity");
    const std::string ts = require_string(ev, "timestamp", path);
    const auto time = parse_timestamp(ts);
    if (!time) throw SchemaError(path + "/timestamp", "malformed timestamp '" + ts + "'");
    rec.time = *time;
    const json& objects = require(ev, "objects", path);
    if (!objects.is_object()) throw SchemaError(path + "/objects", "expected an object");
    for (const auto& [type, list] : objects.items()) {
      const std::string tpath = path + "/objects/" + type;
      if (!list.is_array()) throw SchemaError(tpath, "expected an array");
      std::vector<std::string> ids;
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (!list[k].is_string()) throw SchemaError(tpath + "/" + std::to_string(k), "expected a string");
        ids.push_back(list[k].get<std::string>());
      }
      if (!ids.empty()) rec.objects[type] = std::move(ids);
    }
    if (rec.objects.empty()) throw SchemaError(path + "/objects", "event references no objects");
    if (ev.contains("attributes")) {
      const json& attrs = ev["attributes"];
      if (!attrs.is_object()) throw SchemaError(path + "/attributes", "expected an object");
      for (const auto& [k, v] : attrs.items()) {
        if (v.is_boolean()) rec.attributes[k] = v.get<bool>();
        else if (v.is_number_integer()) rec.attributes[k] = v.get<std::int64_t>();
        else if (v.is_number()) rec.attributes[k] = v.get<double>();
        else if (v.is_string()) rec.attributes[k] = v.get<std::string>();
        else throw SchemaError(path + "/attributes/" + k, "expected a scalar");
      }
    }
    builder.add(std::move(rec));
  }
  try {
    return builder.build();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

ObjectCentricEventLog parse_log_text(std::string_view text, const MdlOptions& options) {
  std::string_view t = trim(text);
  while (!t.empty() && (t.front() == '\n' || t.front() == '\r')) t.remove_prefix(1);
  if (!t.empty() && t.front() == '{') {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed JSON log");
    return log_from_json(doc);
  }
  return parse_mdl(text, options);
}

ObjectCentricEventLog read_log(const std::filesystem::path& path, const MdlOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open file");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    if (path.extension() == ".json") {
      const json doc = json::parse(text, nullptr, false);
      if (doc.is_discarded()) throw ParseError("malformed JSON");
      return log_from_json(doc);
    }
    return parse_mdl(std::string_view(text), options);
  } catch (const ParseError& e) {
    std::string where = path.string();
    if (e.row()) where += ":" + std::to_string(e.row());
    if (!e.column().empty()) where += " (column " + e.column() + ")";
    throw ParseError(where + ": " + e.what(), e.row(), e.column());
  }
}

void write_flattened_csv(std::ostream& out, const FlattenedEventLog& flat) {
  const auto& log = flat.source_log();
  out << "case_id,activity,timestamp,event_id\n";
  for (const auto& [case_id, positions] : flat.cases()) {
    for (std::size_t i : positions) {
      out << csv_escape(log.object_name(case_id)) << ',' << csv_escape(log.activity_name(flat.activity(i)))
          << ',' << format_timestamp(flat.time(i)) << ',' << csv_escape(flat.event_id(i)) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Models

json duration_to_json(const DurationStats& d) {
  return {{"count", d.count}, {"mean", d.mean}, {"median", d.median}, {"min", d.min}, {"max", d.max}};
}

json transition_annotation_to_json(const TransitionAnnotation& t) {
  json types = json::object();
  for (const auto& [type, f] : t.types) {
    types[type] = {{"unique_objects", f.unique_objects}, {"mean", f.mean}, {"min", f.min}, {"max", f.max}};
  }
  return {{"frequency", t.frequency}, {"types", std::move(types)}};
}

namespace {

json marking_json(const OcpnMarking& m, const LabeledPetriNet& net) {
  json out = json::array();
  for (const auto& [token, n] : m) {
    json entry = {{"place", net.place_name(token.place)}, {"object", token.object}};
    if (n != 1) entry["count"] = n;
    out.push_back(std::move(entry));
  }
  return out;
}

DurationStats duration_from_json(const json& j, const std::string& path) {
  DurationStats d;
  d.count = require_count(j, "count", path);
  d.mean = require_number(j, "mean", path);
  d.median = require_number(j, "median", path);
  d.min = require_number(j, "min", path);
  d.max = require_number(j, "max", path);
  return d;
}

}  // namespace

json model_to_json(const AnnotatedOCPN& model) {
  const auto& ocpn = model.model.ocpn;
  const auto& net = ocpn.net;
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  json places = json::array();
  for (PlaceId p = 0; p < net.place_count(); ++p) {
    places.push_back({{"id", net.place_name(p)}, {"type", ocpn.place_type(p)}});
  }
  json transitions = json::array();
  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    const auto& label = net.label(t);
    transitions.push_back({{"id", net.transition_name(t)}, {"label", label ? json(*label) : json(nullptr)}});
  }
  json arcs = json::array();
  for (const Arc& a : net.arcs()) {
    const std::string& place = net.place_name(a.place);
    const std::string& tr = net.transition_name(a.transition);
    arcs.push_back({{"source", a.to_transition ? place : tr},
                    {"target", a.to_transition ? tr : place},
                    {"variable", ocpn.is_variable(a)}});
  }
  doc["places"] = std::move(places);
  doc["transitions"] = std::move(transitions);
  doc["arcs"] = std::move(arcs);
  doc["initial_marking"] = marking_json(model.model.initial, net);
  doc["final_marking"] = marking_json(model.model.final, net);
  if (model.annotations) {
    const Annotations& ann = *model.annotations;
    json ap = json::object();
    for (PlaceId p = 0; p < ann.places.size(); ++p) {
      const auto& d = ann.places[p];
      ap[net.place_name(p)] = {{"produced", d.produced},
                               {"consumed", d.consumed},
                               {"missing", d.missing},
                               {"remaining", d.remaining},
                               {"sojourn", duration_to_json(d.sojourn)}};
    }
    json at = json::object();
    for (TransitionId t = 0; t < ann.transitions.size(); ++t) {
      at[net.transition_name(t)] = transition_annotation_to_json(ann.transitions[t]);
    }
    json aa = json::array();
    for (const auto& [a, x] : ann.arcs) {
      const std::string& place = net.place_name(a.place);
      const std::string& tr = net.transition_name(a.transition);
      aa.push_back({{"source", a.to_transition ? place : tr},
                    {"target", a.to_transition ? tr : place},
                    {"occurrences", x.occurrences},
                    {"tokens", x.tokens},
                    {"mean_multiplicity", x.mean_multiplicity},
                    {"min_multiplicity", x.min_multiplicity},
                    {"max_multiplicity", x.max_multiplicity},
                    {"duration", duration_to_json(x.duration)}});
    }
    doc["annotations"] = {{"places", std::move(ap)}, {"transitions", std::move(at)}, {"arcs", std::move(aa)}};
  }
  return doc;
}

AnnotatedOCPN model_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "expected an object");
  const json& version = require(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kModelSchemaVersion) {
    throw SchemaError("/schema_version", "unsupported schema version " + version.dump());
  }
  AnnotatedOCPN out;
  auto& ocpn = out.model.ocpn;
  auto& net = ocpn.net;

  const json& places = require_array(doc, "places", "");
  for (std::size_t i = 0; i < places.size(); ++i) {
    const std::string path = "/places/" + std::to_string(i);
    const std::string id = require_string(places[i], "id", path);
    const std::string type = require_string(places[i], "type", path);
    if (type.empty()) throw SchemaError(path + "/type", "empty object type");
    try {
      net.add_place(id);
    } catch (const Error& e) {
      throw SchemaError(path + "/id", e.what());
    }
    ocpn.place_types.push_back(type);
  }
  const json& transitions = require_array(doc, "transitions", "");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string path = "/transitions/" + std::to_string(i);
    const std::string id = require_string(transitions[i], "id", path);
    const json& label = require(transitions[i], "label", path);
    std::optional<std::string> l;
    if (label.is_string()) l = label.get<std::string>();
    else if (!label.is_null()) throw SchemaError(path + "/label", "expected a string or null");
    try {
      net.add_transition(id, l);
    } catch (const Error& e) {
      throw SchemaError(path + "/id", e.what());
    }
  }

  auto resolve_arc = [&](const json& j, const std::string& path) {
    const std::string source = require_string(j, "source", path);
    const std::string target = require_string(j, "target", path);
    if (auto p = net.find_place(source)) {
      auto t = net.find_transition(target);
      if (!t) throw SchemaError(path + "/target", "unknown transition '" + target + "'");
      return Arc{*p, *t, true};
    }
    auto t = net.find_transition(source);
    if (!t) throw SchemaError(path + "/source", "unknown place or transition '" + source + "'");
    auto p = net.find_place(target);
    if (!p) throw SchemaError(path + "/target", "unknown place '" + target + "'");
    return Arc{*p, *t, false};
  };

  const json& arcs = require_array(doc, "arcs", "");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const std::string path = "/arcs/" + std::to_string(i);
    const Arc a = resolve_arc(arcs[i], path);
    if (net.has_arc(a)) throw SchemaError(path, "duplicate arc");
    net.add_arc(a);
    const json& variable = require(arcs[i], "variable", path);
    if (!variable.is_boolean()) throw SchemaError(path + "/variable", "expected a boolean");
    if (variable.get<bool>()) ocpn.variable_arcs.insert(a);
  }

  auto read_marking = [&](const std::string& key) {
    OcpnMarking m;
    const json& list = require_array(doc, key, "");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/" + key + "/" + std::to_string(i);
      const std::string place = require_string(list[i], "place", path);
      const auto p = net.find_place(place);
      if (!p) throw SchemaError(path + "/place", "unknown place '" + place + "'");
      const std::string object = require_string(list[i], "object", path);
      std::size_t n = 1;
      if (list[i].contains("count")) n = require_count(list[i], "count", path);
      m.add(Token{*p, object}, n);
    }
    return m;
  };
  out.model.initial = read_marking("initial_marking");
  out.model.final = read_marking("final_marking");

  if (doc.contains("annotations") && !doc["annotations"].is_null()) {
    const json& aj = doc["annotations"];
    const std::string base = "/annotations";
    Annotations ann;
    ann.places.resize(net.place_count());
    ann.transitions.resize(net.transition_count());
    const json& ap = require(aj, "places", base);
    if (!ap.is_object()) throw SchemaError(base + "/places", "expected an object");
    for (const auto& [name, d] : ap.items()) {
      const std::string path = base + "/places/" + name;
      const auto p = net.find_place(name);
      if (!p) throw SchemaError(path, "unknown place '" + name + "'");
      auto& pd = ann.places[*p];
      pd.produced = require_count(d, "produced", path);
      pd.consumed = require_count(d, "consumed", path);
      pd.missing = require_count(d, "missing", path);
      pd.remaining = require_count(d, "remaining", path);
      pd.sojourn = duration_from_json(require(d, "sojourn", path), path + "/sojourn");
    }
    const json& at = require(aj, "transitions", base);
    if (!at.is_object()) throw SchemaError(base + "/transitions", "expected an object");
    for (const auto& [name, d] : at.items()) {
      const std::string path = base + "/transitions/" + name;
      const auto t = net.find_transition(name);
      if (!t) throw SchemaError(path, "unknown transition '" + name + "'");
      auto& ta = ann.transitions[*t];
      ta.frequency = require_count(d, "frequency", path);
      const json& types = require(d, "types", path);
      if (!types.is_object()) throw SchemaError(path + "/types", "expected an object");
      for (const auto& [type, f] : types.items()) {
        const std::string tpath = path + "/types/" + type;
        TypeFrequency tf;
        tf.unique_objects = require_count(f, "unique_objects", tpath);
        tf.mean = require_number(f, "mean", tpath);
        tf.min = require_count(f, "min", tpath);
        tf.max = require_count(f, "max", tpath);
        ta.types[type] = tf;
      }
    }
    const json& aa = require_array(aj, "arcs", base);
    for (std::size_t i = 0; i < aa.size(); ++i) {
      const std::string path = base + "/arcs/" + std::to_string(i);
      const Arc a = resolve_arc(aa[i], path);
      if (!net.has_arc(a)) throw SchemaError(path, "annotation for an arc that is not in the net");
      ArcAnnotation x;
      x.occurrences = require_count(aa[i], "occurrences", path);
      x.tokens = require_count(aa[i], "tokens", path);
      x.mean_multiplicity = require_number(aa[i], "mean_multiplicity", path);
      x.min_multiplicity = require_count(aa[i], "min_multiplicity", path);
      x.max_multiplicity = require_count(aa[i], "max_multiplicity", path);
      x.duration = duration_from_json(require(aa[i], "duration", path), path + "/duration");
      ann.arcs[a] = x;
    }
    out.annotations = std::move(ann);
  }
  return out;
}

std::string serialize_model(const AnnotatedOCPN& model) { return model_to_json(model).dump(2) + "\n"; }

AnnotatedOCPN parse_model(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("malformed JSON model");
  return model_from_json(doc);
}

// ---------------------------------------------------------------------------
// Parameter and report documents

namespace {

constexpr std::pair<AttributePredicate::Op, std::string_view> kOps[] = {
    {AttributePredicate::Op::eq, "eq"}, {AttributePredicate::Op::ne, "ne"}, {AttributePredicate::Op::lt, "lt"},
    {AttributePredicate::Op::le, "le"}, {AttributePredicate::Op::gt, "gt"}, {AttributePredicate::Op::ge, "ge"},
    {AttributePredicate::Op::exists, "exists"}};

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw SchemaError(path + "/" + std::to_string(i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

Timestamp timestamp_field(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a timestamp string");
  const auto t = parse_timestamp(j.get<std::string>());
  if (!t) throw SchemaError(path, "malformed timestamp '" + j.get<std::string>() + "'");
  return *t;
}

double unit_interval(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!(v >= 0.0 && v <= 1.0)) throw SchemaError(path, "must lie in [0, 1], got " + j.dump());
  return v;
}

std::size_t count_field(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw SchemaError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::size_t> count_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of counts");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(count_field(j[i], path + "/" + std::to_string(i)));
  return out;
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> keys, const std::string& path) {
  for (const auto& [k, v] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw SchemaError(path + "/" + k, "unknown field");
  }
}

}  // namespace

FilterSpec filter_from_json(const json& doc, const std::string& path) {
  FilterSpec f;
  if (doc.is_null()) return f;
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  reject_unknown(doc, {"retained", "activities", "object_types", "min_activity_frequency", "start", "end", "attributes"},
                 path);
  if (doc.contains("retained")) {
    const json& r = doc["retained"];
    if (!r.is_object()) throw SchemaError(path + "/retained", "expected an object");
    for (const auto& [activity, types] : r.items()) {
      const auto list = string_list(types, path + "/retained/" + activity);
      f.retained[activity] = {list.begin(), list.end()};
    }
  }
  if (doc.contains("activities") && !doc["activities"].is_null()) {
    const auto list = string_list(doc["activities"], path + "/activities");
    f.activities = std::set<std::string>(list.begin(), list.end());
  }
  if (doc.contains("object_types") && !doc["object_types"].is_null()) {
    const auto list = string_list(doc["object_types"], path + "/object_types");
    f.object_types = std::set<std::string>(list.begin(), list.end());
  }
  if (doc.contains("min_activity_frequency")) {
    f.min_activity_frequency = count_field(doc["min_activity_frequency"], path + "/min_activity_frequency");
  }
  if (doc.contains("start") && !doc["start"].is_null()) f.start = timestamp_field(doc["start"], path + "/start");
  if (doc.contains("end") && !doc["end"].is_null()) f.end = timestamp_field(doc["end"], path + "/end");
  if (doc.contains("attributes")) {
    const json& list = doc["attributes"];
    if (!list.is_array()) throw SchemaError(path + "/attributes", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ipath = path + "/attributes/" + std::to_string(i);
      AttributePredicate pred;
      pred.attribute = require_string(list[i], "attribute", ipath);
      const std::string op = list[i].contains("op") ? require_string(list[i], "op", ipath) : "eq";
      auto it = std::find_if(std::begin(kOps), std::end(kOps), [&](const auto& e) { return e.second == op; });
      if (it == std::end(kOps)) throw SchemaError(ipath + "/op", "unknown operator '" + op + "'");
      pred.op = it->first;
      if (pred.op != AttributePredicate::Op::exists) {
        const json& v = require(list[i], "value", ipath);
        if (v.is_boolean()) pred.value = v.get<bool>();
        else if (v.is_number_integer()) pred.value = v.get<std::int64_t>();
        else if (v.is_number()) pred.value = v.get<double>();
        else if (v.is_string()) pred.value = v.get<std::string>();
        else throw SchemaError(ipath + "/value", "expected a scalar");
      }
      f.attributes.push_back(std::move(pred));
    }
  }
  return f;
}

json filter_to_json(const FilterSpec& f) {
  json doc = json::object();
  if (!f.retained.empty()) {
    json r = json::object();
    for (const auto& [activity, types] : f.retained) r[activity] = types;
    doc["retained"] = std::move(r);
  }
  if (f.activities) doc["activities"] = *f.activities;
  if (f.object_types) doc["object_types"] = *f.object_types;
  if (f.min_activity_frequency) doc["min_activity_frequency"] = f.min_activity_frequency;
  if (f.start) doc["start"] = format_timestamp_iso(*f.start);
  if (f.end) doc["end"] = format_timestamp_iso(*f.end);
  if (!f.attributes.empty()) {
    json list = json::array();
    for (const auto& pred : f.attributes) {
      auto it = std::find_if(std::begin(kOps), std::end(kOps), [&](const auto& e) { return e.first == pred.op; });
      json entry = {{"attribute", pred.attribute}, {"op", std::string(it->second)}};
      if (pred.op != AttributePredicate::Op::exists) entry["value"] = attribute_json(pred.value);
      list.push_back(std::move(entry));
    }
    doc["attributes"] = std::move(list);
  }
  return doc;
}

DiscoveryParams params_from_json(const json& doc) {
  DiscoveryParams params;
  if (doc.is_null()) return params;
  if (!doc.is_object()) throw SchemaError("", "expected an object");
  reject_unknown(doc, {"noise", "tau", "filter", "types"}, "");
  if (doc.contains("noise")) params.noise = unit_interval(doc["noise"], "/noise");
  if (doc.contains("tau")) params.tau = unit_interval(doc["tau"], "/tau");
  if (doc.contains("filter")) params.filter = filter_from_json(doc["filter"], "/filter");
  if (doc.contains("types") && !doc["types"].is_null()) params.types = string_list(doc["types"], "/types");
  return params;
}

json params_to_json(const DiscoveryParams& params) {
  std::vector<std::string> types = params.types;
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return {{"noise", params.noise}, {"tau", params.tau}, {"filter", filter_to_json(params.filter)}, {"types", types}};
}

ObjectPopulation population_from_json(const json& doc) {
  ObjectPopulation pop;
  if (!doc.is_object()) throw SchemaError("", "expected an object");
  reject_unknown(doc, {"counts", "groups", "batches", "attached", "include_parents", "weights"}, "");
  const json& counts = require(doc, "counts", "");
  if (!counts.is_object()) throw SchemaError("/counts", "expected an object");
  for (const auto& [type, n] : counts.items()) pop.counts[type] = count_field(n, "/counts/" + type);
  if (doc.contains("groups")) {
    const json& list = doc["groups"];
    if (!list.is_array()) throw SchemaError("/groups", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/groups/" + std::to_string(i);
      GroupSpec g;
      g.parent_type = require_string(list[i], "parent_type", path);
      g.child_type = require_string(list[i], "child_type", path);
      if (list[i].contains("sizes")) g.sizes = count_list(list[i]["sizes"], path + "/sizes");
      if (list[i].contains("min_size")) g.min_size = count_field(list[i]["min_size"], path + "/min_size");
      if (list[i].contains("max_size")) g.max_size = count_field(list[i]["max_size"], path + "/max_size");
      pop.groups.push_back(std::move(g));
    }
  }
  if (doc.contains("batches")) {
    const json& list = doc["batches"];
    if (!list.is_array()) throw SchemaError("/batches", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/batches/" + std::to_string(i);
      BatchSpec b;
      b.batch_type = require_string(list[i], "batch_type", path);
      b.member_type = require_string(list[i], "member_type", path);
      b.sizes = count_list(require(list[i], "sizes", path), path + "/sizes");
      pop.batches.push_back(std::move(b));
    }
  }
  if (doc.contains("attached")) {
    const json& list = doc["attached"];
    if (!list.is_array()) throw SchemaError("/attached", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/attached/" + std::to_string(i);
      AttachedSpec a;
      a.type = require_string(list[i], "type", path);
      a.owner_type = require_string(list[i], "owner_type", path);
      a.pool = count_field(require(list[i], "pool", path), path + "/pool");
      if (list[i].contains("min_per_owner")) a.min_per_owner = count_field(list[i]["min_per_owner"], path + "/min_per_owner");
      if (list[i].contains("max_per_owner")) a.max_per_owner = count_field(list[i]["max_per_owner"], path + "/max_per_owner");
      pop.attached.push_back(std::move(a));
    }
  }
  if (doc.contains("include_parents")) {
    const auto list = string_list(doc["include_parents"], "/include_parents");
    pop.include_parents = {list.begin(), list.end()};
  }
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    if (!w.is_object()) throw SchemaError("/weights", "expected an object");
    for (const auto& [name, v] : w.items()) {
      if (!v.is_number() || v.get<double>() < 0) throw SchemaError("/weights/" + name, "expected a non-negative number");
      pop.weights[name] = v.get<double>();
    }
  }
  return pop;
}

json population_to_json(const ObjectPopulation& pop) {
  json doc;
  doc["counts"] = pop.counts;
  json groups = json::array();
  for (const auto& g : pop.groups) {
    json j = {{"parent_type", g.parent_type}, {"child_type", g.child_type}};
    if (!g.sizes.empty()) j["sizes"] = g.sizes;
    else j["min_size"] = g.min_size, j["max_size"] = g.max_size;
    groups.push_back(std::move(j));
  }
  json batches = json::array();
  for (const auto& b : pop.batches) {
    batches.push_back({{"batch_type", b.batch_type}, {"member_type", b.member_type}, {"sizes", b.sizes}});
  }
  json attached = json::array();
  for (const auto& a : pop.attached) {
    attached.push_back({{"type", a.type},
                        {"owner_type", a.owner_type},
                        {"pool", a.pool},
                        {"min_per_owner", a.min_per_owner},
                        {"max_per_owner", a.max_per_owner}});
  }
  doc["groups"] = std::move(groups);
  doc["batches"] = std::move(batches);
  doc["attached"] = std::move(attached);
  doc["include_parents"] = pop.include_parents;
  doc["weights"] = pop.weights;
  return doc;
}

json stats_to_json(const ObjectCentricEventLog& log) {
  json doc;
  doc["events"] = log.size();
  json types = json::object();
  for (TypeId t = 0; t < log.object_types().size(); ++t) types[log.type_name(t)] = log.objects_of_type(t).size();
  doc["objects"] = std::move(types);
  json activities = json::object();
  for (ActivityId a = 0; a < log.activities().size(); ++a) activities[log.activity_name(a)] = log.activity_counts()[a];
  doc["activities"] = std::move(activities);
  json rows = json::array();
  for (const auto& row : object_type_stats(log)) {
    rows.push_back({{"activity", row.activity},
                    {"object_type", row.object_type},
                    {"min", row.min},
                    {"mean", row.mean},
                    {"max", row.max},
                    {"events", row.events},
                    {"unique_objects", row.unique_objects}});
  }
  doc["object_type_stats"] = std::move(rows);
  return doc;
}

json diagnostics_to_json(const FlatteningDiagnostics& d) {
  auto group = [](const std::vector<std::string>& ids) { return json{{"count", ids.size()}, {"events", ids}}; };
  return {{"object_type", d.object_type},
          {"deficient", group(d.deficient)},
          {"convergent", group(d.convergent)},
          {"divergent", group(d.divergent)}};
}

json conformance_to_json(const std::vector<TypeConformance>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"object_type", r.type},
                   {"cases", r.cases},
                   {"accepted", r.accepted},
                   {"undetermined", r.undetermined},
                   {"trace_fraction", r.trace_fraction},
                   {"token_fitness", r.token_fitness}});
  }
  return out;
}

json failure_stats_to_json(const FailureStats& f) {
  json types = json::array();
  for (const auto& r : f.types) {
    types.push_back({{"object_type", r.type}, {"at_least_once", r.at_least_once}, {"at_least_twice", r.at_least_twice}});
  }
  return {{"activity", f.activity}, {"events", f.events}, {"types", std::move(types)}};
}

json event_to_json(const ObjectCentricEventLog& log, std::size_t index) {
  const Event& e = log[index];
  json objects = json::object();
  for (const auto& refs : e.omap) {
    json list = json::array();
    for (ObjectId o : refs.objects) list.push_back(log.object_name(o));
    objects[log.type_name(refs.type)] = std::move(list);
  }
  json attrs = json::object();
  for (const auto& [k, v] : e.attributes) attrs[k] = attribute_json(v);
  return {{"id", e.id},
          {"activity", log.activity_name(e.activity)},
          {"timestamp", format_timestamp_iso(e.time)},
          {"objects", std::move(objects)},
          {"attributes", std::move(attrs)}};
}

// ---------------------------------------------------------------------------
// DOT

namespace {

constexpr std::string_view kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
                                         "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string type_color(const std::string& type, const std::set<std::string>& types) {
  const auto rank = static_cast<std::size_t>(std::distance(types.begin(), types.lower_bound(type)));
  return std::string(kPalette[rank % std::size(kPalette)]);
}

std::string render_dot(const AnnotatedOCPN& model, const DotOptions& options) {
  const auto& ocpn = model.model.ocpn;
  const auto& net = ocpn.net;
  const auto types = ocpn.object_types();
  const Annotations* ann = options.annotations && model.annotations ? &*model.annotations : nullptr;

  std::set<PlaceId> initial, final;
  for (const auto& [token, n] : model.model.initial) initial.insert(token.place);
  for (const auto& [token, n] : model.model.final) final.insert(token.place);

  std::ostringstream out;
  out << "digraph ocpn {\n";
  out << "  rankdir=" << options.rankdir << ";\n";
  out << "  node [fontname=\"Helvetica\", fontsize=10];\n";
  out << "  edge [fontname=\"Helvetica\", fontsize=9];\n";

  for (PlaceId p = 0; p < net.place_count(); ++p) {
    std::string xlabel = net.place_name(p);
    if (initial.count(p)) xlabel += "\nstart";
    if (final.count(p)) xlabel += "\nend";
    if (ann) {
      const auto& d = ann->places.at(p);
      xlabel += "\np=" + std::to_string(d.produced) + ", c=" + std::to_string(d.consumed);
      xlabel += "\nm=" + std::to_string(d.missing) + ", r=" + std::to_string(d.remaining);
    }
    out << "  p" << p << " [shape=circle, style=filled, width=0.4, label=\"\", fillcolor=\""
        << type_color(ocpn.place_type(p), types) << "\"";
    if (initial.count(p) || final.count(p)) out << ", penwidth=" << (final.count(p) ? 3 : 2);
    out << ", xlabel=" << dot_quote(xlabel) << "];\n";
  }

  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    if (net.is_silent(t)) {
      out << "  t" << t << " [shape=box, style=filled, fillcolor=black, width=0.15, height=0.4, label=\"\", tooltip="
          << dot_quote(net.transition_name(t)) << "];\n";
      continue;
    }
    const auto ttypes = ocpn.transition_types(t);
    std::ostringstream label;
    label << "<<table border=\"0\" cellborder=\"0\" cellspacing=\"1\">";
    label << "<tr><td colspan=\"" << std::max<std::size_t>(1, ttypes.size()) << "\"><b>" << html_escape(*net.label(t))
          << "</b></td></tr>";
    if (ann) {
      label << "<tr><td colspan=\"" << std::max<std::size_t>(1, ttypes.size()) << "\">"
            << ann->transitions.at(t).frequency << "</td></tr>";
    }
    label << "<tr>";
    for (const auto& type : ttypes) {
      label << "<td bgcolor=\"" << type_color(type, types) << "\">" << html_escape(type);
      if (ann) {
        auto it = ann->transitions.at(t).types.find(type);
        if (it != ann->transitions.at(t).types.end()) {
          label << " " << it->second.min << "/" << format_mean(it->second.mean) << "/" << it->second.max;
        }
      }
      label << "</td>";
    }
    if (ttypes.empty()) label << "<td></td>";
    label << "</tr></table>>";
    out << "  t" << t << " [shape=box, style=rounded, label=" << label.str() << "];\n";
  }

  for (const Arc& a : net.arcs()) {
    const std::string color = type_color(ocpn.place_type(a.place), types);
    const bool variable = ocpn.is_variable(a);
    if (a.to_transition) out << "  p" << a.place << " -> t" << a.transition;
    else out << "  t" << a.transition << " -> p" << a.place;
    out << " [color=\"" << (variable ? color + ":invis:" + color : color) << "\"";
    if (variable) out << ", penwidth=2";
    if (ann) {
      auto it = ann->arcs.find(a);
      if (it != ann->arcs.end() && it->second.occurrences > 0) {
        const auto& x = it->second;
        std::string text = std::to_string(x.occurrences);
        if (variable) text += " × " + format_mean(x.mean_multiplicity);
        if (options.durations && x.duration.count > 0) text += "\n" + humanize_seconds(x.duration.mean);
        out << ", label=" << dot_quote(text);
      }
    }
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ocpn
