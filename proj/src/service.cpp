// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/service.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include <httplib.h>

#include "ocpn/error.hpp"
#include "ocpn/io.hpp"

namespace ocpn {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump(), {}}; }

HttpResponse error_response(int status, const std::string& error, const std::string& detail) {
  return json_response(status, {{"error", error}, {"detail", detail}});
}

HttpResponse not_found(const std::string& what) { return error_response(404, "not_found", what); }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : path) {
    if (c == '/') {
      if (!current.empty()) parts.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  return parts;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<std::size_t> query_count(const HttpRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return std::nullopt;
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (ec != std::errc() || p != it->second.data() + it->second.size()) {
    throw SchemaError("?" + key, "expected a non-negative integer, got '" + it->second + "'");
  }
  return v;
}

json parse_body(const HttpRequest& r) {
  if (r.body.empty()) return json::object();
  json doc = json::parse(r.body, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("", "request body is not valid JSON");
  return doc;
}

json arc_annotation_json(const AnnotatedOCPN& m, const Arc& a) {
  const auto& net = m.model.ocpn.net;
  json j = {{"place", net.place_name(a.place)},
            {"object_type", m.model.ocpn.place_type(a.place)},
            {"variable", m.model.ocpn.is_variable(a)}};
  if (m.annotations) {
    auto it = m.annotations->arcs.find(a);
    if (it != m.annotations->arcs.end()) {
      const auto& x = it->second;
      j["occurrences"] = x.occurrences;
      j["tokens"] = x.tokens;
      j["mean_multiplicity"] = x.mean_multiplicity;
      j["min_multiplicity"] = x.min_multiplicity;
      j["max_multiplicity"] = x.max_multiplicity;
      j["duration"] = duration_to_json(x.duration);
    }
  }
  return j;
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}

HttpResponse Service::handle(const HttpRequest& request) {
  HttpResponse response;
  try {
    expire_idle();
    const auto parts = split_path(request.path);
    const std::string& m = request.method;
    const std::size_t n = parts.size();
    if (m == "OPTIONS") {
      response = {204, "text/plain", "", {}};
    } else if (n == 1 && parts[0] == "logs" && m == "POST") {
      response = upload(request);
    } else if (n == 3 && parts[0] == "logs" && m == "GET" && parts[2] == "stats") {
      response = stats(parts[1]);
    } else if (n == 3 && parts[0] == "logs" && m == "GET" && parts[2] == "events") {
      response = events(parts[1], request);
    } else if (n == 3 && parts[0] == "logs" && m == "GET" && parts[2] == "diagnostics") {
      response = diagnostics(parts[1], request);
    } else if (n == 3 && parts[0] == "logs" && m == "POST" && parts[2] == "discover") {
      response = discover(parts[1], request);
    } else if (n == 3 && parts[0] == "logs" && m == "POST" && parts[2] == "flatten") {
      response = flatten_log(parts[1], request);
    } else if (n == 2 && parts[0] == "models" && m == "GET") {
      response = model(parts[1]);
    } else if (n == 3 && parts[0] == "models" && m == "GET" && parts[2] == "dot") {
      response = dot(parts[1]);
    } else if (n == 4 && parts[0] == "models" && m == "GET" && parts[2] == "transitions") {
      response = transition(parts[1], parts[3]);
    } else if (n == 2 && parts[0] == "jobs" && m == "GET") {
      response = job(parts[1]);
    } else {
      response = not_found("no route for " + m + " " + request.path);
    }
  } catch (const UnknownNameError& e) {
    response = error_response(422, "unknown_name", e.what());
  } catch (const Error& e) {
    response = error_response(422, "invalid_input", e.what());
  } catch (const std::exception& e) {
    response = error_response(500, "internal", e.what());
  }
  response.headers["Access-Control-Allow-Origin"] = config_.cors_origin;
  response.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
  response.headers["Access-Control-Allow-Headers"] = "Content-Type";
  return response;
}

void Service::expire_idle() {
  if (config_.idle_timeout.count() == 0) return;
  std::lock_guard lock(mutex_);
  const auto now = std::chrono::steady_clock::now();
  for (auto it = logs_.begin(); it != logs_.end();) {
    if (now - it->second.last_access <= config_.idle_timeout) {
      ++it;
      continue;
    }
    const std::string id = it->first;
    it = logs_.erase(it);
    for (auto mt = models_.begin(); mt != models_.end();) {
      mt = mt->second.log_id == id ? models_.erase(mt) : std::next(mt);
    }
  }
}

std::shared_ptr<const ObjectCentricEventLog> Service::find_log(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = logs_.find(id);
  if (it == logs_.end()) return nullptr;
  it->second.last_access = std::chrono::steady_clock::now();
  return it->second.log;
}

std::shared_ptr<const AnnotatedOCPN> Service::find_model(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) return nullptr;
  auto lt = logs_.find(it->second.log_id);
  if (lt != logs_.end()) lt->second.last_access = std::chrono::steady_clock::now();
  return it->second.model;
}

HttpResponse Service::upload(const HttpRequest& request) {
  if (request.body.size() > config_.upload_limit) {
    return error_response(413, "payload_too_large",
                          "upload of " + std::to_string(request.body.size()) + " bytes exceeds the limit of " +
                              std::to_string(config_.upload_limit));
  }
  std::shared_ptr<const ObjectCentricEventLog> log;
  try {
    log = std::make_shared<const ObjectCentricEventLog>(parse_log_text(request.body));
  } catch (const ParseError& e) {
    std::string detail = e.what();
    if (e.row()) detail = "line " + std::to_string(e.row()) + (e.column().empty() ? "" : " (column " + e.column() + ")") + ": " + detail;
    return error_response(422, "invalid_log", detail);
  }
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "log-" + std::to_string(next_log_++);
    logs_[id] = {log, std::chrono::steady_clock::now()};
  }
  return json_response(201, {{"log_id", id}, {"events", log->size()}, {"object_types", log->object_types()}});
}

HttpResponse Service::stats(const std::string& log_id) {
  auto log = find_log(log_id);
  if (!log) return not_found("unknown log '" + log_id + "'");
  return json_response(200, stats_to_json(*log));
}

HttpResponse Service::events(const std::string& log_id, const HttpRequest& request) {
  auto log = find_log(log_id);
  if (!log) return not_found("unknown log '" + log_id + "'");
  const std::size_t offset = query_count(request, "offset").value_or(0);
  const std::size_t limit = query_count(request, "limit").value_or(100);
  std::vector<std::size_t> selected;
  auto it = request.query.find("object");
  if (it != request.query.end()) {
    const auto object = log->find_object(it->second);
    if (!object) return not_found("unknown object '" + it->second + "'");
    selected = log->lifecycle(*object);
  } else {
    selected.resize(log->size());
    for (std::size_t i = 0; i < log->size(); ++i) selected[i] = i;
  }
  json list = json::array();
  for (std::size_t k = offset; k < selected.size() && k < offset + limit; ++k) list.push_back(event_to_json(*log, selected[k]));
  return json_response(200, {{"total", selected.size()}, {"offset", offset}, {"limit", limit}, {"events", std::move(list)}});
}

HttpResponse Service::diagnostics(const std::string& log_id, const HttpRequest& request) {
  auto log = find_log(log_id);
  if (!log) return not_found("unknown log '" + log_id + "'");
  auto it = request.query.find("type");
  if (it == request.query.end()) return error_response(422, "invalid_input", "query parameter 'type' is required");
  return json_response(200, diagnostics_to_json(flattening_diagnostics(*log, it->second)));
}

HttpResponse Service::discover(const std::string& log_id, const HttpRequest& request) {
  auto log = find_log(log_id);
  if (!log) return not_found("unknown log '" + log_id + "'");
  DiscoveryParams params = params_from_json(parse_body(request));
  params.jobs = config_.jobs;
  const std::string canonical = params_to_json(params).dump();
  const std::string hash = fnv1a_hex(log_id + "\n" + canonical);
  const std::string model_id = "model-" + hash;
  const std::string job_id = "job-" + hash;

  std::promise<void> done;
  {
    std::unique_lock lock(mutex_);
    if (models_.count(model_id)) {
      return json_response(200, {{"model_id", model_id}, {"job_id", job_id}, {"cached", true}});
    }
    auto flight = in_flight_.find(model_id);
    if (flight != in_flight_.end()) {
      auto future = flight->second;
      lock.unlock();
      future.wait();
      lock.lock();
      const Job& j = jobs_[job_id];
      if (j.status == "failed") return error_response(422, "discovery_failed", j.error);
      return json_response(200, {{"model_id", model_id}, {"job_id", job_id}, {"cached", true}});
    }
    in_flight_[model_id] = done.get_future().share();
    jobs_[job_id] = {"running", log_id, "", ""};
  }

  std::shared_ptr<const AnnotatedOCPN> result;
  std::string failure;
  try {
    const ObjectCentricEventLog prepared = prepare_log(*log, params);
    const AcceptingOCPN discovered = discover_ocpn(prepared, params);
    result = std::make_shared<const AnnotatedOCPN>(annotate(prepared, discovered, {params.jobs}));
  } catch (const Error& e) {
    failure = e.what();
  }
  {
    std::lock_guard lock(mutex_);
    Job& j = jobs_[job_id];
    if (result) {
      models_[model_id] = {log_id, canonical, result};
      model_order_.push_back(model_id);
      while (model_order_.size() > config_.cache_size && config_.cache_size > 0) {
        models_.erase(model_order_.front());
        model_order_.pop_front();
      }
      j.status = "done";
      j.model_id = model_id;
    } else {
      j.status = "failed";
      j.error = failure;
    }
    in_flight_.erase(model_id);
  }
  done.set_value();
  if (!result) return error_response(422, "discovery_failed", failure);
  return json_response(201, {{"model_id", model_id}, {"job_id", job_id}, {"cached", false}});
}

HttpResponse Service::flatten_log(const std::string& log_id, const HttpRequest& request) {
  auto log = find_log(log_id);
  if (!log) return not_found("unknown log '" + log_id + "'");
  const json body = parse_body(request);
  if (!body.is_object() || !body.contains("type") || !body["type"].is_string()) {
    throw SchemaError("/type", "expected the object type to flatten by");
  }
  const std::string type = body["type"].get<std::string>();
  std::ostringstream out;
  write_flattened_csv(out, flatten(*log, type));
  HttpResponse r{200, "text/csv", out.str(), {}};
  r.headers["Content-Disposition"] = "attachment; filename=\"" + log_id + "-" + type + ".csv\"";
  return r;
}

HttpResponse Service::model(const std::string& model_id) {
  auto m = find_model(model_id);
  if (!m) return not_found("unknown model '" + model_id + "'");
  return json_response(200, model_to_json(*m));
}

HttpResponse Service::dot(const std::string& model_id) {
  auto m = find_model(model_id);
  if (!m) return not_found("unknown model '" + model_id + "'");
  return {200, "text/vnd.graphviz", render_dot(*m), {}};
}

HttpResponse Service::transition(const std::string& model_id, const std::string& label) {
  auto m = find_model(model_id);
  if (!m) return not_found("unknown model '" + model_id + "'");
  const auto& net = m->model.ocpn.net;
  const auto matches = net.transitions_labeled(label);
  if (matches.empty()) return not_found("model '" + model_id + "' has no transition labeled '" + label + "'");
  const TransitionId t = matches.front();
  json doc = {{"transition", net.transition_name(t)}, {"label", label}};
  if (m->annotations) {
    const json ann = transition_annotation_to_json(m->annotations->transitions.at(t));
    doc["frequency"] = ann["frequency"];
    doc["types"] = ann["types"];
  }
  json inputs = json::array();
  json outputs = json::array();
  for (PlaceId p : net.inputs(t)) inputs.push_back(arc_annotation_json(*m, {p, t, true}));
  for (PlaceId p : net.outputs(t)) outputs.push_back(arc_annotation_json(*m, {p, t, false}));
  doc["inputs"] = std::move(inputs);
  doc["outputs"] = std::move(outputs);
  return json_response(200, doc);
}

HttpResponse Service::job(const std::string& job_id) {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return not_found("unknown job '" + job_id + "'");
  json doc = {{"job_id", job_id}, {"status", it->second.status}, {"log_id", it->second.log_id}};
  if (!it->second.model_id.empty()) doc["model_id"] = it->second.model_id;
  if (!it->second.error.empty()) doc["error"] = it->second.error;
  return json_response(200, doc);
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    const HttpResponse out = impl_->service.handle(r);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    if (!out.body.empty()) res.set_content(out.body, out.content_type);
  };
  auto& s = impl_->server;
  s.set_payload_max_length(service.config().upload_limit + 1);
  s.Get(R"(/.*)", handler);
  s.Post(R"(/.*)", handler);
  s.Options(R"(/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& s = impl_->server;
  const int bound = port == 0 ? s.bind_to_any_port(host) : (s.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace ocpn
