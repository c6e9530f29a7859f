// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "ocpn/event_log.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/replay.hpp"

namespace ocpn {

struct ServiceConfig {
  std::size_t upload_limit = 64 * 1024 * 1024;  ///< bytes
  std::size_t cache_size = 64;                  ///< discovered models kept
  std::chrono::seconds idle_timeout{3600};      ///< 0 keeps logs forever
  std::string cors_origin = "*";
  std::size_t jobs = 0;  ///< worker threads per discovery
};

/// Transport-independent request. `path` is already percent-decoded.
struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

/// In-memory store of uploaded logs and discovered models behind a JSON API:
///
///   POST /logs                          upload MDL or JSON log -> 201 {log_id}
///   GET  /logs/{id}/stats
///   GET  /logs/{id}/events?object=&offset=&limit=
///   GET  /logs/{id}/diagnostics?type=
///   POST /logs/{id}/discover            {noise, tau, filter, types} -> {model_id, job_id}
///   POST /logs/{id}/flatten             {type} -> CSV
///   GET  /models/{id}                   annotated model JSON
///   GET  /models/{id}/dot
///   GET  /models/{id}/transitions/{label}
///   GET  /jobs/{id}
///
/// Errors are {"error", "detail"}: 404 unknown id or route, 413 oversized
/// upload, 422 invalid input. Safe to call from several threads.
class Service {
public:
  explicit Service(ServiceConfig config = {});

  HttpResponse handle(const HttpRequest& request);
  const ServiceConfig& config() const noexcept { return config_; }

private:
  struct LogEntry {
    std::shared_ptr<const ObjectCentricEventLog> log;
    std::chrono::steady_clock::time_point last_access;
  };
  struct ModelEntry {
    std::string log_id;
    std::string params;  // canonical JSON
    std::shared_ptr<const AnnotatedOCPN> model;
  };
  struct Job {
    std::string status;  // running | done | failed
    std::string log_id;
    std::string model_id;
    std::string error;
  };

  HttpResponse upload(const HttpRequest& request);
  HttpResponse stats(const std::string& log_id);
  HttpResponse events(const std::string& log_id, const HttpRequest& request);
  HttpResponse diagnostics(const std::string& log_id, const HttpRequest& request);
  HttpResponse discover(const std::string& log_id, const HttpRequest& request);
  HttpResponse flatten_log(const std::string& log_id, const HttpRequest& request);
  HttpResponse model(const std::string& model_id);
  HttpResponse dot(const std::string& model_id);
  HttpResponse transition(const std::string& model_id, const std::string& label);
  HttpResponse job(const std::string& job_id);

  std::shared_ptr<const ObjectCentricEventLog> find_log(const std::string& id);
  std::shared_ptr<const AnnotatedOCPN> find_model(const std::string& id);
  void expire_idle();

  ServiceConfig config_;
  std::mutex mutex_;
  std::size_t next_log_ = 1;
  std::map<std::string, LogEntry> logs_;
  std::map<std::string, ModelEntry> models_;
  std::deque<std::string> model_order_;
  std::map<std::string, Job> jobs_;
  std::map<std::string, std::shared_future<void>> in_flight_;
};

/// Binds an HTTP listener to a Service. Headers for CORS are added to every
/// response and OPTIONS requests are answered with 204.
class HttpServer {
public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns the bound port (an ephemeral one when `port` is 0). Throws Error on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ocpn
