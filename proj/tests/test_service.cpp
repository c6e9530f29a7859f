#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ocpn/service.hpp"
#include "support.hpp"

using namespace ocpn;
using nlohmann::json;
using ocpn::testing::data_dir;
using ocpn::testing::read_text;

namespace {

HttpResponse call(Service& s, std::string method, std::string path, std::string body = {},
                  std::map<std::string, std::string> query = {}) {
  return s.handle({std::move(method), std::move(path), std::move(query), std::move(body)});
}

std::string upload(Service& s, const std::string& file) {
  const auto r = call(s, "POST", "/logs", read_text(data_dir() / file));
  REQUIRE(r.status == 201);
  return json::parse(r.body)["log_id"];
}

std::string discover(Service& s, const std::string& log_id, const json& params = json::object()) {
  const auto r = call(s, "POST", "/logs/" + log_id + "/discover", params.dump());
  REQUIRE((r.status == 201 || r.status == 200));
  return json::parse(r.body)["model_id"];
}

}  // namespace

TEST_CASE("upload and inspect a log") {
  Service s;
  const auto id = upload(s, "order_management_sample.mdl");
  CHECK(id == "log-1");
  const auto stats = call(s, "GET", "/logs/" + id + "/stats");
  CHECK(stats.status == 200);
  CHECK(json::parse(stats.body)["events"] == 18);
  CHECK(stats.headers.at("Access-Control-Allow-Origin") == "*");

  const auto ev = json::parse(call(s, "GET", "/logs/" + id + "/events", "", {{"object", "880006"}}).body);
  CHECK(ev["total"] == 2);
  CHECK(ev["events"][0]["activity"] == "place order");
  const auto page = json::parse(call(s, "GET", "/logs/" + id + "/events", "", {{"offset", "5"}, {"limit", "2"}}).body);
  CHECK(page["events"].size() == 2);
  CHECK(call(s, "GET", "/logs/" + id + "/events", "", {{"object", "nope"}}).status == 404);

  const auto diag = call(s, "GET", "/logs/" + id + "/diagnostics", "", {{"type", "items"}});
  CHECK(diag.status == 200);
  CHECK(json::parse(diag.body)["convergent"]["count"].get<int>() > 0);
  CHECK(call(s, "GET", "/logs/" + id + "/diagnostics").status == 422);
  CHECK(call(s, "GET", "/logs/" + id + "/diagnostics", "", {{"type", "trucks"}}).status == 422);

  const auto flat = call(s, "POST", "/logs/" + id + "/flatten", R"({"type":"orders"})");
  CHECK(flat.status == 200);
  CHECK(flat.content_type == "text/csv");
  CHECK(flat.body.rfind("case_id,activity,timestamp,event_id\n", 0) == 0);
}

TEST_CASE("errors") {
  ServiceConfig cfg;
  cfg.upload_limit = 64;
  Service s(cfg);
  CHECK(call(s, "GET", "/logs/log-9/stats").status == 404);
  CHECK(call(s, "GET", "/models/model-0").status == 404);
  CHECK(call(s, "GET", "/jobs/job-0").status == 404);
  CHECK(call(s, "DELETE", "/logs").status == 404);
  CHECK(call(s, "POST", "/logs", std::string(65, 'x')).status == 413);
  const auto bad = call(s, "POST", "/logs", "event_activity\nx\n");
  CHECK(bad.status == 422);
  CHECK(json::parse(bad.body).contains("detail"));
  CHECK(call(s, "OPTIONS", "/logs").status == 204);
}

TEST_CASE("discovery, caching and model endpoints") {
  Service s;
  const auto id = upload(s, "order_item_route_fragment.csv");
  const auto first = call(s, "POST", "/logs/" + id + "/discover", "{}");
  CHECK(first.status == 201);
  const auto doc = json::parse(first.body);
  CHECK(doc["cached"] == false);
  const auto again = call(s, "POST", "/logs/" + id + "/discover", R"({"tau": 0.98, "noise": 0})");
  CHECK(again.status == 200);
  CHECK(json::parse(again.body)["model_id"] == doc["model_id"]);

  const std::string model_id = doc["model_id"];
  const auto job = json::parse(call(s, "GET", "/jobs/" + std::string(doc["job_id"])).body);
  CHECK(job["status"] == "done");
  CHECK(job["model_id"] == model_id);

  const auto model = json::parse(call(s, "GET", "/models/" + model_id).body);
  CHECK(model["schema_version"] == 1);
  REQUIRE(model.contains("annotations"));
  const auto dot = call(s, "GET", "/models/" + model_id + "/dot");
  CHECK(dot.content_type == "text/vnd.graphviz");
  CHECK(dot.body.find(":invis:") != std::string::npos);

  // The transition endpoint agrees with the model document.
  const auto t = json::parse(call(s, "GET", "/models/" + model_id + "/transitions/place order").body);
  CHECK(t["frequency"] == 2);
  CHECK(t["types"] == model["annotations"]["transitions"]["place order"]["types"]);
  bool variable_item_input = false;
  for (const auto& in : t["inputs"]) {
    if (in["object_type"] == "item") {
      variable_item_input = in["variable"];
      CHECK(in["mean_multiplicity"] == 2.5);
    }
  }
  CHECK(variable_item_input);
  CHECK(call(s, "GET", "/models/" + model_id + "/transitions/teleport").status == 404);

  // tau = 0 removes every variable arc.
  const auto flat_id = discover(s, id, {{"tau", 0.0}});
  CHECK(flat_id != model_id);
  for (const auto& a : json::parse(call(s, "GET", "/models/" + flat_id).body)["arcs"]) CHECK(a["variable"] == false);

  CHECK(call(s, "POST", "/logs/" + id + "/discover", R"({"tau": 3})").status == 422);
  CHECK(call(s, "POST", "/logs/" + id + "/discover", R"({"types": ["truck"]})").status == 422);
  CHECK(call(s, "POST", "/logs/" + id + "/discover", "not json").status == 422);
}

TEST_CASE("model cache evicts the oldest entry") {
  ServiceConfig cfg;
  cfg.cache_size = 2;
  Service s(cfg);
  const auto id = upload(s, "order_item_route_fragment.csv");
  const auto a = discover(s, id, {{"tau", 0.1}});
  const auto b = discover(s, id, {{"tau", 0.2}});
  const auto c = discover(s, id, {{"tau", 0.3}});
  CHECK(call(s, "GET", "/models/" + a).status == 404);
  CHECK(call(s, "GET", "/models/" + b).status == 200);
  CHECK(call(s, "GET", "/models/" + c).status == 200);
}

TEST_CASE("concurrent identical discoveries share one model") {
  Service s;
  const auto id = upload(s, "order_management_sample.mdl");
  std::vector<std::string> ids(6);
  std::vector<std::thread> threads;
  for (auto& out : ids) {
    threads.emplace_back([&] {
      const auto r = s.handle({"POST", "/logs/" + id + "/discover", {}, "{}"});
      out = json::parse(r.body).value("model_id", "");
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& m : ids) CHECK(m == ids[0]);
}

TEST_CASE("http round trip") {
  ServiceConfig cfg;
  cfg.upload_limit = 1 << 20;
  Service s(cfg);
  HttpServer server(s);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread loop([&] { server.run(); });

  httplib::Client client("127.0.0.1", port);
  const auto up = client.Post("/logs", read_text(data_dir() / "order_item_route_fragment.csv"), "text/csv");
  REQUIRE(up);
  CHECK(up->status == 201);
  const std::string log_id = json::parse(up->body)["log_id"];
  const auto disc = client.Post("/logs/" + log_id + "/discover", "{}", "application/json");
  REQUIRE(disc);
  const std::string model_id = json::parse(disc->body)["model_id"];
  const auto t = client.Get("/models/" + model_id + "/transitions/mark%20as%20completed");
  REQUIRE(t);
  CHECK(t->status == 200);
  CHECK(json::parse(t->body)["label"] == "mark as completed");
  CHECK(t->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto big = client.Post("/logs", std::string((1 << 20) + 10, 'x'), "text/csv");
  REQUIRE(big);
  CHECK(big->status == 413);

  server.stop();
  loop.join();
}
