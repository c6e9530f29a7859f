#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocpn/cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using ocpn::testing::data_dir;
using ocpn::testing::read_text;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ocpn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ocpn::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ocpn-cli-" + std::to_string(std::rand()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const std::string fragment = (data_dir() / "order_item_route_fragment.csv").string();
const std::string sample = (data_dir() / "order_management_sample.mdl").string();

}  // namespace

TEST_CASE("stats") {
  const auto r = run({"stats", "--log", fragment});
  CHECK(r.code == ocpn::kExitOk);
  CHECK(r.out.find("events: 8") != std::string::npos);
  CHECK(r.out.find("place order") != std::string::npos);
  const auto j = run({"stats", "--log", fragment, "--json"});
  CHECK(json::parse(j.out)["events"] == 8);
}

TEST_CASE("flatten and diagnose") {
  const auto r = run({"flatten", "--log", fragment, "--type", "order"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
  const auto d = run({"diagnose", "--log", fragment, "--type", "order", "--json"});
  CHECK(json::parse(d.out)["deficient"]["count"] == 4);
  const auto bad = run({"flatten", "--log", fragment, "--type", "truck"});
  CHECK(bad.code == ocpn::kExitData);
  CHECK(bad.err.find("truck") != std::string::npos);
}

TEST_CASE("discover, annotate, render and conformance through files") {
  TempDir dir;
  const std::string model = (dir.path / "model.json").string();
  const std::string annotated = (dir.path / "annotated.json").string();
  const std::string dot = (dir.path / "model.dot").string();
  REQUIRE(run({"discover", "--log", sample, "-o", model}).code == 0);
  CHECK(json::parse(read_text(model))["schema_version"] == 1);
  REQUIRE(run({"annotate", "--log", sample, "--model", model, "-o", annotated}).code == 0);
  CHECK(json::parse(read_text(annotated)).contains("annotations"));
  REQUIRE(run({"render", "--model", annotated, "-o", dot}).code == 0);
  CHECK(read_text(dot).rfind("digraph ocpn", 0) == 0);
  const auto c = run({"conformance", "--log", sample, "--model", model, "--json"});
  REQUIRE(c.code == 0);
  for (const auto& row : json::parse(c.out)) CHECK(row["trace_fraction"] == 1.0);
  // No temporary files are left behind.
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
  CHECK(files == 3);
}

TEST_CASE("relative outputs go under the output directory") {
  TempDir dir;
  ::setenv("OCPN_OUTPUT_DIR", dir.path.c_str(), 1);
  const auto r = run({"discover", "--log", fragment, "-o", "sub/model.json"});
  ::unsetenv("OCPN_OUTPUT_DIR");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir.path / "sub" / "model.json"));
}

TEST_CASE("simulate presets are reproducible") {
  TempDir dir;
  const std::string a = (dir.path / "a.mdl").string();
  const std::string b = (dir.path / "b.mdl").string();
  const std::string j = (dir.path / "c.json").string();
  REQUIRE(run({"simulate", "--preset", "order-management", "--orders", "20", "--seed", "4", "-o", a}).code == 0);
  REQUIRE(run({"simulate", "--preset", "order-management", "--orders", "20", "--seed", "4", "-o", b}).code == 0);
  CHECK(read_text(a) == read_text(b));
  REQUIRE(run({"simulate", "--preset", "order-item-route", "-o", j}).code == 0);
  CHECK(json::parse(read_text(j)).contains("events"));
}

TEST_CASE("failures") {
  const auto r = run({"failures", "--log", sample, "--activity", "item out of stock", "--json"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["events"] == 2);
  CHECK(run({"failures", "--log", sample, "--activity", "teleport"}).code == ocpn::kExitData);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == ocpn::kExitUsage);
  CHECK(run({"bogus"}).code == ocpn::kExitUsage);
  CHECK(run({"discover", "--log", fragment, "--tau", "1.5"}).code == ocpn::kExitUsage);
  CHECK(run({"discover", "--log", "/nonexistent/log.mdl"}).code == ocpn::kExitData);
  CHECK(run({"render", "--model", fragment}).code == ocpn::kExitData);
  CHECK(run({"--help"}).code == ocpn::kExitOk);
}
