#include <doctest.h>

#include <random>

#include "ocpn/error.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/replay.hpp"
#include "ocpn/simulation.hpp"
#include "support.hpp"

using namespace ocpn;
using ocpn::testing::order_item_route_fragment;
using ocpn::testing::random_log;

namespace {

// Single-type log with one object per case, events a minute apart.
ObjectCentricEventLog case_log(const std::vector<std::vector<std::string>>& traces) {
  LogBuilder b;
  Timestamp t = make_timestamp(2022, 1, 1);
  for (std::size_t c = 0; c < traces.size(); ++c) {
    for (const auto& act : traces[c]) {
      b.add({"", act, t, {{"case", {"c" + std::to_string(c)}}}, {}});
      t += std::chrono::minutes(1);
    }
  }
  return b.build();
}

// p0 -a-> p1 [-b-> p2]
AcceptingPetriNet sequence_net(std::initializer_list<const char*> labels) {
  AcceptingPetriNet apn;
  PlaceId prev = apn.net.add_place("p0");
  apn.initial.add(prev);
  int i = 0;
  for (const char* l : labels) {
    const TransitionId t = apn.net.add_transition(l, l);
    const PlaceId next = apn.net.add_place("p" + std::to_string(++i));
    apn.net.add_input(prev, t);
    apn.net.add_output(t, next);
    prev = next;
  }
  apn.final.add(prev);
  return apn;
}

}  // namespace

TEST_CASE("a fitting trace on a one-transition net") {
  const auto log = case_log({{"a"}});
  const auto r = token_replay(flatten(log, "case"), sequence_net({"a"}));
  CHECK(r.total_produced() == 2);
  CHECK(r.total_consumed() == 2);
  CHECK(r.total_missing() == 0);
  CHECK(r.total_remaining() == 0);
  CHECK(r.fitness() == 1.0);
  CHECK(r.fitting_cases == 1);
}

TEST_CASE("a skipped step leaves missing and remaining tokens") {
  const auto log = case_log({{"b"}});
  const auto apn = sequence_net({"a", "b"});
  const auto r = token_replay(flatten(log, "case"), apn);
  CHECK(r.total_missing() >= 1);
  CHECK(r.total_remaining() >= 1);
  CHECK(r.places[0].remaining == 1);
  CHECK(r.places[1].missing == 1);
  CHECK(r.fitting_cases == 0);
  // p = 2 (initial, b), c = 2 (b, final), m = 1, r = 1.
  CHECK(r.fitness() == doctest::Approx(0.5));
}

TEST_CASE("unknown activities are counted") {
  const auto log = case_log({{"a", "zzz"}});
  const auto r = token_replay(flatten(log, "case"), sequence_net({"a"}));
  CHECK(r.unmatched_events == 1);
  CHECK(r.fitness() == 1.0);
}

TEST_CASE("silent transitions are fired when needed") {
  AcceptingPetriNet apn = sequence_net({"a"});
  const PlaceId p1 = *apn.net.find_place("p1");
  const PlaceId p2 = apn.net.add_place("p2");
  const TransitionId skip = apn.net.add_transition("skip", std::nullopt);
  const TransitionId b = apn.net.add_transition("b", "b");
  apn.net.add_input(p1, skip);
  apn.net.add_output(skip, p2);
  apn.net.add_input(p1, b);
  apn.net.add_output(b, p2);
  apn.final = Marking{p2};
  const auto log = case_log({{"a"}, {"a", "b"}});
  const auto r = token_replay(flatten(log, "case"), apn);
  CHECK(r.fitting_cases == 2);
  CHECK(r.firings[skip] == 1);
  CHECK(r.firings[b] == 1);
  CHECK(r.variants == 2);
}

TEST_CASE("sojourn times") {
  const auto log = case_log({{"a", "b"}});
  const auto r = token_replay(flatten(log, "case"), sequence_net({"a", "b"}));
  CHECK(r.places[1].sojourn.count == 1);
  CHECK(r.places[1].sojourn.mean == 60.0);
  // Initial token sits from the first event to a, the final from b to the last event.
  CHECK(r.places[0].sojourn.mean == 0.0);
  CHECK(r.places[2].sojourn.mean == 0.0);
}

TEST_CASE("token balance on random logs") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 60; ++round) {
    const auto log = random_log(rng, 80, 2);
    const auto model = discover_ocpn(log);
    for (TypeId t : log.types_present()) {
      const auto& type = log.type_name(t);
      const auto proj = project_type(model, type);
      const auto r = token_replay(flatten(log, t), proj.apn);
      for (const auto& p : r.places) CHECK(p.produced + p.missing == p.consumed + p.remaining);
      CHECK(r.fitness() >= 0.0);
      CHECK(r.fitness() <= 1.0);
      // Discovered nets fit their own log.
      CHECK(r.fitting_cases == r.cases);
    }
  }
}

TEST_CASE("annotation of the fragment") {
  const auto log = order_item_route_fragment();
  const auto annotated = annotate(log, discover_ocpn(log));
  REQUIRE(annotated.annotations);
  const auto& net = annotated.model.ocpn.net;
  const auto& ann = *annotated.annotations;
  const TransitionId po = net.transitions_labeled("place order").at(0);
  const auto& t = ann.transitions[po];
  CHECK(t.frequency == 2);
  CHECK(t.types.at("order").unique_objects == 2);
  CHECK(t.types.at("order").mean == 1.0);
  CHECK(t.types.at("item").unique_objects == 5);
  CHECK(t.types.at("item").mean == 2.5);
  CHECK(t.types.at("item").min == 2);
  CHECK(t.types.at("item").max == 3);
  for (const auto& [arc, a] : ann.arcs) {
    if (arc.transition != po || !arc.to_transition) continue;
    if (annotated.model.ocpn.place_type(arc.place) == "item") {
      CHECK(a.occurrences == 2);
      CHECK(a.tokens == 5);
      CHECK(a.mean_multiplicity == 2.5);
    }
  }
  for (const auto& p : ann.places) {
    CHECK(p.missing == 0);
    CHECK(p.remaining == 0);
  }
}

TEST_CASE("annotation is independent of the worker count") {
  const auto log = order_item_route_fragment();
  const auto model = discover_ocpn(log);
  CHECK(annotate(log, model, {1}) == annotate(log, model, {4}));
}

TEST_CASE("failure statistics") {
  LogBuilder b;
  Timestamp t = make_timestamp(2022, 1, 1);
  auto add = [&](const char* act, std::vector<std::string> pkgs) {
    b.add({"", act, t, {{"package", pkgs}}, {}});
    t += std::chrono::minutes(1);
  };
  add("failed delivery", {"k1"});
  add("failed delivery", {"k1"});
  add("failed delivery", {"k1"});
  add("failed delivery", {"k2"});
  add("delivered", {"k3"});
  const auto log = b.build();
  const auto f = failure_stats(log, "failed delivery");
  CHECK(f.events == 4);
  REQUIRE(f.types.size() == 1);
  CHECK(f.types[0].type == "package");
  CHECK(f.types[0].at_least_once == 2);
  CHECK(f.types[0].at_least_twice == 1);
  CHECK_THROWS_AS(failure_stats(log, "lost"), UnknownNameError);
}

TEST_CASE("per-type conformance of the simulated order/item/route log") {
  const auto pop = order_item_route_population();
  const auto log = simulate_log(order_item_route_model(pop), pop, 5);
  const auto rows = conformance(log, discover_ocpn(log));
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.trace_fraction == 1.0);
    CHECK(r.token_fitness == 1.0);
    CHECK(r.undetermined == 0);
  }
  CHECK(rows[0].type == "Item");
  CHECK(rows[0].cases == 500);
}

TEST_CASE("duration summaries") {
  const auto d = DurationStats::of({4, 1, 3, 2});
  CHECK(d.count == 4);
  CHECK(d.mean == 2.5);
  CHECK(d.median == 2.5);
  CHECK(d.min == 1);
  CHECK(d.max == 4);
  CHECK(DurationStats::of({}).count == 0);
}
