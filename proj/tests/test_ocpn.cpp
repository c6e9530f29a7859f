#include <doctest.h>

#include "ocpn/error.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/simulation.hpp"
#include "support.hpp"

using namespace ocpn;
using ocpn::testing::order_item_route_fragment;

namespace {

Trace tr(std::initializer_list<const char*> xs) { return Trace(xs.begin(), xs.end()); }

AcceptingPetriNet chain(const std::string& prefix, std::initializer_list<const char*> labels) {
  AcceptingPetriNet apn;
  PlaceId prev = apn.net.add_place(prefix + "0");
  apn.initial.add(prev);
  int i = 0;
  for (const char* l : labels) {
    const TransitionId t = apn.net.add_transition(prefix + "t" + std::to_string(i), l);
    const PlaceId next = apn.net.add_place(prefix + std::to_string(++i));
    apn.net.add_input(prev, t);
    apn.net.add_output(t, next);
    prev = next;
  }
  apn.final.add(prev);
  return apn;
}

ObjectPopulation small_population() {
  ObjectPopulation pop;
  pop.counts = {{"Order", 2}, {"Item", 4}, {"Route", 1}};
  pop.groups.push_back({"Order", "Item", {2, 2}, 1, 1});
  pop.batches.push_back({"Route", "Item", {4}});
  return pop;
}

}  // namespace

TEST_CASE("merging fuses transitions by label") {
  std::map<std::string, AcceptingPetriNet> nets;
  nets["order"] = chain("p", {"place", "ship"});
  nets["item"] = chain("p", {"place", "pick"});
  const auto merged = merge_nets(nets);
  CHECK(merged.net.transition_count() == 3);
  CHECK(merged.net.place_count() == 6);
  CHECK(merged.place_types.size() == 6);
  const TransitionId place = merged.net.transitions_labeled("place").at(0);
  CHECK(merged.net.inputs(place).size() == 2);
  CHECK(merged.initial.at("order").size() == 1);
  CHECK(merged.net.find_place("order/p0"));
}

TEST_CASE("discovery on the fragment") {
  const auto log = order_item_route_fragment();
  const auto model = discover_ocpn(log);
  const auto& ocpn = model.ocpn;
  CHECK(ocpn.object_types() == std::set<std::string>{"item", "order", "route"});
  CHECK(is_well_formed(ocpn).well_formed);
  // Item arcs of every activity are variable; order and route arcs are not.
  for (const Arc& a : ocpn.net.arcs()) {
    if (ocpn.net.is_silent(a.transition)) {
      CHECK_FALSE(ocpn.is_variable(a));
      continue;
    }
    CHECK(ocpn.is_variable(a) == (ocpn.place_type(a.place) == "item"));
  }
  // One token per object of the type in the initial marking.
  CHECK(model.initial.size() == 2 + 5 + 2);
  CHECK(model.final.size() == 9);

  DiscoveryParams p;
  p.tau = 0.0;
  CHECK(discover_ocpn(log, p).ocpn.variable_arcs.empty());
  p.types = {"order"};
  CHECK(discover_ocpn(log, p).ocpn.object_types() == std::set<std::string>{"order"});
  p.types = {"ghost"};
  CHECK_THROWS_AS(discover_ocpn(log, p), UnknownNameError);
  p.types.clear();
  p.tau = 1.5;
  CHECK_THROWS_AS(discover_ocpn(log, p), InvalidArgumentError);
}

TEST_CASE("projection recovers each type's net") {
  const auto log = order_item_route_fragment();
  const auto model = discover_ocpn(log);
  for (const std::string type : {"order", "item", "route"}) {
    const auto proj = project_type(model, type);
    const auto traces = to_trace_log(flatten(log, type));
    CHECK(proj.apn.initial.size() == 1);
    CHECK(conformance_fraction(traces, proj.apn) == 1.0);
  }
  const auto order = project_type(model, "order");
  CHECK(trace_accepted(order.apn, tr({"place order", "mark as completed"})));
}

TEST_CASE("well-formedness violations") {
  ObjectCentricPetriNet n;
  const PlaceId a = n.net.add_place("a");
  const PlaceId b = n.net.add_place("b");
  n.place_types = {"x", "x"};
  const TransitionId t = n.net.add_transition("t", "t");
  n.net.add_input(a, t);
  n.net.add_output(t, b);
  n.variable_arcs.insert({a, t, true});
  const auto wf = is_well_formed(n);
  CHECK_FALSE(wf.well_formed);
  REQUIRE(wf.violations.size() == 1);
  CHECK(wf.violations[0].second == "x");
}

TEST_CASE("binding execution on the order/item/route model") {
  const auto model = order_item_route_model(small_population());
  const auto& net = model.ocpn.net;
  auto t = [&](const char* label) { return net.transitions_labeled(label).at(0); };
  CHECK(is_well_formed(model.ocpn).well_formed);
  CHECK(model.initial.size() == 7);

  const Binding po{t("place order"), {{"Order", {"Order-1"}}, {"Item", {"Item-1", "Item-2"}}}};
  const auto m1 = execute_binding(model, model.initial, po);
  CHECK(m1.size() == 7);
  CHECK(m1.count({*net.find_place("o2"), "Order-1"}) == 1);
  CHECK(m1.count({*net.find_place("i2"), "Item-2"}) == 1);
  CHECK(consumed_tokens(model.ocpn, po).size() == 3);
  CHECK(produced_tokens(model.ocpn, po).size() == 3);

  // Non-variable types need exactly one object.
  CHECK_THROWS_AS(execute_binding(model, model.initial,
                                  {t("place order"), {{"Order", {"Order-1", "Order-2"}}, {"Item", {"Item-1"}}}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(execute_binding(model, model.initial, {t("pay order"), {{"Order", {"Order-1"}}}}),
                  NotEnabledError);

  const auto run = execute_binding_sequence(
      model, {po, {t("send invoice"), {{"Order", {"Order-1"}}}}, {t("pay order"), {{"Order", {"Order-1"}}}}});
  REQUIRE(run.visible.size() == 3);
  CHECK(run.visible[1].activity == "send invoice");
  CHECK(run.marking.count({*net.find_place("o4"), "Order-1"}) == 1);
}

TEST_CASE("variable arc detection follows the score threshold") {
  const auto log = order_item_route_fragment();
  const auto model = discover_ocpn(log);
  const auto& n = model.ocpn.net;
  const auto vars = identify_variable_arcs(log, n, model.ocpn.place_types, 0.98);
  CHECK(vars == model.ocpn.variable_arcs);
  CHECK(identify_variable_arcs(log, n, model.ocpn.place_types, 0.0).empty());
}
