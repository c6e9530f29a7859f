#include <doctest.h>

#include <deque>
#include <set>
#include <unordered_set>

#include "ocpn/error.hpp"
#include "ocpn/petri_net.hpp"
#include "support.hpp"

using namespace ocpn;
using ocpn::testing::order_handling_net;

namespace {

Trace tr(std::initializer_list<const char*> xs) { return Trace(xs.begin(), xs.end()); }

// Plain BFS over markings, written against fire/is_enabled only.
std::size_t count_reachable(const AcceptingPetriNet& apn) {
  std::unordered_set<Marking, MarkingHash> seen{apn.initial};
  std::deque<Marking> queue{apn.initial};
  while (!queue.empty()) {
    const Marking m = queue.front();
    queue.pop_front();
    for (TransitionId t = 0; t < apn.net.transition_count(); ++t) {
      if (!is_enabled(apn.net, m, t)) continue;
      Marking next = fire(apn.net, m, t);
      if (seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  return seen.size();
}

}  // namespace

TEST_CASE("order handling net reachability") {
  const auto apn = order_handling_net();
  CHECK(apn.net.place_count() == 8);
  CHECK(apn.net.transition_count() == 7);
  CHECK(count_reachable(apn) == 11);
  CHECK(reachable_markings(apn).size() == 11);
}

TEST_CASE("order handling net language") {
  const auto apn = order_handling_net();
  CHECK(trace_accepted(apn, tr({"po", "pi", "sh", "in", "pa", "co"})));
  CHECK(trace_accepted(apn, tr({"po", "in", "pi", "sr", "sh", "sr", "pa", "co"})));
  CHECK(trace_accepted(apn, tr({"po", "in", "sr", "pi", "pa", "sh", "co"})));
  CHECK_FALSE(trace_accepted(apn, tr({"po", "sh", "pi", "in", "pa", "co"})));
  CHECK_FALSE(trace_accepted(apn, tr({"po", "pi", "sh", "in", "pa"})));

  // Traces without sr are the loop-free ones.
  const auto lang = visible_language(apn, 6);
  std::size_t loop_free = 0;
  for (const auto& t : lang) loop_free += std::find(t.begin(), t.end(), "sr") == t.end();
  CHECK(loop_free == 6);
  for (const auto& t : lang) CHECK(trace_accepted(apn, t));
}

TEST_CASE("conformance fraction of 8 fitting and 2 deviating traces") {
  TraceLog log;
  log.add(tr({"po", "pi", "sh", "in", "pa", "co"}), 8);
  log.add(tr({"po", "sh", "pi", "in", "pa", "co"}), 2);
  CHECK(conformance_fraction(log, order_handling_net()) == 0.8);
}

TEST_CASE("firing") {
  const auto apn = order_handling_net();
  const auto& n = apn.net;
  const TransitionId po = *n.find_transition("po");
  const TransitionId co = *n.find_transition("co");
  CHECK(is_enabled(n, apn.initial, po));
  CHECK_FALSE(is_enabled(n, apn.initial, co));
  const Marking m = fire(n, apn.initial, po);
  CHECK(n.format(m) == "[p2, p3]");
  CHECK_THROWS_AS(fire(n, apn.initial, co), NotEnabledError);
  CHECK(enabled_transitions(n, m).size() == 2);
}

TEST_CASE("net construction") {
  LabeledPetriNet n;
  const PlaceId p = n.add_place("p");
  CHECK_THROWS_AS(n.add_place("p"), Error);
  const TransitionId t = n.add_transition("t", std::nullopt);
  n.add_input(p, t);
  n.add_input(p, t);
  CHECK(n.arcs().size() == 1);
  CHECK(n.is_silent(t));
  CHECK(n.consumers(p) == std::vector<TransitionId>{t});
  CHECK(n.transitions_labeled("t").empty());
}

TEST_CASE("exploration limits are reported") {
  // A producer loop makes the state space unbounded.
  AcceptingPetriNet apn;
  const PlaceId p = apn.net.add_place("p");
  const PlaceId q = apn.net.add_place("q");
  const TransitionId t = apn.net.add_transition("t", "a");
  apn.net.add_input(p, t);
  apn.net.add_output(t, p);
  apn.net.add_output(t, q);
  apn.initial.add(p);
  CHECK_THROWS_AS(reachable_markings(apn, 50), ExplorationLimitError);
}
