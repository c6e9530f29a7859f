// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocpn/discovery.hpp"
#include "ocpn/event_log.hpp"
#include "ocpn/io.hpp"
#include "ocpn/multiset.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/petri_net.hpp"
#include "ocpn/replay.hpp"
#include "ocpn/simulation.hpp"
#include "support.hpp"

using namespace ocpn;
namespace t = ocpn::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      else detail.str("");
      pass = false;
      detail << what;
    }
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail.str("");
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << std::fixed << std::setprecision(2) << secs
            << " s): " << o.detail.str() << std::endl;
}

// Flattened-log axioms: unique ids, reflexive, antisymmetric, transitive,
// and the order never runs against time. Transitivity is exhaustive up to
// 80 events and checked on 20000 random triples above that.
std::string check_axioms(const FlattenedEventLog& flat, std::mt19937_64& rng) {
  const std::size_t n = flat.size();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ids.insert(flat.event_id(i)).second) return "duplicate id " + flat.event_id(i);
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!flat.precedes(a, a)) return "not reflexive";
    for (std::size_t b = 0; b < n; ++b) {
      const bool ab = flat.precedes(a, b);
      if (ab && a != b && flat.precedes(b, a)) return "not antisymmetric";
      if (ab && flat.time(a) > flat.time(b)) return "order against time";
    }
  }
  auto transitive = [&](std::size_t a, std::size_t b, std::size_t c) {
    return !(flat.precedes(a, b) && flat.precedes(b, c)) || flat.precedes(a, c);
  };
  if (n <= 80) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (!transitive(a, b, c)) return "not transitive";
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int k = 0; k < 20000; ++k) {
      if (!transitive(pick(rng), pick(rng), pick(rng))) return "not transitive";
    }
  }
  return {};
}

// Places of discovered nets are named by the miner, so arcs are compared by
// (activity, object type, direction).
std::set<std::string> variable_arc_keys(const ObjectCentricPetriNet& n) {
  std::set<std::string> out;
  for (const Arc& a : n.variable_arcs) {
    out.insert(*n.net.label(a.transition) + "/" + n.place_type(a.place) + (a.to_transition ? "/in" : "/out"));
  }
  return out;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icept = (sy - slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss_res += std::pow(y[i] - (slope * x[i] + icept), 2);
    ss_tot += std::pow(y[i] - mean, 2);
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

int main() {
  criterion("fragment flattening gives 4/20/4 events", [](Outcome& o) {
    const auto log = t::order_item_route_fragment();
    const std::size_t order = flatten(log, "order").size();
    const std::size_t item = flatten(log, "item").size();
    const std::size_t route = flatten(log, "route").size();
    o.detail << "order=" << order << " item=" << item << " route=" << route;
    o.expect(order == 4 && item == 20 && route == 4, o.detail.str());
  });

  criterion("flattened logs satisfy the event-log axioms (1000 random logs)", [](Outcome& o) {
    std::mt19937_64 rng(1);
    std::size_t checked = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto log = t::random_log(rng, 200, 4);
      for (TypeId ty : log.types_present()) {
        const auto flat = flatten(log, ty);
        std::size_t expected = 0;
        for (const auto& e : log.events()) expected += e.count_of(ty);
        if (flat.size() != expected) o.expect(false, "log " + std::to_string(i) + ": wrong replica count");
        const std::string why = check_axioms(flat, rng);
        if (!why.empty()) o.expect(false, "log " + std::to_string(i) + ": " + why);
        ++checked;
      }
    }
    if (o.pass) o.detail << checked << " flattenings, 0 violations";
  });

  criterion("order handling net: conf 0.8, 11 markings, 6 loop-free traces", [](Outcome& o) {
    const auto apn = t::order_handling_net();
    TraceLog log;
    log.add({"po", "pi", "sh", "in", "pa", "co"}, 8);
    log.add({"po", "sh", "pi", "in", "pa", "co"}, 2);
    const double conf = conformance_fraction(log, apn);
    const std::size_t markings = reachable_markings(apn).size();
    std::size_t loop_free = 0;
    for (const auto& tr : visible_language(apn, 6)) loop_free += std::count(tr.begin(), tr.end(), "sr") == 0;
    o.detail << "conf=" << conf << " markings=" << markings << " loop-free=" << loop_free;
    o.expect(conf == 0.8 && markings == 11 && loop_free == 6, o.detail.str());
  });

  criterion("order/item/route round trip: fitting replay, exact variable arcs, 100x5 and 10x50", [](Outcome& o) {
    const auto pop = order_item_route_population();
    const auto truth = order_item_route_model(pop);
    const auto log = simulate_log(truth, pop, 42);
    DiscoveryParams params;
    params.noise = 0.0;
    params.tau = 0.98;
    const auto model = discover_ocpn(log, params);
    const auto annotated = annotate(log, model);
    const auto& ocpn = annotated.model.ocpn;
    const auto& ann = *annotated.annotations;

    o.expect(is_well_formed(ocpn).well_formed, "not well-formed");
    std::size_t bad_places = 0;
    for (const auto& p : ann.places) bad_places += (p.missing != 0 || p.remaining != 0);
    o.expect(bad_places == 0, std::to_string(bad_places) + " places with m or r > 0");

    const auto found = variable_arc_keys(ocpn);
    const auto expected = variable_arc_keys(truth.ocpn);
    o.expect(found == expected, "variable arcs differ from the reference model");

    struct Want {
      const char* activity;
      std::size_t n;
      double k;
    };
    const Want wants[] = {{"place order", 100, 5}, {"mark as completed", 100, 5}, {"start route", 10, 50},
                          {"end route", 10, 50}};
    std::ostringstream seen;
    for (const auto& w : wants) {
      const TransitionId tr = ocpn.net.transitions_labeled(w.activity).at(0);
      for (const auto& [arc, a] : ann.arcs) {
        if (arc.transition != tr || ocpn.place_type(arc.place) != "Item") continue;
        if (a.occurrences != w.n || std::abs(a.mean_multiplicity - w.k) > 0.01) {
          o.expect(false, std::string(w.activity) + ": " + std::to_string(a.occurrences) + " x " +
                              std::to_string(a.mean_multiplicity));
        }
      }
      seen << w.activity << " " << w.n << "x" << w.k << "; ";
    }
    if (o.pass) o.detail << "m=r=0 on " << ann.places.size() << " places, " << found.size() << " variable arcs; " << seen.str();
  });

  criterion("running-example stats: place order 1/1.00/1 orders, frequency 2000", [](Outcome& o) {
    const auto log = read_log(t::data_dir() / "order_management.mdl");
    const ObjectTypeStats* row = nullptr;
    const auto rows = object_type_stats(log);
    for (const auto& r : rows) {
      if (r.activity == "place order" && r.object_type == "orders") row = &r;
    }
    o.expect(row != nullptr, "no place order/orders row");
    if (!row) return;
    DiscoveryParams params;
    params.filter = filter_from_json(
        nlohmann::json::parse(t::read_text(t::data_dir() / "order_management_filter.json")));
    const auto annotated = annotate(log, discover_ocpn(log, params));
    const auto& ocpn = annotated.model.ocpn;
    const TransitionId po = ocpn.net.transitions_labeled("place order").at(0);
    const std::size_t freq = annotated.annotations->transitions[po].frequency;
    const std::size_t flat_items = flatten(log, "items").size();
    std::size_t flat_po_items = 0;
    const TypeId items = log.type_id("items");
    for (const auto& e : log.events()) {
      if (log.activity_name(e.activity) == "place order") flat_po_items += e.count_of(items);
    }
    o.detail << "orders per place order " << row->min << "/" << format_mean(row->mean) << "/" << row->max
             << ", frequency " << freq << " (item-flattened place order events " << flat_po_items
             << ", item-flattened log " << flat_items << " events)";
    o.expect(row->min == 1 && row->max == 1 && std::abs(row->mean - 1.0) <= 0.01 && freq == 2000 &&
                 log.objects_of_type(log.type_id("orders")).size() == 2000 &&
                 log.objects_of_type(items).size() == 8159 &&
                 log.objects_of_type(log.type_id("packages")).size() == 1325,
             o.detail.str());
  });

  criterion("pipeline runtime is linear in the number of events (R^2 >= 0.95)", [](Outcome& o) {
    const double per_order = 9.8;
    const std::size_t targets[] = {1000, 2000, 5000, 10000, 20000};
    DiscoveryParams params;
    params.filter.retained = order_management_retained_types();
    params.jobs = 1;
    std::vector<double> xs, ys;
    for (std::size_t target : targets) {
      const auto orders = static_cast<std::size_t>(std::llround(static_cast<double>(target) / per_order));
      const auto pop = order_management_population(orders);
      const auto log = simulate_log(order_management_model(pop), pop, 7);
      std::vector<double> runs;
      for (int rep = 0; rep < 5; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        const auto model = discover_ocpn(log, params);
        const auto annotated = annotate(log, model, {1});
        runs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
      std::sort(runs.begin(), runs.end());
      xs.push_back(static_cast<double>(log.size()));
      ys.push_back(runs[runs.size() / 2]);
      o.detail << log.size() << " events " << std::setprecision(3) << ys.back() << " s; ";
    }
    const double r2 = r_squared(xs, ys);
    o.detail << "R^2=" << std::setprecision(4) << r2;
    o.expect(r2 >= 0.95, o.detail.str());
  });

  criterion("discovered nets fit logs sampled from 500 random trees (depth <= 3)", [](Outcome& o) {
    std::mt19937_64 rng(3);
    std::size_t traces = 0;
    for (int i = 0; i < 500; ++i) {
      int next = 0;
      const auto tree = t::random_tree(rng, 3, next);
      TraceLog log;
      for (int k = 0; k < 25; ++k) log.add(t::sample_trace(tree, rng));
      const auto apn = discover_accepting_net(log, 0.0);
      for (const auto& [tr, n] : log.variants()) {
        ++traces;
        if (!trace_accepted(apn, tr)) o.expect(false, "rejected a trace of " + tree.to_string());
      }
    }
    if (o.pass) o.detail << traces << " distinct traces accepted";
  });

  criterion("multiset laws", [](Outcome& o) {
    using M = Multiset<std::string>;
    const bool sum = M{"a", "b"} + M{"b", "c"} == M{"a", "b", "b", "c"};
    const bool diff = M{"a", "b", "b", "c"} - M{"b", "c"} == M{"a", "b"};
    const bool incl = M{"a", "b"} <= M{"a", "b", "b", "c"};
    o.detail << "sum=" << sum << " difference=" << diff << " inclusion=" << incl;
    o.expect(sum && diff && incl, o.detail.str());
  });

  return failures == 0 ? 0 : 1;
}
