// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
//
// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ocpn/discovery.hpp"
#include "ocpn/event_log.hpp"
#include "ocpn/petri_net.hpp"
#include "ocpn/time.hpp"

namespace ocpn::testing {

inline std::filesystem::path data_dir() { return OCPN_DATA_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// The eight events of the order/item/route fragment table.
inline ObjectCentricEventLog order_item_route_fragment() {
  auto t = [](unsigned d, unsigned m, unsigned h, unsigned min) { return make_timestamp(2019, m, d, h, min); };
  LogBuilder b;
  b.declare_type("order").declare_type("item").declare_type("route");
  b.add({"", "place order", t(25, 11, 9, 35), {{"order", {"99001"}}, {"item", {"88124", "88125", "88126"}}}, {}});
  b.add({"", "place order", t(25, 11, 11, 35), {{"order", {"99002"}}, {"item", {"88127", "88128"}}}, {}});
  b.add({"", "start route", t(25, 11, 11, 35), {{"item", {"88124", "88127"}}, {"route", {"66222"}}}, {}});
  b.add({"", "end route", t(25, 11, 11, 35), {{"item", {"88124", "88127"}}, {"route", {"66222"}}}, {}});
  b.add({"", "start route", t(25, 11, 11, 35), {{"item", {"88125", "88126", "88128"}}, {"route", {"66223"}}}, {}});
  b.add({"", "end route", t(25, 11, 11, 35), {{"item", {"88125", "88126", "88128"}}, {"route", {"66223"}}}, {}});
  b.add({"", "mark as completed", t(1, 12, 9, 35), {{"order", {"99001"}}, {"item", {"88124", "88125", "88126"}}}, {}});
  b.add({"", "mark as completed", t(4, 12, 11, 5), {{"order", {"99002"}}, {"item", {"88127", "88128"}}}, {}});
  return b.build();
}

/// Order handling net: po splits into a pick/ship branch and an invoice/
/// reminder/pay branch that join at co.
inline AcceptingPetriNet order_handling_net() {
  AcceptingPetriNet apn;
  auto& n = apn.net;
  std::vector<PlaceId> p;
  for (int i = 1; i <= 8; ++i) p.push_back(n.add_place("p" + std::to_string(i)));
  auto tr = [&](const std::string& l, std::vector<int> in, std::vector<int> out) {
    const TransitionId t = n.add_transition(l, l);
    for (int i : in) n.add_input(p[i - 1], t);
    for (int o : out) n.add_output(t, p[o - 1]);
  };
  tr("po", {1}, {2, 3});
  tr("pi", {2}, {4});
  tr("sh", {4}, {6});
  tr("in", {3}, {5});
  tr("sr", {5}, {5});
  tr("pa", {5}, {7});
  tr("co", {6, 7}, {8});
  apn.initial.add(p[0]);
  apn.final.add(p[7]);
  return apn;
}

/// Random log: up to `max_events` events over up to `max_types` types, with
/// timestamp ties, events touching 1..3 objects per chosen type.
inline ObjectCentricEventLog random_log(std::mt19937_64& rng, std::size_t max_events = 200, std::size_t max_types = 4) {
  std::uniform_int_distribution<std::size_t> nev(1, max_events), ntypes(1, max_types), pool(1, 12);
  const std::size_t events = nev(rng);
  const std::size_t types = ntypes(rng);
  std::vector<std::size_t> pools(types);
  for (auto& p : pools) p = pool(rng);
  const char* activities[] = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<int> act(0, 4), minutes(0, 30), count(0, 3), coin(0, 1);
  LogBuilder b;
  for (std::size_t t = 0; t < types; ++t) b.declare_type("t" + std::to_string(t));
  Timestamp now = make_timestamp(2020, 1, 1);
  for (std::size_t e = 0; e < events; ++e) {
    EventRecord r;
    r.activity = activities[act(rng)];
    // Events are added out of time order now and then.
    now += std::chrono::minutes(minutes(rng));
    r.time = coin(rng) ? now : now - std::chrono::minutes(minutes(rng));
    for (std::size_t t = 0; t < types; ++t) {
      const int k = count(rng);
      std::set<std::string> objs;
      for (int i = 0; i < k; ++i) {
        objs.insert("t" + std::to_string(t) + "-o" + std::to_string(std::uniform_int_distribution<std::size_t>(1, pools[t])(rng)));
      }
      if (!objs.empty()) r.objects["t" + std::to_string(t)] = {objs.begin(), objs.end()};
    }
    if (r.objects.empty()) r.objects["t0"] = {"t0-o1"};
    b.add(std::move(r));
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Process trees

/// Random tree of the given maximum depth with distinct activity labels.
inline ProcessTree random_tree(std::mt19937_64& rng, std::size_t depth, int& next_label) {
  std::uniform_int_distribution<int> pick(0, 9);
  if (depth <= 1 || pick(rng) < 3) {
    if (pick(rng) == 0) return ProcessTree::tau();
    return ProcessTree::leaf("a" + std::to_string(next_label++));
  }
  using K = ProcessTree::Kind;
  const K kinds[] = {K::exclusive, K::sequence, K::parallel, K::loop};
  const K kind = kinds[std::uniform_int_distribution<int>(0, 3)(rng)];
  const std::size_t n = kind == K::loop ? 2 : std::uniform_int_distribution<std::size_t>(2, 3)(rng);
  std::vector<ProcessTree> children;
  for (std::size_t i = 0; i < n; ++i) children.push_back(random_tree(rng, depth - 1, next_label));
  return ProcessTree::node(kind, std::move(children));
}

/// Samples one trace: exclusive picks a child uniformly, parallel interleaves
/// the children's traces at random, loops repeat with probability 1/2.
inline Trace sample_trace(const ProcessTree& t, std::mt19937_64& rng) {
  using K = ProcessTree::Kind;
  switch (t.kind) {
    case K::activity:
      return {t.label};
    case K::silent:
      return {};
    case K::exclusive:
      return sample_trace(t.children[std::uniform_int_distribution<std::size_t>(0, t.children.size() - 1)(rng)], rng);
    case K::sequence: {
      Trace out;
      for (const auto& c : t.children) {
        Trace s = sample_trace(c, rng);
        out.insert(out.end(), s.begin(), s.end());
      }
      return out;
    }
    case K::parallel: {
      std::vector<Trace> parts;
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        parts.push_back(sample_trace(t.children[i], rng));
        slots.insert(slots.end(), parts.back().size(), i);
      }
      std::shuffle(slots.begin(), slots.end(), rng);
      std::vector<std::size_t> pos(parts.size(), 0);
      Trace out;
      for (std::size_t i : slots) out.push_back(parts[i][pos[i]++]);
      return out;
    }
    case K::loop: {
      Trace out = sample_trace(t.children[0], rng);
      std::bernoulli_distribution again(0.5);
      while (again(rng)) {
        const auto& redo = t.children[std::uniform_int_distribution<std::size_t>(1, t.children.size() - 1)(rng)];
        Trace r = sample_trace(redo, rng);
        Trace d = sample_trace(t.children[0], rng);
        out.insert(out.end(), r.begin(), r.end());
        out.insert(out.end(), d.begin(), d.end());
      }
      return out;
    }
  }
  return {};
}

}  // namespace ocpn::testing
