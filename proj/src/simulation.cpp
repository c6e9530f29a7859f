// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "ocpn/error.hpp"

namespace ocpn {

std::string object_id(const std::string& type, std::size_t n) {
  return type + "-" + std::to_string(n);
}

namespace {

using Rng = std::mt19937_64;
using Obj = std::uint32_t;
constexpr Obj kNone = std::numeric_limits<Obj>::max();

// The standard distributions are implementation-defined; these keep logs
// identical across standard libraries.
std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

double uniform_real(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Tokens on one place: distinct objects with multiplicities, O(1) sampling.
class TokenBag {
public:
  void add(Obj o) {
    auto [it, inserted] = index_.emplace(o, Slot{items_.size(), 0});
    if (inserted) items_.push_back(o);
    ++it->second.count;
  }
  void remove(Obj o) {
    auto it = index_.find(o);
    if (--it->second.count > 0) return;
    const std::size_t pos = it->second.pos;
    index_.erase(it);
    if (pos + 1 != items_.size()) {
      items_[pos] = items_.back();
      index_[items_[pos]].pos = pos;
    }
    items_.pop_back();
  }
  std::size_t count(Obj o) const {
    auto it = index_.find(o);
    return it == index_.end() ? 0 : it->second.count;
  }
  const std::vector<Obj>& items() const { return items_; }

private:
  struct Slot {
    std::size_t pos;
    std::size_t count;
  };
  std::vector<Obj> items_;
  std::unordered_map<Obj, Slot> index_;
};

struct Group {
  std::size_t parent_type;
  std::size_t child_type;
  std::vector<std::vector<Obj>> children;  // by parent object (global index)
  std::vector<Obj> parent;                 // by child object (global index)
};

struct Batch {
  std::size_t batch_type;
  std::size_t member_type;
  std::vector<std::size_t> size;           // by batch object
  std::vector<std::vector<Obj>> members;   // by batch object
  std::vector<Obj> batch_of;               // by member object
};

struct TypeArcs {
  std::size_t type;
  std::vector<PlaceId> inputs;
  std::vector<PlaceId> outputs;
  bool variable;
};

class Simulator {
public:
  Simulator(const AcceptingOCPN& model, const ObjectPopulation& pop, std::uint64_t seed,
            const SimulationOptions& options)
      : model_(model), pop_(pop), rng_(seed), options_(options), clock_(options.start) {
    if (options.max_delay < options.min_delay) {
      throw InvalidArgumentError("max_delay is smaller than min_delay");
    }
    setup_types();
    setup_objects();
    setup_groups();
    setup_batches();
    setup_attached();
    setup_transitions();
  }

  ObjectCentricEventLog run() {
    LogBuilder builder;
    for (const auto& name : type_names_) builder.declare_type(name);
    std::size_t steps = 0;
    const std::size_t step_cap = 100 * (object_names_.size() + 1) * (model_.ocpn.net.transition_count() + 1);
    while (step(builder)) {
      if (++steps > step_cap) throw Error("simulation did not terminate within " + std::to_string(step_cap) + " firings");
    }
    check_final(builder.size());
    return builder.build();
  }

private:
  // ---- setup ---------------------------------------------------------------

  std::size_t type_index(const std::string& name) const {
    auto it = type_index_.find(name);
    if (it == type_index_.end()) throw InvalidArgumentError("population refers to unknown object type '" + name + "'");
    return it->second;
  }

  void setup_types() {
    std::set<std::string> names = model_.ocpn.object_types();
    net_types_ = names.size();
    for (const auto& a : pop_.attached) names.insert(a.type);
    for (const auto& [type, n] : pop_.counts) {
      if (!names.count(type)) throw InvalidArgumentError("population counts object type '" + type + "' which the model does not use");
    }
    type_names_.assign(names.begin(), names.end());
    // net types first so that their indexes are stable
    std::stable_partition(type_names_.begin(), type_names_.end(), [&](const std::string& t) {
      return model_.ocpn.object_types().count(t) != 0;
    });
    for (std::size_t i = 0; i < type_names_.size(); ++i) type_index_[type_names_[i]] = i;
  }

  void setup_objects() {
    objects_of_type_.resize(type_names_.size());
    initial_pattern_.resize(type_names_.size());
    final_pattern_.resize(type_names_.size());
    for (std::size_t t = 0; t < net_types_; ++t) {
      initial_pattern_[t] = pattern(model_.initial, type_names_[t]);
      final_pattern_[t] = pattern(model_.final, type_names_[t]);
      auto it = pop_.counts.find(type_names_[t]);
      const std::size_t n = it == pop_.counts.end() ? 0 : it->second;
      if (n > 0 && initial_pattern_[t].empty()) {
        throw InvalidArgumentError("initial marking has no place for objects of type '" + type_names_[t] + "'");
      }
      for (std::size_t k = 1; k <= n; ++k) {
        objects_of_type_[t].push_back(static_cast<Obj>(object_names_.size()));
        object_names_.push_back(object_id(type_names_[t], k));
        object_types_.push_back(t);
      }
    }
    bags_.resize(model_.ocpn.net.place_count());
    for (std::size_t t = 0; t < net_types_; ++t) {
      for (Obj o : objects_of_type_[t]) {
        for (PlaceId p : initial_pattern_[t]) bags_[p].add(o);
      }
    }
  }

  // Places holding the tokens of the first object of a type.
  std::vector<PlaceId> pattern(const OcpnMarking& m, const std::string& type) const {
    std::vector<PlaceId> out;
    std::optional<std::string> first;
    for (const auto& [token, n] : m) {
      if (model_.ocpn.place_type(token.place) != type) continue;
      if (!first) first = token.object;
      if (token.object == *first) out.insert(out.end(), n, token.place);
    }
    return out;
  }

  void setup_groups() {
    for (const auto& spec : pop_.groups) {
      Group g{type_index(spec.parent_type), type_index(spec.child_type), {}, {}};
      const auto& parents = objects_of_type_[g.parent_type];
      const auto& children = objects_of_type_[g.child_type];
      std::vector<std::size_t> sizes = spec.sizes;
      if (sizes.empty()) {
        const std::size_t lo = spec.min_size;
        const std::size_t hi = spec.max_size;
        if (lo > hi || parents.size() * lo > children.size() || parents.size() * hi < children.size()) {
          throw InvalidArgumentError("cannot split " + std::to_string(children.size()) + " " + spec.child_type +
                                     " objects over " + std::to_string(parents.size()) + " " + spec.parent_type +
                                     " objects with " + std::to_string(lo) + " to " + std::to_string(hi) + " each");
        }
        sizes.assign(parents.size(), lo);
        std::vector<std::size_t> open(parents.size());
        std::iota(open.begin(), open.end(), 0);
        for (std::size_t left = children.size() - parents.size() * lo; left > 0; --left) {
          const std::size_t k = uniform_index(rng_, open.size());
          if (++sizes[open[k]] == hi) {
            open[k] = open.back();
            open.pop_back();
          }
        }
      }
      if (sizes.size() != parents.size()) {
        throw InvalidArgumentError("group " + spec.parent_type + "/" + spec.child_type + " lists " +
                                   std::to_string(sizes.size()) + " sizes for " +
                                   std::to_string(parents.size()) + " parents");
      }
      if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != children.size()) {
        throw InvalidArgumentError("group sizes for " + spec.parent_type + "/" + spec.child_type +
                                   " do not add up to " + std::to_string(children.size()));
      }
      g.children.resize(object_names_.size());
      g.parent.assign(object_names_.size(), kNone);
      std::size_t next = 0;
      for (std::size_t i = 0; i < parents.size(); ++i) {
        for (std::size_t k = 0; k < sizes[i]; ++k) {
          const Obj c = children[next++];
          g.children[parents[i]].push_back(c);
          g.parent[c] = parents[i];
        }
      }
      groups_.push_back(std::move(g));
    }
  }

  void setup_batches() {
    for (const auto& spec : pop_.batches) {
      Batch b{type_index(spec.batch_type), type_index(spec.member_type), {}, {}, {}};
      const auto& batches = objects_of_type_[b.batch_type];
      if (spec.sizes.size() != batches.size()) {
        throw InvalidArgumentError("batch " + spec.batch_type + " lists " + std::to_string(spec.sizes.size()) +
                                   " sizes for " + std::to_string(batches.size()) + " objects");
      }
      const std::size_t total = std::accumulate(spec.sizes.begin(), spec.sizes.end(), std::size_t{0});
      if (total != objects_of_type_[b.member_type].size()) {
        throw InvalidArgumentError("batch sizes of " + spec.batch_type + " add up to " + std::to_string(total) +
                                   " but there are " + std::to_string(objects_of_type_[b.member_type].size()) +
                                   " " + spec.member_type + " objects");
      }
      b.size.assign(object_names_.size(), 0);
      for (std::size_t i = 0; i < batches.size(); ++i) b.size[batches[i]] = spec.sizes[i];
      b.members.resize(object_names_.size());
      b.batch_of.assign(object_names_.size(), kNone);
      batches_.push_back(std::move(b));
    }
  }

  void setup_attached() {
    for (const auto& spec : pop_.attached) {
      const std::size_t owner = type_index(spec.owner_type);
      if (spec.pool == 0 || spec.min_per_owner > spec.max_per_owner || spec.max_per_owner > spec.pool) {
        throw InvalidArgumentError("invalid attachment of " + spec.type + " to " + spec.owner_type);
      }
      Attachment a{type_index(spec.type), owner, std::vector<std::vector<std::string>>(object_names_.size())};
      for (Obj o : objects_of_type_[owner]) {
        const std::size_t n = spec.min_per_owner + uniform_index(rng_, spec.max_per_owner - spec.min_per_owner + 1);
        std::set<std::size_t> chosen;
        while (chosen.size() < n) chosen.insert(uniform_index(rng_, spec.pool) + 1);
        for (std::size_t k : chosen) a.objects[o].push_back(object_id(spec.type, k));
      }
      attachments_.push_back(std::move(a));
    }
  }

  void setup_transitions() {
    const auto& ocpn = model_.ocpn;
    const auto& net = ocpn.net;
    transitions_.resize(net.transition_count());
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      std::map<std::size_t, TypeArcs> by_type;
      for (PlaceId p : net.inputs(t)) {
        auto& ta = by_type.try_emplace(type_index_.at(ocpn.place_type(p)), TypeArcs{type_index_.at(ocpn.place_type(p)), {}, {}, false}).first->second;
        ta.inputs.push_back(p);
        ta.variable = ta.variable || ocpn.is_variable({p, t, true});
      }
      for (PlaceId p : net.outputs(t)) {
        auto& ta = by_type.try_emplace(type_index_.at(ocpn.place_type(p)), TypeArcs{type_index_.at(ocpn.place_type(p)), {}, {}, false}).first->second;
        ta.outputs.push_back(p);
        ta.variable = ta.variable || ocpn.is_variable({p, t, false});
      }
      for (auto& [type, ta] : by_type) transitions_[t].push_back(std::move(ta));
      auto w = pop_.weights.find(net.transition_name(t));
      weights_.push_back(w == pop_.weights.end() ? 1.0 : w->second);
      if (!(weights_.back() >= 0.0)) throw InvalidArgumentError("negative weight for " + net.transition_name(t));
    }
  }

  // ---- firing --------------------------------------------------------------

  using Choice = std::vector<std::pair<std::size_t, std::vector<Obj>>>;  // type -> objects

  bool ready(Obj o, const TypeArcs& ta) const {
    for (PlaceId p : ta.inputs) {
      if (bags_[p].count(o) == 0) return false;
    }
    return true;
  }

  // Objects of ta.type related to `anchor`, or nullopt when none can be bound.
  std::optional<std::vector<Obj>> related(Obj anchor, std::size_t anchor_type, const TypeArcs& ta,
                                          Batch** new_batch) {
    for (auto& g : groups_) {
      if (g.parent_type == anchor_type && g.child_type == ta.type) {
        const auto& kids = g.children[anchor];
        if (!ta.variable && kids.size() != 1) return std::nullopt;
        return kids;
      }
      if (g.child_type == anchor_type && g.parent_type == ta.type) return std::vector<Obj>{g.parent[anchor]};
    }
    for (auto& b : batches_) {
      if (b.batch_type == anchor_type && b.member_type == ta.type) {
        if (!b.members[anchor].empty()) return b.members[anchor];
        if (ta.inputs.empty()) return std::nullopt;
        std::vector<Obj> picked;
        for (Obj o : bags_[ta.inputs.front()].items()) {
          if (b.batch_of[o] == kNone && ready(o, ta)) picked.push_back(o);
          if (picked.size() == b.size[anchor]) break;
        }
        if (picked.size() < b.size[anchor] || picked.empty()) return std::nullopt;
        if (!ta.variable && picked.size() != 1) return std::nullopt;
        *new_batch = &b;
        return picked;
      }
      if (b.member_type == anchor_type && b.batch_type == ta.type) {
        if (b.batch_of[anchor] == kNone) return std::nullopt;
        return std::vector<Obj>{b.batch_of[anchor]};
      }
    }
    if (ta.variable || ta.inputs.empty()) return std::nullopt;
    const auto& items = bags_[ta.inputs.front()].items();
    if (items.empty()) return std::nullopt;
    const std::size_t start = uniform_index(rng_, items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
      const Obj o = items[(start + k) % items.size()];
      if (ready(o, ta)) return std::vector<Obj>{o};
    }
    return std::nullopt;
  }

  bool try_anchor(TransitionId t, std::size_t anchor_slot, Obj anchor, Choice& choice, Batch*& new_batch) {
    const auto& arcs = transitions_[t];
    if (!ready(anchor, arcs[anchor_slot])) return false;
    choice.clear();
    new_batch = nullptr;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (i == anchor_slot) {
        choice.emplace_back(arcs[i].type, std::vector<Obj>{anchor});
        continue;
      }
      auto objs = related(anchor, arcs[anchor_slot].type, arcs[i], &new_batch);
      if (!objs) return false;
      for (Obj o : *objs) {
        if (!ready(o, arcs[i])) return false;
      }
      choice.emplace_back(arcs[i].type, std::move(*objs));
    }
    return true;
  }

  // Finds a binding for t. With `exhaustive` false only a few random anchors are tried.
  bool find_binding(TransitionId t, bool exhaustive, Choice& choice, Batch*& new_batch) {
    const auto& arcs = transitions_[t];
    std::optional<std::size_t> slot;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].inputs.empty()) continue;
      if (!arcs[i].variable) {
        slot = i;
        break;
      }
      if (!slot) slot = i;
    }
    if (!slot) return false;
    const auto& items = bags_[arcs[*slot].inputs.front()].items();
    if (items.empty()) return false;
    const std::size_t tries = exhaustive ? items.size() : std::min<std::size_t>(items.size(), 8);
    const std::size_t start = uniform_index(rng_, items.size());
    for (std::size_t k = 0; k < tries; ++k) {
      const Obj anchor = exhaustive ? items[(start + k) % items.size()] : items[uniform_index(rng_, items.size())];
      if (try_anchor(t, *slot, anchor, choice, new_batch)) return true;
    }
    return false;
  }

  bool step(LogBuilder& builder) {
    // Weighted random order without replacement.
    std::vector<std::pair<double, TransitionId>> order;
    for (TransitionId t = 0; t < transitions_.size(); ++t) {
      if (weights_[t] <= 0.0) continue;
      const double u = std::max(uniform_real(rng_), 1e-300);
      order.emplace_back(-std::log(u) / weights_[t], t);
    }
    std::sort(order.begin(), order.end());
    Choice choice;
    Batch* new_batch = nullptr;
    for (bool exhaustive : {false, true}) {
      for (const auto& [key, t] : order) {
        if (find_binding(t, exhaustive, choice, new_batch)) {
          fire(t, choice, new_batch, builder);
          return true;
        }
      }
    }
    return false;
  }

  void fire(TransitionId t, const Choice& choice, Batch* new_batch, LogBuilder& builder) {
    const auto& arcs = transitions_[t];
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      for (Obj o : choice[i].second) {
        for (PlaceId p : arcs[i].inputs) bags_[p].remove(o);
        for (PlaceId p : arcs[i].outputs) bags_[p].add(o);
      }
    }
    if (new_batch) {
      for (const auto& [type, objs] : choice) {
        if (type != new_batch->batch_type) continue;
        const Obj batch = objs.front();
        for (const auto& [mtype, members] : choice) {
          if (mtype != new_batch->member_type) continue;
          new_batch->members[batch] = members;
          for (Obj m : members) new_batch->batch_of[m] = batch;
        }
      }
    }
    const auto& label = model_.ocpn.net.label(t);
    if (!label) return;

    const auto span = options_.max_delay - options_.min_delay;
    clock_ += options_.min_delay + Duration(static_cast<Duration::rep>(uniform_index(rng_, static_cast<std::size_t>(span.count()) + 1)));

    std::vector<std::set<Obj>> bound(type_names_.size());
    for (const auto& [type, objs] : choice) bound[type].insert(objs.begin(), objs.end());
    for (const auto& g : groups_) {
      if (!pop_.include_parents.count(type_names_[g.parent_type])) continue;
      if (!bound[g.parent_type].empty()) continue;
      for (Obj c : bound[g.child_type]) bound[g.parent_type].insert(g.parent[c]);
    }
    EventRecord record;
    record.activity = *label;
    record.time = clock_;
    for (std::size_t type = 0; type < net_types_; ++type) {
      if (bound[type].empty()) continue;
      auto& names = record.objects[type_names_[type]];
      for (Obj o : bound[type]) names.push_back(object_names_[o]);
    }
    for (const auto& a : attachments_) {
      std::set<std::string> names;
      for (Obj o : bound[a.owner_type]) names.insert(a.objects[o].begin(), a.objects[o].end());
      if (names.empty()) continue;
      auto& out = record.objects[type_names_[a.type]];
      out.insert(out.end(), names.begin(), names.end());
    }
    builder.add(std::move(record));
  }

  void check_final(std::size_t events) const {
    std::vector<std::size_t> expected(bags_.size(), 0);
    for (std::size_t t = 0; t < net_types_; ++t) {
      for (PlaceId p : final_pattern_[t]) expected[p] += objects_of_type_[t].size();
    }
    std::size_t off = 0;
    for (PlaceId p = 0; p < bags_.size(); ++p) {
      std::size_t have = 0;
      for (Obj o : bags_[p].items()) have += bags_[p].count(o);
      off += have > expected[p] ? have - expected[p] : expected[p] - have;
    }
    if (off > 0) {
      throw Error("simulation got stuck after " + std::to_string(events) + " events: " +
                  std::to_string(off) + " tokens differ from the final marking");
    }
  }

  struct Attachment {
    std::size_t type;
    std::size_t owner_type;
    std::vector<std::vector<std::string>> objects;  // by owner object
  };

  const AcceptingOCPN& model_;
  const ObjectPopulation& pop_;
  Rng rng_;
  SimulationOptions options_;
  Timestamp clock_;

  std::vector<std::string> type_names_;
  std::size_t net_types_ = 0;
  std::map<std::string, std::size_t> type_index_;
  std::vector<std::vector<Obj>> objects_of_type_;
  std::vector<std::vector<PlaceId>> initial_pattern_;
  std::vector<std::vector<PlaceId>> final_pattern_;
  std::vector<std::string> object_names_;
  std::vector<std::size_t> object_types_;
  std::vector<Group> groups_;
  std::vector<Batch> batches_;
  std::vector<Attachment> attachments_;
  std::vector<std::vector<TypeArcs>> transitions_;
  std::vector<double> weights_;
  std::vector<TokenBag> bags_;
};

}  // namespace

ObjectCentricEventLog simulate_log(const AcceptingOCPN& model, const ObjectPopulation& population,
                                   std::uint64_t seed, const SimulationOptions& options) {
  return Simulator(model, population, seed, options).run();
}

// ---------------------------------------------------------------------------

AcceptingOCPN with_population(ObjectCentricPetriNet net,
                              const std::map<std::string, std::vector<PlaceId>>& initial,
                              const std::map<std::string, std::vector<PlaceId>>& final,
                              const ObjectPopulation& population) {
  AcceptingOCPN out;
  out.ocpn = std::move(net);
  auto fill = [&](const std::map<std::string, std::vector<PlaceId>>& places, OcpnMarking& m) {
    for (const auto& [type, ps] : places) {
      auto it = population.counts.find(type);
      if (it == population.counts.end()) continue;
      for (std::size_t n = 1; n <= it->second; ++n) {
        for (PlaceId p : ps) m.add({p, object_id(type, n)});
      }
    }
  };
  fill(initial, out.initial);
  fill(final, out.final);
  return out;
}

namespace {

// Small helper for hand-built models.
class ModelBuilder {
public:
  PlaceId place(const std::string& name, const std::string& type) {
    const PlaceId p = net_.net.add_place(name);
    net_.place_types.push_back(type);
    return p;
  }
  TransitionId transition(const std::string& label) { return net_.net.add_transition(label, label); }
  void flow(PlaceId in, TransitionId t, PlaceId out, bool variable = false) {
    net_.net.add_input(in, t);
    net_.net.add_output(t, out);
    if (variable) {
      net_.variable_arcs.insert({in, t, true});
      net_.variable_arcs.insert({out, t, false});
    }
  }
  ObjectCentricPetriNet take() { return std::move(net_); }

private:
  ObjectCentricPetriNet net_;
};

}  // namespace

AcceptingOCPN order_item_route_model(const ObjectPopulation& population) {
  ModelBuilder b;
  std::vector<PlaceId> o, i, r;
  for (int k = 1; k <= 5; ++k) o.push_back(b.place("o" + std::to_string(k), "Order"));
  for (int k = 1; k <= 6; ++k) i.push_back(b.place("i" + std::to_string(k), "Item"));
  for (int k = 1; k <= 3; ++k) r.push_back(b.place("r" + std::to_string(k), "Route"));
  const TransitionId po = b.transition("place order");
  const TransitionId in = b.transition("send invoice");
  const TransitionId sr = b.transition("send reminder");
  const TransitionId pa = b.transition("pay order");
  const TransitionId co = b.transition("mark as completed");
  const TransitionId pi = b.transition("pick item");
  const TransitionId st = b.transition("start route");
  const TransitionId en = b.transition("end route");
  b.flow(o[0], po, o[1]);
  b.flow(i[0], po, i[1], true);
  b.flow(o[1], in, o[2]);
  b.flow(o[2], sr, o[2]);
  b.flow(o[2], pa, o[3]);
  b.flow(o[3], co, o[4]);
  b.flow(i[4], co, i[5], true);
  b.flow(i[1], pi, i[2]);
  b.flow(i[2], st, i[3], true);
  b.flow(r[0], st, r[1]);
  b.flow(i[3], en, i[4], true);
  b.flow(r[1], en, r[2]);
  return with_population(b.take(), {{"Order", {o[0]}}, {"Item", {i[0]}}, {"Route", {r[0]}}},
                         {{"Order", {o[4]}}, {"Item", {i[5]}}, {"Route", {r[2]}}}, population);
}

ObjectPopulation order_item_route_population() {
  ObjectPopulation pop;
  pop.counts = {{"Order", 100}, {"Item", 500}, {"Route", 10}};
  pop.groups.push_back({"Order", "Item", std::vector<std::size_t>(100, 5), 1, 1});
  pop.batches.push_back({"Route", "Item", std::vector<std::size_t>(10, 50)});
  pop.weights = {{"send reminder", 0.3}};
  return pop;
}

AcceptingOCPN order_management_model(const ObjectPopulation& population) {
  ModelBuilder b;
  std::vector<PlaceId> o, i, p;
  for (int k = 1; k <= 4; ++k) o.push_back(b.place("orders:" + std::to_string(k), "orders"));
  for (int k = 1; k <= 7; ++k) i.push_back(b.place("items:" + std::to_string(k), "items"));
  for (int k = 1; k <= 4; ++k) p.push_back(b.place("packages:" + std::to_string(k), "packages"));
  const TransitionId place_order = b.transition("place order");
  const TransitionId confirm = b.transition("confirm order");
  const TransitionId reminder = b.transition("payment reminder");
  const TransitionId pay = b.transition("pay order");
  const TransitionId out_of_stock = b.transition("item out of stock");
  const TransitionId reorder = b.transition("reorder item");
  const TransitionId pick = b.transition("pick item");
  const TransitionId create = b.transition("create package");
  const TransitionId send = b.transition("send package");
  const TransitionId failed = b.transition("failed delivery");
  const TransitionId delivered = b.transition("package delivered");
  b.flow(o[0], place_order, o[1]);
  b.flow(i[0], place_order, i[1], true);
  b.flow(o[1], confirm, o[2]);
  b.flow(i[1], confirm, i[2], true);
  b.flow(o[2], reminder, o[2]);
  b.flow(o[2], pay, o[3]);
  b.flow(i[2], out_of_stock, i[3]);
  b.flow(i[3], reorder, i[2]);
  b.flow(i[2], pick, i[4]);
  b.flow(i[4], create, i[5], true);
  b.flow(p[0], create, p[1]);
  b.flow(i[5], send, i[6], true);
  b.flow(p[1], send, p[2]);
  b.flow(i[6], failed, i[6], true);
  b.flow(p[2], failed, p[2]);
  b.flow(p[2], delivered, p[3]);
  // Delivered items leave the package loop through a dedicated end place.
  const PlaceId done = b.place("items:8", "items");
  b.flow(i[6], delivered, done, true);
  return with_population(b.take(), {{"orders", {o[0]}}, {"items", {i[0]}}, {"packages", {p[0]}}},
                         {{"orders", {o[3]}}, {"items", {done}}, {"packages", {p[3]}}}, population);
}

ObjectPopulation order_management_population(std::size_t orders) {
  if (orders == 0) throw InvalidArgumentError("order count must be positive");
  const auto items = static_cast<std::size_t>(std::llround(static_cast<double>(orders) * 4.0795));
  auto packages = static_cast<std::size_t>(std::llround(static_cast<double>(items) / 6.16));
  packages = std::clamp<std::size_t>(packages, (items + 6) / 7, std::max<std::size_t>(1, items / 6));
  const std::size_t sevens = items - 6 * packages;
  ObjectPopulation pop;
  pop.counts = {{"orders", orders}, {"items", items}, {"packages", packages},
                {"products", 20}, {"customers", 17}};
  pop.groups.push_back({"orders", "items", {}, 1, 15});
  // Spread the larger packages evenly instead of front-loading them.
  std::vector<std::size_t> sizes(packages, 6);
  for (std::size_t k = 0; k < sevens; ++k) sizes[k * packages / sevens] = 7;
  pop.batches.push_back({"packages", "items", std::move(sizes)});
  pop.attached.push_back({"products", "items", 20, 1, 1});
  pop.attached.push_back({"customers", "orders", 17, 1, 1});
  pop.include_parents = {"orders"};
  pop.weights = {{"payment reminder", 0.15}, {"item out of stock", 0.05}, {"failed delivery", 0.3}};
  return pop;
}

ObjectPopulation order_management_population() { return order_management_population(2000); }

std::map<std::string, std::set<std::string>> order_management_retained_types() {
  return {
      {"place order", {"orders", "items"}},   {"confirm order", {"orders", "items"}},
      {"item out of stock", {"items"}},       {"reorder item", {"items"}},
      {"pick item", {"items"}},               {"payment reminder", {"orders"}},
      {"pay order", {"orders"}},              {"create package", {"items", "packages"}},
      {"send package", {"items", "packages"}}, {"failed delivery", {"items", "packages"}},
      {"package delivered", {"items", "packages"}},
  };
}

}  // namespace ocpn
