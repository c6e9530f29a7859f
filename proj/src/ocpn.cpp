// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/ocpn.hpp"

#include <algorithm>

#include "ocpn/discovery.hpp"
#include "ocpn/error.hpp"
#include "ocpn/parallel.hpp"

namespace ocpn {

std::set<std::string> ObjectCentricPetriNet::object_types() const {
  return {place_types.begin(), place_types.end()};
}

std::set<std::string> ObjectCentricPetriNet::transition_types(TransitionId t) const {
  std::set<std::string> out;
  for (PlaceId p : net.inputs(t)) out.insert(place_types.at(p));
  for (PlaceId p : net.outputs(t)) out.insert(place_types.at(p));
  return out;
}

std::set<std::string> ObjectCentricPetriNet::variable_types(TransitionId t) const {
  std::set<std::string> out;
  for (PlaceId p : net.inputs(t)) {
    if (is_variable({p, t, true})) out.insert(place_types.at(p));
  }
  for (PlaceId p : net.outputs(t)) {
    if (is_variable({p, t, false})) out.insert(place_types.at(p));
  }
  return out;
}

std::set<std::string> ObjectCentricPetriNet::nonvariable_types(TransitionId t) const {
  std::set<std::string> out;
  for (PlaceId p : net.inputs(t)) {
    if (!is_variable({p, t, true})) out.insert(place_types.at(p));
  }
  for (PlaceId p : net.outputs(t)) {
    if (!is_variable({p, t, false})) out.insert(place_types.at(p));
  }
  return out;
}

std::vector<PlaceId> ObjectCentricPetriNet::places_of_type(const std::string& type) const {
  std::vector<PlaceId> out;
  for (PlaceId p = 0; p < place_types.size(); ++p) {
    if (place_types[p] == type) out.push_back(p);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Token& t) {
  return os << '(' << t.place << ',' << t.object << ')';
}

// ---------------------------------------------------------------------------

namespace {

std::string unique_name(const LabeledPetriNet& net, const std::string& base, const std::string& type) {
  auto taken = [&](const std::string& n) { return net.find_place(n) || net.find_transition(n); };
  if (!taken(base)) return base;
  std::string candidate = type + "/" + base;
  for (std::size_t i = 2; taken(candidate); ++i) candidate = type + "/" + base + "#" + std::to_string(i);
  return candidate;
}

}  // namespace

MergedNet merge_nets(const std::map<std::string, AcceptingPetriNet>& nets) {
  if (nets.empty()) throw InvalidArgumentError("no nets to merge");
  MergedNet out;

  // Labeled transitions first, one per distinct label.
  std::map<std::string, TransitionId> by_label;
  for (const auto& [type, apn] : nets) {
    std::set<std::string> seen;
    for (TransitionId t = 0; t < apn.net.transition_count(); ++t) {
      const auto& label = apn.net.label(t);
      if (!label) continue;
      if (!seen.insert(*label).second) {
        throw InvalidArgumentError("net of type '" + type + "' labels two transitions '" + *label + "'");
      }
      by_label.emplace(*label, 0);
    }
  }
  for (auto& [label, id] : by_label) id = out.net.add_transition(label, label);

  for (const auto& [type, apn] : nets) {
    std::vector<PlaceId> place_map(apn.net.place_count());
    for (PlaceId p = 0; p < apn.net.place_count(); ++p) {
      place_map[p] = out.net.add_place(unique_name(out.net, apn.net.place_name(p), type));
      out.place_types.push_back(type);
    }
    for (TransitionId t = 0; t < apn.net.transition_count(); ++t) {
      TransitionId target;
      if (const auto& label = apn.net.label(t)) {
        target = by_label.at(*label);
      } else {
        target = out.net.add_transition(unique_name(out.net, apn.net.transition_name(t), type),
                                        std::nullopt);
      }
      for (PlaceId p : apn.net.inputs(t)) out.net.add_input(place_map[p], target);
      for (PlaceId p : apn.net.outputs(t)) out.net.add_output(target, place_map[p]);
    }
    Marking& init = out.initial[type];
    for (const auto& [p, n] : apn.initial) init.add(place_map[p], n);
    Marking& fin = out.final[type];
    for (const auto& [p, n] : apn.final) fin.add(place_map[p], n);
  }
  return out;
}

std::set<Arc> identify_variable_arcs(const ObjectCentricEventLog& log, const LabeledPetriNet& net,
                                     const std::vector<std::string>& place_types, double tau) {
  std::map<std::pair<ActivityId, std::string>, bool> memo;
  auto variable = [&](TransitionId t, PlaceId p) {
    const auto& label = net.label(t);
    if (!label) return false;
    auto act = log.find_activity(*label);
    if (!act || log.activity_counts()[*act] == 0) return false;
    const std::string& type = place_types.at(p);
    auto [it, inserted] = memo.emplace(std::pair{*act, type}, false);
    if (inserted) {
      auto type_id = log.find_type(type);
      const double s = type_id ? score(log, *act, *type_id) : 0.0;
      it->second = s < tau;
    }
    return it->second;
  };
  std::set<Arc> out;
  for (const Arc& a : net.arcs()) {
    if (variable(a.transition, a.place)) out.insert(a);
  }
  return out;
}

std::pair<OcpnMarking, OcpnMarking> build_ocpn_markings(const ObjectCentricEventLog& log,
                                                        const MergedNet& merged) {
  OcpnMarking init;
  OcpnMarking fin;
  auto replicate = [&](const std::map<std::string, Marking>& per_type, OcpnMarking& out) {
    for (const auto& [type, marking] : per_type) {
      auto type_id = log.find_type(type);
      if (!type_id) continue;
      for (ObjectId o : log.objects_of_type(*type_id)) {
        for (const auto& [p, n] : marking) out.add({p, log.object_name(o)}, n);
      }
    }
  };
  replicate(merged.initial, init);
  replicate(merged.final, fin);
  return {std::move(init), std::move(fin)};
}

void validate(const DiscoveryParams& params) {
  if (!(params.noise >= 0.0 && params.noise <= 1.0)) {
    throw InvalidArgumentError("noise must be in [0, 1], got " + std::to_string(params.noise));
  }
  if (!(params.tau >= 0.0 && params.tau <= 1.0)) {
    throw InvalidArgumentError("tau must be in [0, 1], got " + std::to_string(params.tau));
  }
}

ObjectCentricEventLog prepare_log(const ObjectCentricEventLog& log, const DiscoveryParams& params) {
  FilterSpec spec = params.filter;
  if (!params.types.empty()) {
    for (const auto& t : params.types) log.type_id(t);
    std::set<std::string> view(params.types.begin(), params.types.end());
    if (spec.object_types) {
      std::set<std::string> both;
      std::set_intersection(view.begin(), view.end(), spec.object_types->begin(),
                            spec.object_types->end(), std::inserter(both, both.end()));
      view = std::move(both);
    }
    spec.object_types = std::move(view);
  }
  if (spec.is_identity()) return log;
  return filter_log(log, spec);
}

AcceptingOCPN discover_ocpn(const ObjectCentricEventLog& input, const DiscoveryParams& params) {
  validate(params);
  const ObjectCentricEventLog log = prepare_log(input, params);

  std::vector<std::string> types;
  if (params.types.empty()) {
    for (TypeId t : log.types_present()) types.push_back(log.type_name(t));
  } else {
    types = params.types;
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
    for (const auto& t : types) {
      if (log.objects_of_type(log.type_id(t)).empty()) {
        throw Error("no event references an object of type '" + t + "' after filtering");
      }
    }
  }
  if (types.empty()) throw Error("the log references no objects; nothing to discover");

  std::vector<AcceptingPetriNet> nets(types.size());
  parallel_for(types.size(), params.jobs, [&](std::size_t i) {
    const TraceLog traces = to_trace_log(flatten(log, types[i]));
    nets[i] = discover_accepting_net(traces, params.noise, types[i]);
  });
  std::map<std::string, AcceptingPetriNet> by_type;
  for (std::size_t i = 0; i < types.size(); ++i) by_type.emplace(types[i], std::move(nets[i]));

  MergedNet merged = merge_nets(by_type);
  AcceptingOCPN out;
  out.ocpn.variable_arcs = identify_variable_arcs(log, merged.net, merged.place_types, params.tau);
  std::tie(out.initial, out.final) = build_ocpn_markings(log, merged);
  out.ocpn.net = std::move(merged.net);
  out.ocpn.place_types = std::move(merged.place_types);
  return out;
}

WellFormedness is_well_formed(const ObjectCentricPetriNet& ocpn) {
  WellFormedness out;
  for (TransitionId t = 0; t < ocpn.net.transition_count(); ++t) {
    const auto var = ocpn.variable_types(t);
    for (const auto& type : ocpn.nonvariable_types(t)) {
      if (var.count(type)) out.violations.emplace_back(t, type);
    }
  }
  out.well_formed = out.violations.empty();
  return out;
}

TypeProjection project_type(const AcceptingOCPN& model, const std::string& type) {
  const auto& ocpn = model.ocpn;
  TypeProjection out;
  out.type = type;
  std::vector<std::optional<PlaceId>> local(ocpn.net.place_count());
  for (PlaceId p : ocpn.places_of_type(type)) {
    local[p] = out.apn.net.add_place(ocpn.net.place_name(p));
    out.places.push_back(p);
  }
  for (TransitionId t = 0; t < ocpn.net.transition_count(); ++t) {
    bool touches = false;
    for (PlaceId p : ocpn.net.inputs(t)) touches = touches || local[p].has_value();
    for (PlaceId p : ocpn.net.outputs(t)) touches = touches || local[p].has_value();
    if (!touches) continue;
    const TransitionId lt = out.apn.net.add_transition(ocpn.net.transition_name(t), ocpn.net.label(t));
    out.transitions.push_back(t);
    for (PlaceId p : ocpn.net.inputs(t)) {
      if (local[p]) out.apn.net.add_input(*local[p], lt);
    }
    for (PlaceId p : ocpn.net.outputs(t)) {
      if (local[p]) out.apn.net.add_output(lt, *local[p]);
    }
  }
  auto per_object = [&](const OcpnMarking& m) {
    Marking result;
    std::optional<std::string> first;
    for (const auto& [token, n] : m) {
      if (!local[token.place]) continue;
      if (!first) first = token.object;
      if (token.object == *first) result.add(*local[token.place], n);
    }
    return result;
  };
  out.apn.initial = per_object(model.initial);
  out.apn.final = per_object(model.final);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_binding(const ObjectCentricPetriNet& ocpn, const Binding& b) {
  if (b.transition >= ocpn.net.transition_count()) {
    throw InvalidArgumentError("binding refers to unknown transition #" + std::to_string(b.transition));
  }
  const std::string& name = ocpn.net.transition_name(b.transition);
  const auto types = ocpn.transition_types(b.transition);
  for (const auto& [type, objects] : b.objects) {
    if (!types.count(type) && !objects.empty()) {
      throw InvalidArgumentError("binding of '" + name + "' binds type '" + type +
                                 "' which the transition does not use");
    }
  }
  const auto var = ocpn.variable_types(b.transition);
  for (const auto& type : types) {
    if (var.count(type)) continue;
    auto it = b.objects.find(type);
    std::set<std::string> distinct;
    if (it != b.objects.end()) distinct.insert(it->second.begin(), it->second.end());
    if (distinct.size() != 1) {
      throw InvalidArgumentError("binding of '" + name + "' must bind exactly one object of type '" +
                                 type + "', got " + std::to_string(distinct.size()));
    }
  }
}

OcpnMarking tokens_for(const ObjectCentricPetriNet& ocpn, const Binding& b,
                       const std::vector<PlaceId>& places) {
  OcpnMarking out;
  for (PlaceId p : places) {
    auto it = b.objects.find(ocpn.place_type(p));
    if (it == b.objects.end()) continue;
    std::set<std::string> distinct(it->second.begin(), it->second.end());
    for (const auto& o : distinct) out.add({p, o});
  }
  return out;
}

}  // namespace

OcpnMarking consumed_tokens(const ObjectCentricPetriNet& ocpn, const Binding& b) {
  return tokens_for(ocpn, b, ocpn.net.inputs(b.transition));
}

OcpnMarking produced_tokens(const ObjectCentricPetriNet& ocpn, const Binding& b) {
  return tokens_for(ocpn, b, ocpn.net.outputs(b.transition));
}

OcpnMarking execute_binding(const AcceptingOCPN& model, const OcpnMarking& m, const Binding& b) {
  const auto& ocpn = model.ocpn;
  check_binding(ocpn, b);
  const OcpnMarking cons = consumed_tokens(ocpn, b);
  if (!cons.included_in(m)) {
    std::string missing;
    for (const auto& [token, n] : cons) {
      if (m.count(token) >= n) continue;
      if (!missing.empty()) missing += ", ";
      missing += "(" + ocpn.net.place_name(token.place) + ", " + token.object + ")";
    }
    throw NotEnabledError("binding of '" + ocpn.net.transition_name(b.transition) +
                          "' is not enabled: missing " + missing);
  }
  return m - cons + produced_tokens(ocpn, b);
}

BindingRun execute_binding_sequence(const AcceptingOCPN& model, const std::vector<Binding>& steps) {
  BindingRun run{model.initial, {}};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    try {
      run.marking = execute_binding(model, run.marking, steps[i]);
    } catch (const NotEnabledError& e) {
      throw NotEnabledError("step " + std::to_string(i) + ": " + e.what());
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError("step " + std::to_string(i) + ": " + e.what());
    }
    if (const auto& label = model.ocpn.net.label(steps[i].transition)) {
      run.visible.push_back({*label, steps[i].objects});
    }
  }
  return run;
}

}  // namespace ocpn
