// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ocpn/event_log.hpp"
#include "ocpn/multiset.hpp"
#include "ocpn/petri_net.hpp"

namespace ocpn {

/// Petri net whose places carry an object type, with a subset of variable arcs.
struct ObjectCentricPetriNet {
  LabeledPetriNet net;
  std::vector<std::string> place_types;  ///< indexed by PlaceId
  std::set<Arc> variable_arcs;

  const std::string& place_type(PlaceId p) const { return place_types.at(p); }
  bool is_variable(const Arc& a) const { return variable_arcs.count(a) != 0; }
  /// Object types of all places, sorted.
  std::set<std::string> object_types() const;
  /// Types of the places connected to t.
  std::set<std::string> transition_types(TransitionId t) const;
  std::set<std::string> variable_types(TransitionId t) const;
  std::set<std::string> nonvariable_types(TransitionId t) const;
  /// Places of a type, sorted.
  std::vector<PlaceId> places_of_type(const std::string& type) const;

  friend bool operator==(const ObjectCentricPetriNet&, const ObjectCentricPetriNet&) = default;
};

struct Token {
  PlaceId place = 0;
  std::string object;

  friend auto operator<=>(const Token&, const Token&) = default;
};

std::ostream& operator<<(std::ostream& os, const Token& t);

using OcpnMarking = Multiset<Token>;

struct AcceptingOCPN {
  ObjectCentricPetriNet ocpn;
  OcpnMarking initial;
  OcpnMarking final;

  friend bool operator==(const AcceptingOCPN&, const AcceptingOCPN&) = default;
};

// ---------------------------------------------------------------------------
// Discovery pipeline

/// Union of per-type nets with transitions unified by label.
struct MergedNet {
  LabeledPetriNet net;
  std::vector<std::string> place_types;
  /// Per-type single-object initial and final markings, in merged place ids.
  std::map<std::string, Marking> initial;
  std::map<std::string, Marking> final;
};

/// Throws InvalidArgumentError when a single input net carries a label twice
/// or the map is empty.
MergedNet merge_nets(const std::map<std::string, AcceptingPetriNet>& nets);

/// Arcs of labeled transitions whose score(label, type) is below tau. Arcs of
/// silent transitions and of activities absent from the log are never variable.
std::set<Arc> identify_variable_arcs(const ObjectCentricEventLog& log, const LabeledPetriNet& net,
                                     const std::vector<std::string>& place_types, double tau);

/// Replicates the per-type markings for every object of that type the log references.
std::pair<OcpnMarking, OcpnMarking> build_ocpn_markings(const ObjectCentricEventLog& log,
                                                        const MergedNet& merged);

struct DiscoveryParams {
  double noise = 0.0;
  double tau = 0.98;
  FilterSpec filter;
  /// Object-type view; empty means every type present in the (filtered) log.
  std::vector<std::string> types;
  std::size_t jobs = 0;  ///< worker threads, 0 = hardware concurrency

  friend bool operator==(const DiscoveryParams&, const DiscoveryParams&) = default;
};

/// Throws InvalidArgumentError for noise or tau outside [0, 1].
void validate(const DiscoveryParams& params);

/// Applies params.filter and the type view. Types not in the log raise UnknownNameError.
ObjectCentricEventLog prepare_log(const ObjectCentricEventLog& log, const DiscoveryParams& params);

/// Flatten per type, discover one net per type, merge, identify variable
/// arcs, replicate markings. Throws Error if no event references any object
/// of a selected type.
AcceptingOCPN discover_ocpn(const ObjectCentricEventLog& log, const DiscoveryParams& params = {});

struct WellFormedness {
  bool well_formed = true;
  /// (transition, object type) pairs with both variable and non-variable arcs.
  std::vector<std::pair<TransitionId, std::string>> violations;
};

WellFormedness is_well_formed(const ObjectCentricPetriNet& ocpn);

/// The per-type accepting net obtained by keeping the places of one type and
/// the transitions touching them; `places`/`transitions` map local ids back.
struct TypeProjection {
  std::string type;
  AcceptingPetriNet apn;
  std::vector<PlaceId> places;
  std::vector<TransitionId> transitions;
};

/// The per-object markings are read off the tokens of the first object of the
/// type found in the accepting markings.
TypeProjection project_type(const AcceptingOCPN& model, const std::string& type);

// ---------------------------------------------------------------------------
// Bindings

struct Binding {
  TransitionId transition = 0;
  std::map<std::string, std::vector<std::string>> objects;

  friend bool operator==(const Binding&, const Binding&) = default;
};

OcpnMarking consumed_tokens(const ObjectCentricPetriNet& ocpn, const Binding& b);
OcpnMarking produced_tokens(const ObjectCentricPetriNet& ocpn, const Binding& b);

/// m - cons(t,b) + prod(t,b). Throws InvalidArgumentError if a non-variable
/// type is not bound to exactly one object (or an unrelated type is bound),
/// NotEnabledError listing the missing tokens otherwise.
OcpnMarking execute_binding(const AcceptingOCPN& model, const OcpnMarking& m, const Binding& b);

struct VisibleBinding {
  std::string activity;
  std::map<std::string, std::vector<std::string>> objects;

  friend bool operator==(const VisibleBinding&, const VisibleBinding&) = default;
};

struct BindingRun {
  OcpnMarking marking;
  std::vector<VisibleBinding> visible;
};

/// Executes the bindings from the initial marking. Errors carry the 0-based
/// index of the failing step.
BindingRun execute_binding_sequence(const AcceptingOCPN& model, const std::vector<Binding>& steps);

}  // namespace ocpn
