// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ocpn/event_log.hpp"
#include "ocpn/multiset.hpp"

namespace ocpn {

using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;

/// A flow arc. `to_transition` distinguishes (place -> transition) from
/// (transition -> place).
struct Arc {
  PlaceId place = 0;
  TransitionId transition = 0;
  bool to_transition = true;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

using Marking = Multiset<PlaceId>;

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept { return m.hash(); }
};

/// Labeled Petri net with named nodes. Place and transition names share one
/// namespace; labels are optional (unlabeled = silent) and need not be unique.
class LabeledPetriNet {
public:
  /// Throws Error if the name is already used by a place or transition.
  PlaceId add_place(std::string name);
  TransitionId add_transition(std::string name, std::optional<std::string> label);
  /// Adding an existing arc is a no-op.
  void add_input(PlaceId p, TransitionId t);
  void add_output(TransitionId t, PlaceId p);
  void add_arc(const Arc& a);

  std::size_t place_count() const noexcept { return place_names_.size(); }
  std::size_t transition_count() const noexcept { return transitions_.size(); }
  const std::string& place_name(PlaceId p) const { return place_names_.at(p); }
  const std::string& transition_name(TransitionId t) const { return transitions_.at(t).name; }
  const std::optional<std::string>& label(TransitionId t) const { return transitions_.at(t).label; }
  bool is_silent(TransitionId t) const { return !transitions_.at(t).label.has_value(); }

  /// Input/output places of a transition, sorted.
  const std::vector<PlaceId>& inputs(TransitionId t) const { return transitions_.at(t).inputs; }
  const std::vector<PlaceId>& outputs(TransitionId t) const { return transitions_.at(t).outputs; }
  /// Transitions consuming from / producing into a place, sorted.
  const std::vector<TransitionId>& consumers(PlaceId p) const { return consumers_.at(p); }
  const std::vector<TransitionId>& producers(PlaceId p) const { return producers_.at(p); }

  std::optional<PlaceId> find_place(std::string_view name) const;
  std::optional<TransitionId> find_transition(std::string_view name) const;
  /// Transitions carrying this label, sorted.
  std::vector<TransitionId> transitions_labeled(std::string_view label) const;
  /// Every arc, sorted.
  std::vector<Arc> arcs() const;
  bool has_arc(const Arc& a) const;

  /// Renders a marking with place names: "[p2, p3^2]".
  std::string format(const Marking& m) const;

  friend bool operator==(const LabeledPetriNet&, const LabeledPetriNet&) = default;

private:
  struct TransitionData {
    std::string name;
    std::optional<std::string> label;
    std::vector<PlaceId> inputs;
    std::vector<PlaceId> outputs;
    friend bool operator==(const TransitionData&, const TransitionData&) = default;
  };
  void claim_name(const std::string& name);

  std::vector<std::string> place_names_;
  std::vector<TransitionData> transitions_;
  std::vector<std::vector<TransitionId>> consumers_;
  std::vector<std::vector<TransitionId>> producers_;
  std::unordered_map<std::string, std::uint32_t> place_index_;
  std::unordered_map<std::string, std::uint32_t> transition_index_;
};

struct AcceptingPetriNet {
  LabeledPetriNet net;
  Marking initial;
  Marking final;

  friend bool operator==(const AcceptingPetriNet&, const AcceptingPetriNet&) = default;
};

bool is_enabled(const LabeledPetriNet& net, const Marking& m, TransitionId t);
std::vector<TransitionId> enabled_transitions(const LabeledPetriNet& net, const Marking& m);

/// m - inputs(t) + outputs(t). Throws NotEnabledError naming the empty input places.
Marking fire(const LabeledPetriNet& net, const Marking& m, TransitionId t);

/// Breadth-first exploration from the initial marking, in discovery order.
/// Throws ExplorationLimitError when more than `bound` markings are found.
std::vector<Marking> reachable_markings(const AcceptingPetriNet& apn, std::size_t bound = 100000);

/// Visible traces of length <= max_len leading from the initial to the final
/// marking. `max_states` caps the number of (marking, trace) states visited.
std::set<Trace> visible_language(const AcceptingPetriNet& apn, std::size_t max_len,
                                 std::size_t max_states = 1000000);

/// Membership test by depth-first search over (marking, trace position) with
/// silent moves. Throws ExplorationLimitError when `max_states` is exceeded,
/// which is different from a negative answer.
bool trace_accepted(const AcceptingPetriNet& apn, const Trace& trace,
                    std::size_t max_states = 1000000);

/// Multiset-weighted fraction of accepted traces. Throws InvalidArgumentError
/// on an empty trace log.
double conformance_fraction(const TraceLog& log, const AcceptingPetriNet& apn,
                            std::size_t max_states = 1000000);

}  // namespace ocpn
