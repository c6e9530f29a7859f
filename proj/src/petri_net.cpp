// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/petri_net.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "ocpn/error.hpp"

namespace ocpn {
namespace {

void insert_sorted(std::vector<std::uint32_t>& v, std::uint32_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

void LabeledPetriNet::claim_name(const std::string& name) {
  if (place_index_.count(name) || transition_index_.count(name)) {
    throw Error("duplicate node name '" + name + "'");
  }
}

PlaceId LabeledPetriNet::add_place(std::string name) {
  claim_name(name);
  const auto id = static_cast<PlaceId>(place_names_.size());
  place_index_.emplace(name, id);
  place_names_.push_back(std::move(name));
  consumers_.emplace_back();
  producers_.emplace_back();
  return id;
}

TransitionId LabeledPetriNet::add_transition(std::string name, std::optional<std::string> label) {
  claim_name(name);
  const auto id = static_cast<TransitionId>(transitions_.size());
  transition_index_.emplace(name, id);
  transitions_.push_back({std::move(name), std::move(label), {}, {}});
  return id;
}

void LabeledPetriNet::add_input(PlaceId p, TransitionId t) {
  insert_sorted(transitions_.at(t).inputs, p);
  insert_sorted(consumers_.at(p), t);
}

void LabeledPetriNet::add_output(TransitionId t, PlaceId p) {
  insert_sorted(transitions_.at(t).outputs, p);
  insert_sorted(producers_.at(p), t);
}

void LabeledPetriNet::add_arc(const Arc& a) {
  if (a.to_transition) {
    add_input(a.place, a.transition);
  } else {
    add_output(a.transition, a.place);
  }
}

std::optional<PlaceId> LabeledPetriNet::find_place(std::string_view name) const {
  auto it = place_index_.find(std::string(name));
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TransitionId> LabeledPetriNet::find_transition(std::string_view name) const {
  auto it = transition_index_.find(std::string(name));
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<TransitionId> LabeledPetriNet::transitions_labeled(std::string_view label) const {
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < transitions_.size(); ++t) {
    if (transitions_[t].label && *transitions_[t].label == label) out.push_back(t);
  }
  return out;
}

std::vector<Arc> LabeledPetriNet::arcs() const {
  std::vector<Arc> out;
  for (TransitionId t = 0; t < transitions_.size(); ++t) {
    for (PlaceId p : transitions_[t].inputs) out.push_back({p, t, true});
    for (PlaceId p : transitions_[t].outputs) out.push_back({p, t, false});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool LabeledPetriNet::has_arc(const Arc& a) const {
  if (a.transition >= transitions_.size()) return false;
  const auto& v = a.to_transition ? transitions_[a.transition].inputs : transitions_[a.transition].outputs;
  return std::binary_search(v.begin(), v.end(), a.place);
}

std::string LabeledPetriNet::format(const Marking& m) const {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (const auto& [p, n] : m) {
    if (!first) os << ", ";
    first = false;
    os << place_name(p);
    if (n > 1) os << '^' << n;
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------

bool is_enabled(const LabeledPetriNet& net, const Marking& m, TransitionId t) {
  for (PlaceId p : net.inputs(t)) {
    if (!m.contains(p)) return false;
  }
  return true;
}

std::vector<TransitionId> enabled_transitions(const LabeledPetriNet& net, const Marking& m) {
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    if (is_enabled(net, m, t)) out.push_back(t);
  }
  return out;
}

Marking fire(const LabeledPetriNet& net, const Marking& m, TransitionId t) {
  std::string missing;
  for (PlaceId p : net.inputs(t)) {
    if (!m.contains(p)) {
      if (!missing.empty()) missing += ", ";
      missing += net.place_name(p);
    }
  }
  if (!missing.empty()) {
    throw NotEnabledError("transition '" + net.transition_name(t) + "' is not enabled in " +
                          net.format(m) + ": no token in " + missing);
  }
  Marking next = m;
  for (PlaceId p : net.inputs(t)) next.remove(p);
  for (PlaceId p : net.outputs(t)) next.add(p);
  return next;
}

std::vector<Marking> reachable_markings(const AcceptingPetriNet& apn, std::size_t bound) {
  std::vector<Marking> order{apn.initial};
  std::unordered_set<Marking, MarkingHash> seen{apn.initial};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Marking current = order[head];
    for (TransitionId t : enabled_transitions(apn.net, current)) {
      Marking next = fire(apn.net, current, t);
      if (seen.insert(next).second) {
        if (seen.size() > bound) {
          throw ExplorationLimitError("more than " + std::to_string(bound) + " reachable markings");
        }
        order.push_back(std::move(next));
      }
    }
  }
  return order;
}

namespace {

struct LanguageState {
  Marking marking;
  Trace trace;
  friend bool operator==(const LanguageState&, const LanguageState&) = default;
};

struct LanguageStateHash {
  std::size_t operator()(const LanguageState& s) const noexcept {
    std::size_t h = s.marking.hash();
    for (const auto& a : s.trace) h = h * 1099511628211ULL ^ std::hash<std::string>{}(a);
    return h;
  }
};

}  // namespace

std::set<Trace> visible_language(const AcceptingPetriNet& apn, std::size_t max_len,
                                 std::size_t max_states) {
  std::set<Trace> out;
  std::deque<LanguageState> queue{{apn.initial, {}}};
  std::unordered_set<LanguageState, LanguageStateHash> seen{queue.front()};
  while (!queue.empty()) {
    LanguageState s = std::move(queue.front());
    queue.pop_front();
    if (s.marking == apn.final) out.insert(s.trace);
    for (TransitionId t : enabled_transitions(apn.net, s.marking)) {
      const auto& label = apn.net.label(t);
      if (label && s.trace.size() >= max_len) continue;
      LanguageState next{fire(apn.net, s.marking, t), s.trace};
      if (label) next.trace.push_back(*label);
      if (seen.insert(next).second) {
        if (seen.size() > max_states) {
          throw ExplorationLimitError("language exploration exceeded " +
                                      std::to_string(max_states) + " states");
        }
        queue.push_back(std::move(next));
      }
    }
  }
  return out;
}

namespace {

struct SearchState {
  Marking marking;
  std::size_t position;
  friend bool operator==(const SearchState&, const SearchState&) = default;
};

struct SearchStateHash {
  std::size_t operator()(const SearchState& s) const noexcept {
    return s.marking.hash() * 31 + s.position;
  }
};

}  // namespace

bool trace_accepted(const AcceptingPetriNet& apn, const Trace& trace, std::size_t max_states) {
  std::vector<SearchState> stack{{apn.initial, 0}};
  std::unordered_set<SearchState, SearchStateHash> seen{stack.front()};
  while (!stack.empty()) {
    SearchState s = std::move(stack.back());
    stack.pop_back();
    if (s.position == trace.size() && s.marking == apn.final) return true;
    // Visible moves are pushed last so they are explored first.
    std::vector<SearchState> silent, visible;
    for (TransitionId t : enabled_transitions(apn.net, s.marking)) {
      const auto& label = apn.net.label(t);
      if (label && (s.position == trace.size() || *label != trace[s.position])) continue;
      SearchState next{fire(apn.net, s.marking, t), s.position + (label ? 1 : 0)};
      (label ? visible : silent).push_back(std::move(next));
    }
    for (auto* group : {&silent, &visible}) {
      for (auto& next : *group) {
        if (!seen.insert(next).second) continue;
        if (seen.size() > max_states) {
          throw ExplorationLimitError("membership search exceeded " + std::to_string(max_states) +
                                      " states");
        }
        stack.push_back(std::move(next));
      }
    }
  }
  return false;
}

double conformance_fraction(const TraceLog& log, const AcceptingPetriNet& apn,
                            std::size_t max_states) {
  if (log.empty()) throw InvalidArgumentError("conformance of an empty trace log is undefined");
  std::size_t accepted = 0;
  for (const auto& [trace, n] : log.variants()) {
    if (trace_accepted(apn, trace, max_states)) accepted += n;
  }
  return static_cast<double>(accepted) / static_cast<double>(log.total());
}

}  // namespace ocpn
