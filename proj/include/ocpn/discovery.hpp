// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ocpn/event_log.hpp"
#include "ocpn/multiset.hpp"
#include "ocpn/petri_net.hpp"

namespace ocpn {

struct DirectlyFollowsGraph {
  std::set<std::string> activities;
  std::map<std::pair<std::string, std::string>, std::size_t> edges;
  Multiset<std::string> starts;
  Multiset<std::string> ends;

  friend bool operator==(const DirectlyFollowsGraph&, const DirectlyFollowsGraph&) = default;
};

/// Throws InvalidArgumentError on an empty trace log. Empty traces are
/// counted in neither the start nor the end multiset.
DirectlyFollowsGraph build_dfg(const TraceLog& log);

/// Drops edges (a,b) with frequency below noise * (max outgoing frequency of a),
/// but always keeps the strongest outgoing and incoming edge of every activity.
DirectlyFollowsGraph filter_dfg(const DirectlyFollowsGraph& dfg, double noise);

struct ProcessTree {
  enum class Kind { activity, silent, exclusive, sequence, parallel, loop };

  Kind kind = Kind::silent;
  std::string label;  ///< activity name, only for Kind::activity
  /// For loops the first child is the do-part, the others are redo-parts.
  std::vector<ProcessTree> children;

  static ProcessTree leaf(std::string label) { return {Kind::activity, std::move(label), {}}; }
  static ProcessTree tau() { return {Kind::silent, {}, {}}; }
  static ProcessTree node(Kind kind, std::vector<ProcessTree> children) {
    return {kind, {}, std::move(children)};
  }

  /// "->( 'a', X( 'b', tau ) )" style: -> sequence, X exclusive, + parallel, * loop.
  std::string to_string() const;
  /// Activity labels in the tree.
  std::set<std::string> alphabet() const;
  std::size_t depth() const;

  friend bool operator==(const ProcessTree&, const ProcessTree&) = default;
};

/// Inductive miner over a directly-follows graph: cut precedence exclusive,
/// sequence, parallel, loop; a flower model when no cut applies.
ProcessTree discover_process_tree(const DirectlyFollowsGraph& dfg);

/// Log-splitting variant of the same miner. Cuts are detected on the
/// (noise-filtered) graph of each sublog, but the sublogs themselves are
/// recursed on, which is what makes every trace fit at noise 0.
ProcessTree discover_process_tree(const TraceLog& log, double noise = 0.0);

/// Workflow net with initial marking [source] and final marking [sink].
/// Places are named "{prefix}:{n}", silent transitions "{prefix}:tau{n}",
/// labeled transitions carry their label as name.
AcceptingPetriNet tree_to_accepting_net(const ProcessTree& tree, std::string_view prefix = "p");

/// Log -> process tree -> accepting net.
AcceptingPetriNet discover_accepting_net(const TraceLog& log, double noise = 0.0,
                                         std::string_view prefix = "p");

}  // namespace ocpn
