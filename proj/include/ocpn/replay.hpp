// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocpn/event_log.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/petri_net.hpp"

namespace ocpn {

/// Summary of a list of durations, in seconds.
struct DurationStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;

  static DurationStats of(std::vector<double> seconds);
  friend bool operator==(const DurationStats&, const DurationStats&) = default;
};

struct PlaceDiagnostics {
  std::size_t produced = 0;
  std::size_t consumed = 0;
  std::size_t missing = 0;
  std::size_t remaining = 0;
  DurationStats sojourn;  ///< consumption time - production time

  friend bool operator==(const PlaceDiagnostics&, const PlaceDiagnostics&) = default;
};

/// One token's life on a place. Producer/consumer are empty for tokens of the
/// initial marking and for the final consumption at the end of a case.
struct TokenRecord {
  PlaceId place = 0;
  std::optional<TransitionId> producer;
  std::optional<TransitionId> consumer;
  Timestamp produced{};
  std::optional<Timestamp> consumed;
};

struct ReplayOptions {
  bool record_tokens = true;
  /// Cap on markings explored when looking for silent moves.
  std::size_t silent_state_cap = 10000;
};

struct ReplayResult {
  std::vector<PlaceDiagnostics> places;  ///< indexed by place id of the replayed net
  std::vector<std::size_t> firings;      ///< per transition, over all cases
  std::vector<TokenRecord> tokens;       ///< only with record_tokens; inserted tokens excluded
  std::size_t cases = 0;
  std::size_t variants = 0;
  std::size_t fitting_cases = 0;     ///< cases without missing or remaining tokens
  std::size_t unmatched_events = 0;  ///< events whose activity labels no transition

  std::size_t total_produced() const;
  std::size_t total_consumed() const;
  std::size_t total_missing() const;
  std::size_t total_remaining() const;
  /// 1/2 (1 - m/c) + 1/2 (1 - r/p).
  double fitness() const;
};

/// Token-based replay of every case of `flat`, computed once per control-flow
/// variant and then timed per case. Requires an injective labeling. Silent
/// transitions are fired when a shortest silent sequence (at most 2|T|
/// firings) enables the next event; otherwise missing tokens are inserted.
ReplayResult token_replay(const FlattenedEventLog& flat, const AcceptingPetriNet& apn,
                          const ReplayOptions& options = {});

// ---------------------------------------------------------------------------

struct TypeFrequency {
  std::size_t unique_objects = 0;
  double mean = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;

  friend bool operator==(const TypeFrequency&, const TypeFrequency&) = default;
};

struct TransitionAnnotation {
  std::size_t frequency = 0;  ///< events of the activity in the log
  std::map<std::string, TypeFrequency> types;

  friend bool operator==(const TransitionAnnotation&, const TransitionAnnotation&) = default;
};

struct ArcAnnotation {
  std::size_t occurrences = 0;  ///< firings moving at least one token along the arc
  std::size_t tokens = 0;       ///< tokens moved in total
  double mean_multiplicity = 0.0;
  std::size_t min_multiplicity = 0;
  std::size_t max_multiplicity = 0;
  /// Input arcs: waiting time of consumed tokens. Output arcs: time until the
  /// produced tokens were consumed.
  DurationStats duration;

  friend bool operator==(const ArcAnnotation&, const ArcAnnotation&) = default;
};

struct Annotations {
  std::vector<PlaceDiagnostics> places;              ///< by PlaceId
  std::vector<TransitionAnnotation> transitions;     ///< by TransitionId
  std::map<Arc, ArcAnnotation> arcs;

  friend bool operator==(const Annotations&, const Annotations&) = default;
};

struct AnnotatedOCPN {
  AcceptingOCPN model;
  std::optional<Annotations> annotations;

  friend bool operator==(const AnnotatedOCPN&, const AnnotatedOCPN&) = default;
};

struct AnnotateOptions {
  std::size_t jobs = 0;
};

/// Frequencies come from the log itself, place diagnostics and timings from
/// token replay of each type's flattened log on that type's projection.
AnnotatedOCPN annotate(const ObjectCentricEventLog& log, const AcceptingOCPN& model,
                       const AnnotateOptions& options = {});

struct FailureStats {
  struct PerType {
    std::string type;
    std::size_t at_least_once = 0;
    std::size_t at_least_twice = 0;
  };
  std::string activity;
  std::size_t events = 0;
  std::vector<PerType> types;  ///< types referenced by the activity, sorted
};

/// How often objects are involved in an activity. Throws UnknownNameError if
/// the activity does not occur.
FailureStats failure_stats(const ObjectCentricEventLog& log, std::string_view activity);

struct TypeConformance {
  std::string type;
  std::size_t cases = 0;
  std::size_t accepted = 0;
  std::size_t undetermined = 0;  ///< traces whose membership search hit the state cap
  /// accepted / (cases - undetermined); 0 when nothing was decided.
  double trace_fraction = 0.0;
  double token_fitness = 0.0;
};

/// Per-type conformance of a log against a model. `max_states` caps the
/// membership search of each variant.
std::vector<TypeConformance> conformance(const ObjectCentricEventLog& log, const AcceptingOCPN& model,
                                         std::size_t jobs = 0, std::size_t max_states = 200000);

}  // namespace ocpn
