// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ocpn/time.hpp"

namespace ocpn {

using TypeId = std::uint32_t;
using ActivityId = std::uint32_t;
using ObjectId = std::uint32_t;

using AttributeValue = std::variant<bool, std::int64_t, double, std::string>;
using Attributes = std::map<std::string, AttributeValue>;

/// Objects of one type referenced by an event. `objects` is sorted and unique.
struct ObjectRefs {
  TypeId type = 0;
  std::vector<ObjectId> objects;

  friend bool operator==(const ObjectRefs&, const ObjectRefs&) = default;
};

struct Event {
  std::string id;
  ActivityId activity = 0;
  Timestamp time{};
  /// Sparse object map: sorted by type, only non-empty entries. A missing
  /// type means "no objects of that type".
  std::vector<ObjectRefs> omap;
  Attributes attributes;

  std::span<const ObjectId> objects_of(TypeId type) const;
  std::size_t count_of(TypeId type) const { return objects_of(type).size(); }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Raw, name-based event used to construct logs.
struct EventRecord {
  std::string id;  ///< empty: synthesized from insertion order ("e1", "e2", ...)
  std::string activity;
  Timestamp time{};
  std::map<std::string, std::vector<std::string>> objects;
  Attributes attributes;
};

/// Immutable object-centric event log. Events are totally ordered by
/// (timestamp, ingestion position); event i precedes event j iff i <= j.
class ObjectCentricEventLog {
public:
  ObjectCentricEventLog() = default;

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  /// The order over events: reflexive, antisymmetric, transitive and total.
  bool precedes(std::size_t i, std::size_t j) const noexcept { return i <= j; }

  /// Declared object types, sorted by name (including types no event references).
  const std::vector<std::string>& object_types() const noexcept { return type_names_; }
  /// Types referenced by at least one event.
  std::vector<TypeId> types_present() const;
  const std::string& type_name(TypeId t) const { return type_names_.at(t); }
  std::optional<TypeId> find_type(std::string_view name) const;
  /// Throws UnknownNameError naming the type and listing the known ones.
  TypeId type_id(std::string_view name) const;

  /// Activity names, sorted.
  const std::vector<std::string>& activities() const noexcept { return activity_names_; }
  const std::string& activity_name(ActivityId a) const { return activity_names_.at(a); }
  std::optional<ActivityId> find_activity(std::string_view name) const;
  ActivityId activity_id(std::string_view name) const;
  /// Number of events per activity, indexed by ActivityId.
  const std::vector<std::size_t>& activity_counts() const noexcept { return activity_counts_; }

  std::size_t object_count() const noexcept { return object_names_.size(); }
  const std::string& object_name(ObjectId o) const { return object_names_.at(o); }
  TypeId object_type(ObjectId o) const { return object_types_.at(o); }
  std::optional<ObjectId> find_object(std::string_view name) const;
  /// Objects of a type that some event references, in first-reference order.
  const std::vector<ObjectId>& objects_of_type(TypeId t) const { return referenced_.at(t); }

  /// Indices of the events referencing an object, in log order.
  std::vector<std::size_t> lifecycle(ObjectId o) const;

  friend bool operator==(const ObjectCentricEventLog& a, const ObjectCentricEventLog& b) {
    return a.events_ == b.events_ && a.type_names_ == b.type_names_ &&
           a.activity_names_ == b.activity_names_ && a.object_names_ == b.object_names_ &&
           a.object_types_ == b.object_types_;
  }

private:
  friend class LogBuilder;
  friend ObjectCentricEventLog derive_log(const ObjectCentricEventLog& base,
                                          std::vector<Event> events);
  void reindex();

  std::vector<Event> events_;
  std::vector<std::string> type_names_;
  std::vector<std::string> activity_names_;
  std::vector<std::string> object_names_;
  std::vector<TypeId> object_types_;
  std::unordered_map<std::string, ObjectId> object_index_;
  // derived
  std::vector<std::vector<ObjectId>> referenced_;
  std::vector<std::size_t> activity_counts_;
};

/// Collects name-based events and produces a validated, ordered log.
class LogBuilder {
public:
  /// Registers an object type even if no event references it.
  LogBuilder& declare_type(std::string name);
  LogBuilder& add(EventRecord record);

  /// Sorts events by (timestamp, insertion position) and interns names.
  /// Throws Error on duplicate event ids, object-less events, or an object
  /// id that appears under two different types.
  ObjectCentricEventLog build() const;

  std::size_t size() const noexcept { return records_.size(); }

private:
  std::vector<EventRecord> records_;
  std::set<std::string> declared_types_;
};

/// Keeps the name tables of `base` and recomputes indexes for a new event
/// sequence. `events` must already be in order and reference ids of `base`.
ObjectCentricEventLog derive_log(const ObjectCentricEventLog& base, std::vector<Event> events);

// ---------------------------------------------------------------------------
// Flattening

struct FlatEvent {
  std::size_t source = 0;  ///< index of the replicated event in the source log
  ObjectId case_id = 0;    ///< the single object of the case-notion type
};

/// Classical event log obtained by using one object type as the case notion.
/// Holds a reference to its source log, which must outlive it.
class FlattenedEventLog {
public:
  FlattenedEventLog(const ObjectCentricEventLog& log, TypeId type, std::vector<FlatEvent> events)
      : log_(&log), type_(type), events_(std::move(events)) {}

  const ObjectCentricEventLog& source_log() const noexcept { return *log_; }
  TypeId case_type() const noexcept { return type_; }
  const std::vector<FlatEvent>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }

  const Event& source_event(std::size_t i) const { return (*log_)[events_[i].source]; }
  ActivityId activity(std::size_t i) const { return source_event(i).activity; }
  Timestamp time(std::size_t i) const { return source_event(i).time; }
  ObjectId case_id(std::size_t i) const { return events_[i].case_id; }
  /// Composite identifier "ei#oi".
  std::string event_id(std::size_t i) const;

  /// e'_i precedes e''_j iff e' precedes e'' in the source log and replicas of
  /// the same source event are only related to themselves.
  bool precedes(std::size_t a, std::size_t b) const;

  /// Event indices grouped per case, cases in order of their first event.
  std::vector<std::pair<ObjectId, std::vector<std::size_t>>> cases() const;

private:
  const ObjectCentricEventLog* log_;
  TypeId type_;
  std::vector<FlatEvent> events_;
};

FlattenedEventLog flatten(const ObjectCentricEventLog& log, TypeId type);
/// Throws UnknownNameError if the type is not in the log.
FlattenedEventLog flatten(const ObjectCentricEventLog& log, std::string_view type);

using Trace = std::vector<std::string>;

/// Multiset of activity sequences.
class TraceLog {
public:
  void add(Trace trace, std::size_t times = 1);

  /// Distinct traces with their multiplicities, ordered lexicographically.
  const std::map<Trace, std::size_t>& variants() const noexcept { return variants_; }
  /// Number of trace instances (sum of multiplicities).
  std::size_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::size_t count(const Trace& t) const;

  friend bool operator==(const TraceLog&, const TraceLog&) = default;

private:
  std::map<Trace, std::size_t> variants_;
  std::size_t total_ = 0;
};

TraceLog to_trace_log(const FlattenedEventLog& flat);

// ---------------------------------------------------------------------------
// Diagnostics and statistics

struct FlatteningDiagnostics {
  std::string object_type;
  std::vector<std::string> deficient;   ///< events without objects of the type
  std::vector<std::string> convergent;  ///< events with two or more objects of the type
  std::vector<std::string> divergent;
};

/// Divergence detection groups events by their object set of the case type,
/// so the cost is near-linear unless many events share one object set.
FlatteningDiagnostics flattening_diagnostics(const ObjectCentricEventLog& log,
                                             std::string_view type);

/// Fraction of `activity` events that reference exactly one object of `type`.
/// Throws UnknownNameError if the activity does not occur.
double score(const ObjectCentricEventLog& log, std::string_view activity, std::string_view type);
double score(const ObjectCentricEventLog& log, ActivityId activity, TypeId type);

struct ObjectTypeStats {
  std::string activity;
  std::string object_type;
  std::size_t min = 0;
  double mean = 0.0;  ///< full precision; round only for presentation
  std::size_t max = 0;
  std::size_t events = 0;          ///< events of the activity
  std::size_t unique_objects = 0;  ///< distinct objects of the type across those events
};

/// One row per (activity, object type) pair, activities then types sorted by name.
std::vector<ObjectTypeStats> object_type_stats(const ObjectCentricEventLog& log);

/// Rounds half away from zero to two decimals and prints "4.08".
std::string format_mean(double value);

// ---------------------------------------------------------------------------
// Filtering

struct AttributePredicate {
  enum class Op { eq, ne, lt, le, gt, ge, exists };
  std::string attribute;
  Op op = Op::eq;
  AttributeValue value;

  friend bool operator==(const AttributePredicate&, const AttributePredicate&) = default;
};

struct FilterSpec {
  /// activity -> object types kept for that activity. When non-empty,
  /// activities not listed lose all their objects (and are thus dropped).
  std::map<std::string, std::set<std::string>> retained;
  /// Only keep events of these activities. Unknown names simply match nothing.
  std::optional<std::set<std::string>> activities;
  /// Global object-type view applied to every activity.
  std::optional<std::set<std::string>> object_types;
  /// Drop activities occurring fewer times than this in the input log.
  std::size_t min_activity_frequency = 0;
  std::optional<Timestamp> start;  ///< inclusive
  std::optional<Timestamp> end;    ///< exclusive
  std::vector<AttributePredicate> attributes;

  bool is_identity() const;
  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

/// Applies all predicates; events left without objects are dropped and the
/// order of the survivors is preserved.
ObjectCentricEventLog filter_log(const ObjectCentricEventLog& log, const FilterSpec& spec);

}  // namespace ocpn
