// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "ocpn/error.hpp"

namespace ocpn {
namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

template <class Id>
std::optional<Id> find_sorted(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::lower_bound(names.begin(), names.end(), name,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == names.end() || *it != name) return std::nullopt;
  return static_cast<Id>(it - names.begin());
}

}  // namespace

std::span<const ObjectId> Event::objects_of(TypeId type) const {
  auto it = std::lower_bound(omap.begin(), omap.end(), type,
                             [](const ObjectRefs& r, TypeId t) { return r.type < t; });
  if (it == omap.end() || it->type != type) return {};
  return it->objects;
}

std::vector<TypeId> ObjectCentricEventLog::types_present() const {
  std::vector<TypeId> out;
  for (TypeId t = 0; t < referenced_.size(); ++t) {
    if (!referenced_[t].empty()) out.push_back(t);
  }
  return out;
}

std::optional<TypeId> ObjectCentricEventLog::find_type(std::string_view name) const {
  return find_sorted<TypeId>(type_names_, name);
}

TypeId ObjectCentricEventLog::type_id(std::string_view name) const {
  if (auto t = find_type(name)) return *t;
  throw UnknownNameError("unknown object type '" + std::string(name) +
                         "' (known types: " + join_names(type_names_) + ")");
}

std::optional<ActivityId> ObjectCentricEventLog::find_activity(std::string_view name) const {
  return find_sorted<ActivityId>(activity_names_, name);
}

ActivityId ObjectCentricEventLog::activity_id(std::string_view name) const {
  if (auto a = find_activity(name)) return *a;
  throw UnknownNameError("unknown activity '" + std::string(name) + "'");
}

std::optional<ObjectId> ObjectCentricEventLog::find_object(std::string_view name) const {
  auto it = object_index_.find(std::string(name));
  if (it == object_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> ObjectCentricEventLog::lifecycle(ObjectId o) const {
  const TypeId t = object_type(o);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    auto objs = events_[i].objects_of(t);
    if (std::binary_search(objs.begin(), objs.end(), o)) out.push_back(i);
  }
  return out;
}

void ObjectCentricEventLog::reindex() {
  if (object_index_.size() != object_names_.size()) {
    object_index_.clear();
    for (ObjectId o = 0; o < object_names_.size(); ++o) object_index_.emplace(object_names_[o], o);
  }
  referenced_.assign(type_names_.size(), {});
  activity_counts_.assign(activity_names_.size(), 0);
  std::vector<bool> seen(object_names_.size(), false);
  for (const auto& e : events_) {
    ++activity_counts_[e.activity];
    for (const auto& refs : e.omap) {
      for (ObjectId o : refs.objects) {
        if (!seen[o]) {
          seen[o] = true;
          referenced_[refs.type].push_back(o);
        }
      }
    }
  }
}

LogBuilder& LogBuilder::declare_type(std::string name) {
  declared_types_.insert(std::move(name));
  return *this;
}

LogBuilder& LogBuilder::add(EventRecord record) {
  records_.push_back(std::move(record));
  return *this;
}

ObjectCentricEventLog LogBuilder::build() const {
  ObjectCentricEventLog log;

  std::vector<std::string> ids(records_.size());
  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    ids[i] = records_[i].id.empty() ? "e" + std::to_string(i + 1) : records_[i].id;
    if (!seen_ids.insert(ids[i]).second) throw Error("duplicate event id '" + ids[i] + "'");
  }

  std::vector<std::size_t> order(records_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records_[a].time < records_[b].time;
  });

  std::set<std::string> types = declared_types_;
  std::set<std::string> activities;
  for (const auto& r : records_) {
    activities.insert(r.activity);
    for (const auto& [type, objects] : r.objects) types.insert(type);
  }
  log.type_names_.assign(types.begin(), types.end());
  log.activity_names_.assign(activities.begin(), activities.end());

  log.events_.reserve(records_.size());
  for (std::size_t idx : order) {
    const EventRecord& r = records_[idx];
    if (r.activity.empty()) throw Error("event '" + ids[idx] + "' has an empty activity");
    Event e;
    e.id = ids[idx];
    e.activity = *log.find_activity(r.activity);
    e.time = r.time;
    e.attributes = r.attributes;
    for (const auto& [type_name, objects] : r.objects) {
      if (objects.empty()) continue;
      const TypeId type = *log.find_type(type_name);
      ObjectRefs refs{type, {}};
      refs.objects.reserve(objects.size());
      for (const auto& name : objects) {
        auto [it, inserted] =
            log.object_index_.emplace(name, static_cast<ObjectId>(log.object_names_.size()));
        if (inserted) {
          log.object_names_.push_back(name);
          log.object_types_.push_back(type);
        } else if (log.object_types_[it->second] != type) {
          throw Error("object '" + name + "' appears with type '" + type_name + "' in event '" +
                      e.id + "' but with type '" + log.type_names_[log.object_types_[it->second]] +
                      "' elsewhere");
        }
        refs.objects.push_back(it->second);
      }
      std::sort(refs.objects.begin(), refs.objects.end());
      refs.objects.erase(std::unique(refs.objects.begin(), refs.objects.end()), refs.objects.end());
      e.omap.push_back(std::move(refs));
    }
    // std::map iteration is by name and type ids follow name order, so omap is sorted.
    if (e.omap.empty()) throw Error("event '" + e.id + "' references no objects");
    log.events_.push_back(std::move(e));
  }
  log.reindex();
  return log;
}

ObjectCentricEventLog derive_log(const ObjectCentricEventLog& base, std::vector<Event> events) {
  ObjectCentricEventLog log;
  log.type_names_ = base.type_names_;
  log.activity_names_ = base.activity_names_;
  log.object_names_ = base.object_names_;
  log.object_types_ = base.object_types_;
  log.object_index_ = base.object_index_;
  log.events_ = std::move(events);
  log.reindex();
  return log;
}

// ---------------------------------------------------------------------------

std::string FlattenedEventLog::event_id(std::size_t i) const {
  return source_event(i).id + "#" + log_->object_name(events_[i].case_id);
}

bool FlattenedEventLog::precedes(std::size_t a, std::size_t b) const {
  const FlatEvent& x = events_[a];
  const FlatEvent& y = events_[b];
  if (!log_->precedes(x.source, y.source)) return false;
  return x.source != y.source || x.case_id == y.case_id;
}

std::vector<std::pair<ObjectId, std::vector<std::size_t>>> FlattenedEventLog::cases() const {
  std::vector<std::pair<ObjectId, std::vector<std::size_t>>> out;
  std::unordered_map<ObjectId, std::size_t> slot;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    auto [it, inserted] = slot.emplace(events_[i].case_id, out.size());
    if (inserted) out.emplace_back(events_[i].case_id, std::vector<std::size_t>{});
    out[it->second].second.push_back(i);
  }
  return out;
}

FlattenedEventLog flatten(const ObjectCentricEventLog& log, TypeId type) {
  std::vector<FlatEvent> events;
  for (std::size_t i = 0; i < log.size(); ++i) {
    for (ObjectId o : log[i].objects_of(type)) events.push_back({i, o});
  }
  return FlattenedEventLog(log, type, std::move(events));
}

FlattenedEventLog flatten(const ObjectCentricEventLog& log, std::string_view type) {
  return flatten(log, log.type_id(type));
}

void TraceLog::add(Trace trace, std::size_t times) {
  if (times == 0) return;
  variants_[std::move(trace)] += times;
  total_ += times;
}

std::size_t TraceLog::count(const Trace& t) const {
  auto it = variants_.find(t);
  return it == variants_.end() ? 0 : it->second;
}

TraceLog to_trace_log(const FlattenedEventLog& flat) {
  TraceLog out;
  const auto& log = flat.source_log();
  for (const auto& [case_id, indices] : flat.cases()) {
    Trace trace;
    trace.reserve(indices.size());
    for (std::size_t i : indices) trace.push_back(log.activity_name(flat.activity(i)));
    out.add(std::move(trace));
  }
  return out;
}

// ---------------------------------------------------------------------------

FlatteningDiagnostics flattening_diagnostics(const ObjectCentricEventLog& log,
                                             std::string_view type_name) {
  const TypeId type = log.type_id(type_name);
  FlatteningDiagnostics out;
  out.object_type = std::string(type_name);

  std::map<std::vector<ObjectId>, std::vector<std::size_t>> by_object_set;
  for (std::size_t i = 0; i < log.size(); ++i) {
    auto objs = log[i].objects_of(type);
    if (objs.empty()) {
      out.deficient.push_back(log[i].id);
      continue;
    }
    if (objs.size() >= 2) out.convergent.push_back(log[i].id);
    by_object_set[std::vector<ObjectId>(objs.begin(), objs.end())].push_back(i);
  }

  std::vector<bool> divergent(log.size(), false);
  for (const auto& [key, members] : by_object_set) {
    if (members.size() < 2) continue;
    for (TypeId other = 0; other < log.object_types().size(); ++other) {
      if (other == type) continue;
      std::map<std::vector<ObjectId>, std::vector<std::size_t>> buckets;
      for (std::size_t i : members) {
        auto objs = log[i].objects_of(other);
        if (!objs.empty()) buckets[std::vector<ObjectId>(objs.begin(), objs.end())].push_back(i);
      }
      if (buckets.size() < 2) continue;
      for (const auto& [k, idx] : buckets) {
        for (std::size_t i : idx) divergent[i] = true;
      }
    }
  }
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (divergent[i]) out.divergent.push_back(log[i].id);
  }
  return out;
}

double score(const ObjectCentricEventLog& log, ActivityId activity, TypeId type) {
  std::size_t total = 0;
  std::size_t single = 0;
  for (const auto& e : log.events()) {
    if (e.activity != activity) continue;
    ++total;
    if (e.count_of(type) == 1) ++single;
  }
  if (total == 0) {
    throw UnknownNameError("activity '" + log.activity_name(activity) + "' does not occur in the log");
  }
  return static_cast<double>(single) / static_cast<double>(total);
}

double score(const ObjectCentricEventLog& log, std::string_view activity, std::string_view type) {
  auto a = log.find_activity(activity);
  if (!a || log.activity_counts()[*a] == 0) {
    throw UnknownNameError("activity '" + std::string(activity) + "' does not occur in the log");
  }
  return score(log, *a, log.type_id(type));
}

std::vector<ObjectTypeStats> object_type_stats(const ObjectCentricEventLog& log) {
  const std::size_t n_act = log.activities().size();
  const std::size_t n_type = log.object_types().size();
  struct Acc {
    std::size_t min = std::numeric_limits<std::size_t>::max();
    std::size_t max = 0;
    std::size_t sum = 0;
    std::unordered_set<ObjectId> objects;
  };
  std::vector<Acc> acc(n_act * n_type);
  for (const auto& e : log.events()) {
    for (TypeId t = 0; t < n_type; ++t) {
      Acc& a = acc[e.activity * n_type + t];
      auto objs = e.objects_of(t);
      a.min = std::min(a.min, objs.size());
      a.max = std::max(a.max, objs.size());
      a.sum += objs.size();
      a.objects.insert(objs.begin(), objs.end());
    }
  }
  std::vector<ObjectTypeStats> out;
  for (ActivityId act = 0; act < n_act; ++act) {
    const std::size_t events = log.activity_counts()[act];
    if (events == 0) continue;
    for (TypeId t = 0; t < n_type; ++t) {
      const Acc& a = acc[act * n_type + t];
      out.push_back({log.activity_name(act), log.type_name(t), a.min,
                     static_cast<double>(a.sum) / static_cast<double>(events), a.max, events,
                     a.objects.size()});
    }
  }
  return out;
}

std::string format_mean(double value) {
  const double rounded = std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", rounded);
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<double> as_number(const AttributeValue& v) {
  if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

bool matches(const Attributes& attrs, const AttributePredicate& p) {
  auto it = attrs.find(p.attribute);
  if (it == attrs.end()) return false;
  if (p.op == AttributePredicate::Op::exists) return true;
  const AttributeValue& v = it->second;

  int cmp = 0;
  bool comparable = false;
  if (auto a = as_number(v), b = as_number(p.value); a && b) {
    cmp = *a < *b ? -1 : (*a > *b ? 1 : 0);
    comparable = true;
  } else if (v.index() == p.value.index()) {
    if (auto s = std::get_if<std::string>(&v)) {
      const auto& t = std::get<std::string>(p.value);
      cmp = s->compare(t) < 0 ? -1 : (s->compare(t) > 0 ? 1 : 0);
      comparable = true;
    } else if (auto b1 = std::get_if<bool>(&v)) {
      cmp = static_cast<int>(*b1) - static_cast<int>(std::get<bool>(p.value));
      comparable = true;
    }
  }
  using Op = AttributePredicate::Op;
  switch (p.op) {
    case Op::eq: return comparable && cmp == 0;
    case Op::ne: return !comparable || cmp != 0;
    case Op::lt: return comparable && cmp < 0;
    case Op::le: return comparable && cmp <= 0;
    case Op::gt: return comparable && cmp > 0;
    case Op::ge: return comparable && cmp >= 0;
    case Op::exists: return true;
  }
  return false;
}

}  // namespace

bool FilterSpec::is_identity() const {
  return retained.empty() && !activities && !object_types && min_activity_frequency == 0 &&
         !start && !end && attributes.empty();
}

ObjectCentricEventLog filter_log(const ObjectCentricEventLog& log, const FilterSpec& spec) {
  const std::size_t n_type = log.object_types().size();
  const std::size_t n_act = log.activities().size();

  // allowed[act * n_type + type]
  std::vector<bool> allowed(n_act * n_type, true);
  if (!spec.retained.empty()) {
    std::fill(allowed.begin(), allowed.end(), false);
    for (const auto& [activity, types] : spec.retained) {
      const ActivityId a = log.activity_id(activity);
      for (const auto& t : types) allowed[a * n_type + log.type_id(t)] = true;
    }
  }
  if (spec.object_types) {
    std::vector<bool> in_view(n_type, false);
    for (const auto& t : *spec.object_types) in_view[log.type_id(t)] = true;
    for (std::size_t a = 0; a < n_act; ++a) {
      for (std::size_t t = 0; t < n_type; ++t) {
        if (!in_view[t]) allowed[a * n_type + t] = false;
      }
    }
  }
  std::vector<bool> activity_ok(n_act, true);
  if (spec.activities) {
    for (ActivityId a = 0; a < n_act; ++a) {
      activity_ok[a] = spec.activities->count(log.activity_name(a)) != 0;
    }
  }

  std::vector<Event> kept;
  std::vector<std::size_t> frequency(n_act, 0);
  for (const auto& e : log.events()) {
    if (!activity_ok[e.activity]) continue;
    if (spec.start && e.time < *spec.start) continue;
    if (spec.end && e.time >= *spec.end) continue;
    bool attrs_ok = true;
    for (const auto& p : spec.attributes) {
      if (!matches(e.attributes, p)) {
        attrs_ok = false;
        break;
      }
    }
    if (!attrs_ok) continue;
    Event copy = e;
    std::erase_if(copy.omap, [&](const ObjectRefs& r) {
      return !allowed[copy.activity * n_type + r.type];
    });
    if (copy.omap.empty()) continue;
    ++frequency[copy.activity];
    kept.push_back(std::move(copy));
  }
  if (spec.min_activity_frequency > 0) {
    std::erase_if(kept, [&](const Event& e) {
      return frequency[e.activity] < spec.min_activity_frequency;
    });
  }
  return derive_log(log, std::move(kept));
}

}  // namespace ocpn
