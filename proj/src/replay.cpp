// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/replay.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "ocpn/error.hpp"
#include "ocpn/parallel.hpp"

namespace ocpn {

DurationStats DurationStats::of(std::vector<double> seconds) {
  DurationStats s;
  if (seconds.empty()) return s;
  std::sort(seconds.begin(), seconds.end());
  s.count = seconds.size();
  s.mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(s.count);
  const std::size_t mid = s.count / 2;
  s.median = s.count % 2 ? seconds[mid] : (seconds[mid - 1] + seconds[mid]) / 2.0;
  s.min = seconds.front();
  s.max = seconds.back();
  return s;
}

std::size_t ReplayResult::total_produced() const {
  std::size_t n = 0;
  for (const auto& p : places) n += p.produced;
  return n;
}

std::size_t ReplayResult::total_consumed() const {
  std::size_t n = 0;
  for (const auto& p : places) n += p.consumed;
  return n;
}

std::size_t ReplayResult::total_missing() const {
  std::size_t n = 0;
  for (const auto& p : places) n += p.missing;
  return n;
}

std::size_t ReplayResult::total_remaining() const {
  std::size_t n = 0;
  for (const auto& p : places) n += p.remaining;
  return n;
}

double ReplayResult::fitness() const {
  const double c = static_cast<double>(total_consumed());
  const double p = static_cast<double>(total_produced());
  const double missing = c > 0 ? static_cast<double>(total_missing()) / c : 0.0;
  const double remaining = p > 0 ? static_cast<double>(total_remaining()) / p : 0.0;
  return 0.5 * (1.0 - missing) + 0.5 * (1.0 - remaining);
}

namespace {

struct Step {
  TransitionId transition = 0;
  std::optional<std::size_t> event;  // position in the trace for visible firings
  std::vector<PlaceId> inserted;     // missing tokens added right before firing
};

struct Script {
  std::vector<Step> steps;
  std::vector<PlaceId> final_consumed;  // tokens of the final marking that were present
  std::vector<PlaceId> final_missing;
  Marking remaining;
  std::vector<bool> matched;  // per trace position
};

class Replayer {
public:
  Replayer(const AcceptingPetriNet& apn, const ReplayOptions& options) : apn_(apn), options_(options) {
    const auto& net = apn.net;
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
      if (net.is_silent(t)) {
        silent_.push_back(t);
        continue;
      }
      auto [it, inserted] = by_label_.emplace(*net.label(t), t);
      if (!inserted) {
        throw InvalidArgumentError("token replay needs unique labels, '" + *net.label(t) +
                                   "' labels several transitions");
      }
    }
    max_silent_ = 2 * net.transition_count();
  }

  Script run(const std::vector<ActivityId>& trace, const ObjectCentricEventLog& log) const {
    const auto& net = apn_.net;
    Script script;
    script.matched.assign(trace.size(), false);
    Marking m = apn_.initial;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      auto it = by_label_.find(log.activity_name(trace[i]));
      if (it == by_label_.end()) continue;
      script.matched[i] = true;
      const TransitionId t = it->second;
      if (!is_enabled(net, m, t)) {
        auto path = silent_path(m, [&](const Marking& x) { return is_enabled(net, x, t); });
        if (path) {
          for (TransitionId s : *path) {
            script.steps.push_back({s, std::nullopt, {}});
            m = fire(net, m, s);
          }
        }
      }
      Step step{t, i, {}};
      for (PlaceId p : net.inputs(t)) {
        if (!m.contains(p)) {
          step.inserted.push_back(p);
          m.add(p);
        }
      }
      m = fire(net, m, t);
      script.steps.push_back(std::move(step));
    }
    if (!(m == apn_.final)) {
      auto path = silent_path(m, [&](const Marking& x) { return x == apn_.final; });
      if (!path) path = silent_path(m, [&](const Marking& x) { return apn_.final <= x; });
      if (path) {
        for (TransitionId s : *path) {
          script.steps.push_back({s, std::nullopt, {}});
          m = fire(net, m, s);
        }
      }
    }
    for (const auto& [p, n] : apn_.final) {
      const std::size_t present = std::min(n, m.count(p));
      for (std::size_t k = 0; k < present; ++k) script.final_consumed.push_back(p);
      for (std::size_t k = present; k < n; ++k) script.final_missing.push_back(p);
      m.remove(p, present);
    }
    script.remaining = std::move(m);
    return script;
  }

private:
  template <typename Goal>
  std::optional<std::vector<TransitionId>> silent_path(const Marking& from, Goal goal) const {
    if (silent_.empty()) return std::nullopt;
    struct Node {
      Marking marking;
      std::size_t parent;
      TransitionId via;
      std::size_t depth;
    };
    std::vector<Node> nodes{{from, 0, 0, 0}};
    std::unordered_map<Marking, std::size_t, MarkingHash> seen{{from, 0}};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
      if (nodes[head].depth >= max_silent_) continue;
      for (TransitionId s : silent_) {
        if (!is_enabled(apn_.net, nodes[head].marking, s)) continue;
        Marking next = fire(apn_.net, nodes[head].marking, s);
        if (seen.count(next)) continue;
        if (seen.size() >= options_.silent_state_cap) return std::nullopt;
        const bool done = goal(next);
        seen.emplace(next, nodes.size());
        nodes.push_back({std::move(next), head, s, nodes[head].depth + 1});
        if (done) {
          std::vector<TransitionId> path;
          for (std::size_t at = nodes.size() - 1; at != 0; at = nodes[at].parent) path.push_back(nodes[at].via);
          std::reverse(path.begin(), path.end());
          return path;
        }
      }
    }
    return std::nullopt;
  }

  const AcceptingPetriNet& apn_;
  const ReplayOptions& options_;
  std::vector<TransitionId> silent_;
  std::map<std::string, TransitionId, std::less<>> by_label_;
  std::size_t max_silent_ = 0;
};

struct QueuedToken {
  Timestamp time;
  std::optional<TransitionId> producer;
  bool inserted = false;
};

}  // namespace

ReplayResult token_replay(const FlattenedEventLog& flat, const AcceptingPetriNet& apn,
                          const ReplayOptions& options) {
  const auto& net = apn.net;
  const auto& log = flat.source_log();
  Replayer replayer(apn, options);
  ReplayResult result;
  result.places.resize(net.place_count());
  result.firings.assign(net.transition_count(), 0);
  std::vector<std::vector<double>> sojourn(net.place_count());

  std::map<std::vector<ActivityId>, Script> scripts;
  for (const auto& [case_id, positions] : flat.cases()) {
    ++result.cases;
    std::vector<ActivityId> trace;
    trace.reserve(positions.size());
    for (std::size_t i : positions) trace.push_back(flat.activity(i));
    auto it = scripts.find(trace);
    if (it == scripts.end()) it = scripts.emplace(trace, replayer.run(trace, log)).first;
    const Script& script = it->second;

    bool fitting = script.final_missing.empty() && script.remaining.empty();
    for (bool matched : script.matched) result.unmatched_events += matched ? 0 : 1;

    const Timestamp first = flat.time(positions.front());
    const Timestamp last = flat.time(positions.back());
    std::vector<std::deque<QueuedToken>> queues(net.place_count());
    auto consume = [&](PlaceId p, std::optional<TransitionId> consumer, Timestamp at) {
      ++result.places[p].consumed;
      QueuedToken token = queues[p].front();
      queues[p].pop_front();
      if (token.inserted) return;
      const double seconds = to_seconds(at - token.time);
      sojourn[p].push_back(seconds);
      if (options.record_tokens) result.tokens.push_back({p, token.producer, consumer, token.time, at});
    };

    for (const auto& [p, n] : apn.initial) {
      result.places[p].produced += n;
      for (std::size_t k = 0; k < n; ++k) queues[p].push_back({first, std::nullopt, false});
    }
    Timestamp now = first;
    for (const Step& step : script.steps) {
      if (step.event) now = flat.time(positions[*step.event]);
      ++result.firings[step.transition];
      for (PlaceId p : step.inserted) {
        ++result.places[p].missing;
        fitting = false;
        queues[p].push_back({now, std::nullopt, true});
      }
      for (PlaceId p : net.inputs(step.transition)) consume(p, step.transition, now);
      for (PlaceId p : net.outputs(step.transition)) {
        ++result.places[p].produced;
        queues[p].push_back({now, step.transition, false});
      }
    }
    for (PlaceId p : script.final_consumed) consume(p, std::nullopt, last);
    for (PlaceId p : script.final_missing) ++result.places[p].missing;
    for (PlaceId p : script.final_missing) ++result.places[p].consumed;
    for (PlaceId p = 0; p < net.place_count(); ++p) {
      for (const QueuedToken& token : queues[p]) {
        ++result.places[p].remaining;
        if (options.record_tokens && !token.inserted) {
          result.tokens.push_back({p, token.producer, std::nullopt, token.time, std::nullopt});
        }
      }
    }
    if (fitting) ++result.fitting_cases;
  }
  result.variants = scripts.size();
  for (PlaceId p = 0; p < net.place_count(); ++p) result.places[p].sojourn = DurationStats::of(std::move(sojourn[p]));
  return result;
}

// ---------------------------------------------------------------------------

AnnotatedOCPN annotate(const ObjectCentricEventLog& log, const AcceptingOCPN& model,
                       const AnnotateOptions& options) {
  const auto& ocpn = model.ocpn;
  const auto& net = ocpn.net;
  Annotations ann;
  ann.places.resize(net.place_count());
  ann.transitions.resize(net.transition_count());

  std::map<std::pair<std::string, std::string>, const ObjectTypeStats*> stats_index;
  const auto stats = object_type_stats(log);
  for (const auto& row : stats) stats_index[{row.activity, row.object_type}] = &row;

  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    if (net.is_silent(t)) continue;
    auto& ta = ann.transitions[t];
    const auto activity = log.find_activity(*net.label(t));
    if (activity) ta.frequency = log.activity_counts()[*activity];
    for (const auto& type : ocpn.transition_types(t)) {
      TypeFrequency f;
      auto it = stats_index.find({*net.label(t), type});
      if (it != stats_index.end()) {
        f.unique_objects = it->second->unique_objects;
        f.mean = it->second->mean;
        f.min = it->second->min;
        f.max = it->second->max;
      }
      ta.types[type] = f;
    }
  }

  // Arc multiplicities of labeled transitions are read directly from the log.
  for (const Arc& arc : net.arcs()) {
    ArcAnnotation a;
    if (!net.is_silent(arc.transition)) {
      const auto activity = log.find_activity(*net.label(arc.transition));
      const auto type = log.find_type(ocpn.place_type(arc.place));
      if (activity && type) {
        for (const Event& e : log.events()) {
          if (e.activity != *activity) continue;
          const std::size_t k = e.count_of(*type);
          if (k == 0) continue;
          if (a.occurrences == 0 || k < a.min_multiplicity) a.min_multiplicity = k;
          a.max_multiplicity = std::max(a.max_multiplicity, k);
          ++a.occurrences;
          a.tokens += k;
        }
      }
    }
    ann.arcs[arc] = a;
  }

  // Replay per type.
  const auto types = ocpn.object_types();
  std::vector<std::string> replayed;
  for (const auto& type : types) {
    if (log.find_type(type)) replayed.push_back(type);
  }
  std::vector<TypeProjection> projections(replayed.size());
  std::vector<ReplayResult> results(replayed.size());
  parallel_for(replayed.size(), options.jobs, [&](std::size_t i) {
    projections[i] = project_type(model, replayed[i]);
    const FlattenedEventLog flat = flatten(log, replayed[i]);
    results[i] = token_replay(flat, projections[i].apn);
  });

  std::map<Arc, std::vector<double>> arc_durations;
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    const auto& proj = projections[i];
    const auto& res = results[i];
    for (PlaceId lp = 0; lp < proj.places.size(); ++lp) ann.places[proj.places[lp]] = res.places[lp];
    for (TransitionId lt = 0; lt < proj.transitions.size(); ++lt) {
      const TransitionId t = proj.transitions[lt];
      if (!net.is_silent(t)) continue;
      for (PlaceId p : net.inputs(t)) {
        auto& a = ann.arcs[{p, t, true}];
        a.occurrences = a.tokens = res.firings[lt];
      }
      for (PlaceId p : net.outputs(t)) {
        auto& a = ann.arcs[{p, t, false}];
        a.occurrences = a.tokens = res.firings[lt];
      }
    }
    for (const TokenRecord& token : res.tokens) {
      if (!token.consumed) continue;
      const double seconds = to_seconds(*token.consumed - token.produced);
      const PlaceId p = proj.places[token.place];
      if (token.consumer) arc_durations[{p, proj.transitions[*token.consumer], true}].push_back(seconds);
      if (token.producer) arc_durations[{p, proj.transitions[*token.producer], false}].push_back(seconds);
    }
  }
  for (auto& [arc, a] : ann.arcs) {
    if (a.occurrences > 0) {
      a.mean_multiplicity = static_cast<double>(a.tokens) / static_cast<double>(a.occurrences);
      if (net.is_silent(arc.transition)) a.min_multiplicity = a.max_multiplicity = 1;
    }
    auto it = arc_durations.find(arc);
    if (it != arc_durations.end()) a.duration = DurationStats::of(std::move(it->second));
  }
  return {model, std::move(ann)};
}

FailureStats failure_stats(const ObjectCentricEventLog& log, std::string_view activity) {
  const ActivityId a = log.activity_id(activity);
  FailureStats out;
  out.activity = std::string(activity);
  std::map<std::string, std::map<ObjectId, std::size_t>> involvement;
  for (const Event& e : log.events()) {
    if (e.activity != a) continue;
    ++out.events;
    for (const auto& refs : e.omap) {
      auto& counts = involvement[log.type_name(refs.type)];
      for (ObjectId o : refs.objects) ++counts[o];
    }
  }
  for (const auto& [type, counts] : involvement) {
    FailureStats::PerType row{type, counts.size(), 0};
    for (const auto& [o, n] : counts) row.at_least_twice += n >= 2 ? 1 : 0;
    out.types.push_back(std::move(row));
  }
  return out;
}

std::vector<TypeConformance> conformance(const ObjectCentricEventLog& log, const AcceptingOCPN& model,
                                         std::size_t jobs, std::size_t max_states) {
  std::vector<std::string> types;
  for (const auto& type : model.ocpn.object_types()) {
    if (log.find_type(type)) types.push_back(type);
  }
  std::vector<TypeConformance> out(types.size());
  parallel_for(types.size(), jobs, [&](std::size_t i) {
    const TypeProjection proj = project_type(model, types[i]);
    const FlattenedEventLog flat = flatten(log, types[i]);
    const TraceLog traces = to_trace_log(flat);
    ReplayOptions options;
    options.record_tokens = false;
    const ReplayResult replay = token_replay(flat, proj.apn, options);
    out[i].type = types[i];
    out[i].cases = traces.total();
    for (const auto& [trace, n] : traces.variants()) {
      try {
        if (trace_accepted(proj.apn, trace, max_states)) out[i].accepted += n;
      } catch (const ExplorationLimitError&) {
        out[i].undetermined += n;
      }
    }
    const std::size_t decided = out[i].cases - out[i].undetermined;
    out[i].trace_fraction = decided ? static_cast<double>(out[i].accepted) / static_cast<double>(decided) : 0.0;
    out[i].token_fitness = replay.fitness();
  });
  return out;
}

}  // namespace ocpn
