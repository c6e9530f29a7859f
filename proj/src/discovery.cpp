// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/discovery.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "ocpn/error.hpp"

namespace ocpn {

DirectlyFollowsGraph build_dfg(const TraceLog& log) {
  if (log.empty()) throw InvalidArgumentError("cannot build a directly-follows graph from an empty log");
  DirectlyFollowsGraph g;
  for (const auto& [trace, n] : log.variants()) {
    if (trace.empty()) continue;
    g.starts.add(trace.front(), n);
    g.ends.add(trace.back(), n);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      g.activities.insert(trace[i]);
      if (i + 1 < trace.size()) g.edges[{trace[i], trace[i + 1]}] += n;
    }
  }
  return g;
}

DirectlyFollowsGraph filter_dfg(const DirectlyFollowsGraph& dfg, double noise) {
  if (noise <= 0.0) return dfg;
  std::map<std::string, std::size_t> max_out;
  std::map<std::string, std::size_t> max_in;
  for (const auto& [edge, n] : dfg.edges) {
    max_out[edge.first] = std::max(max_out[edge.first], n);
    max_in[edge.second] = std::max(max_in[edge.second], n);
  }
  DirectlyFollowsGraph out = dfg;
  std::erase_if(out.edges, [&](const auto& entry) {
    const auto& [edge, n] = entry;
    const std::size_t out_best = max_out[edge.first];
    if (n == out_best || n == max_in[edge.second]) return false;
    return static_cast<double>(n) < noise * static_cast<double>(out_best);
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Kind = ProcessTree::Kind;

void write_tree(const ProcessTree& t, std::string& out) {
  switch (t.kind) {
    case Kind::activity:
      out += "'" + t.label + "'";
      return;
    case Kind::silent:
      out += "tau";
      return;
    case Kind::exclusive: out += "X( "; break;
    case Kind::sequence: out += "->( "; break;
    case Kind::parallel: out += "+( "; break;
    case Kind::loop: out += "*( "; break;
  }
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i) out += ", ";
    write_tree(t.children[i], out);
  }
  out += " )";
}

}  // namespace

std::string ProcessTree::to_string() const {
  std::string out;
  write_tree(*this, out);
  return out;
}

std::set<std::string> ProcessTree::alphabet() const {
  std::set<std::string> out;
  if (kind == Kind::activity) out.insert(label);
  for (const auto& c : children) out.merge(c.alphabet());
  return out;
}

std::size_t ProcessTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

namespace {

using Parts = std::vector<std::vector<std::string>>;

// Dense view of a directly-follows graph for cut detection.
struct Graph {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> w;
  std::vector<std::size_t> start;
  std::vector<std::size_t> end;

  explicit Graph(const DirectlyFollowsGraph& g)
      : names(g.activities.begin(), g.activities.end()),
        w(names.size(), std::vector<std::size_t>(names.size(), 0)),
        start(names.size(), 0),
        end(names.size(), 0) {
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
    for (const auto& [edge, n] : g.edges) w[index.at(edge.first)][index.at(edge.second)] = n;
    for (const auto& [a, n] : g.starts) start[index.at(a)] = n;
    for (const auto& [a, n] : g.ends) end[index.at(a)] = n;
  }

  std::size_t size() const { return names.size(); }

  Parts to_parts(const std::vector<std::vector<std::size_t>>& groups) const {
    Parts out;
    for (const auto& g : groups) {
      std::vector<std::string> part;
      for (std::size_t i : g) part.push_back(names[i]);
      std::sort(part.begin(), part.end());
      out.push_back(std::move(part));
    }
    return out;
  }
};

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Groups ordered by their smallest member.
  std::vector<std::vector<std::size_t>> groups() {
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < parent.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    return out;
  }
};

Parts exclusive_cut(const Graph& g) {
  UnionFind uf(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.w[i][j]) uf.unite(i, j);
    }
  }
  auto groups = uf.groups();
  if (groups.size() < 2) return {};
  return g.to_parts(groups);
}

std::vector<std::vector<bool>> reachability(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < n; ++y) {
        if (g.w[x][y] && !reach[s][y]) {
          reach[s][y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return reach;
}

Parts sequence_cut(const Graph& g) {
  const std::size_t n = g.size();
  const auto reach = reachability(g);
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (reach[i][j] == reach[j][i]) uf.unite(i, j);
    }
  }
  auto groups = uf.groups();
  if (groups.size() < 2) return {};
  // Every cross-part pair must be ordered one way only, consistently per part pair.
  auto before = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return reach[a.front()][b.front()];
  };
  for (std::size_t p = 0; p < groups.size(); ++p) {
    for (std::size_t q = p + 1; q < groups.size(); ++q) {
      const bool forward = before(groups[p], groups[q]);
      for (std::size_t x : groups[p]) {
        for (std::size_t y : groups[q]) {
          if (reach[x][y] != forward || reach[y][x] == forward) return {};
        }
      }
    }
  }
  std::sort(groups.begin(), groups.end(), before);
  return g.to_parts(groups);
}

Parts parallel_cut(const Graph& g) {
  const std::size_t n = g.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(g.w[i][j] && g.w[j][i])) uf.unite(i, j);
    }
  }
  auto groups = uf.groups();
  if (groups.size() < 2) return {};
  auto complete = [&](const std::vector<std::size_t>& grp) {
    bool s = false;
    bool e = false;
    for (std::size_t i : grp) {
      s = s || g.start[i] > 0;
      e = e || g.end[i] > 0;
    }
    return s && e;
  };
  std::vector<std::vector<std::size_t>> valid;
  std::vector<std::size_t> leftover;
  for (auto& grp : groups) {
    if (complete(grp)) {
      valid.push_back(std::move(grp));
    } else {
      leftover.insert(leftover.end(), grp.begin(), grp.end());
    }
  }
  if (valid.empty()) return {};
  valid.front().insert(valid.front().end(), leftover.begin(), leftover.end());
  if (valid.size() < 2) return {};
  return g.to_parts(valid);
}

Parts loop_cut(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<bool> in_do(n, false);
  bool any_start = false;
  for (std::size_t i = 0; i < n; ++i) {
    in_do[i] = g.start[i] > 0 || g.end[i] > 0;
    any_start = any_start || g.start[i] > 0;
  }
  if (!any_start) return {};

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.w[i][j] && !in_do[i] && !in_do[j]) uf.unite(i, j);
    }
  }
  std::vector<std::vector<std::size_t>> redo;
  for (auto& grp : uf.groups()) {
    if (!in_do[grp.front()]) redo.push_back(std::move(grp));
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = redo.begin(); it != redo.end();) {
      std::vector<bool> member(n, false);
      for (std::size_t i : *it) member[i] = true;
      bool merge = false;
      std::set<std::size_t> ends_in;
      std::set<std::size_t> starts_out;
      for (std::size_t x = 0; x < n && !merge; ++x) {
        if (!in_do[x]) continue;
        for (std::size_t c : *it) {
          if (g.w[x][c]) {
            if (g.end[x] == 0) merge = true;
            ends_in.insert(x);
          }
          if (g.w[c][x]) {
            if (g.start[x] == 0) merge = true;
            starts_out.insert(x);
          }
        }
      }
      if (!merge) {
        for (std::size_t x = 0; x < n; ++x) {
          if (!in_do[x]) continue;
          if (!ends_in.empty() && g.end[x] > 0 && !ends_in.count(x)) merge = true;
          if (!starts_out.empty() && g.start[x] > 0 && !starts_out.count(x)) merge = true;
        }
      }
      if (merge) {
        for (std::size_t i : *it) in_do[i] = true;
        it = redo.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  if (redo.empty()) return {};
  std::vector<std::vector<std::size_t>> groups;
  groups.emplace_back();
  for (std::size_t i = 0; i < n; ++i) {
    if (in_do[i]) groups.front().push_back(i);
  }
  for (auto& r : redo) groups.push_back(std::move(r));
  return g.to_parts(groups);
}

struct Cut {
  Kind kind = Kind::silent;
  Parts parts;
};

Cut find_cut(const DirectlyFollowsGraph& dfg) {
  const Graph g(dfg);
  if (auto p = exclusive_cut(g); !p.empty()) return {Kind::exclusive, std::move(p)};
  if (auto p = sequence_cut(g); !p.empty()) return {Kind::sequence, std::move(p)};
  if (auto p = parallel_cut(g); !p.empty()) return {Kind::parallel, std::move(p)};
  if (auto p = loop_cut(g); !p.empty()) return {Kind::loop, std::move(p)};
  return {};
}

ProcessTree flower(const std::set<std::string>& activities) {
  std::vector<ProcessTree> leaves;
  for (const auto& a : activities) leaves.push_back(ProcessTree::leaf(a));
  ProcessTree body = leaves.size() == 1 ? std::move(leaves.front())
                                        : ProcessTree::node(Kind::exclusive, std::move(leaves));
  return ProcessTree::node(Kind::loop, {ProcessTree::tau(), std::move(body)});
}

ProcessTree optional_tree(ProcessTree t) {
  return ProcessTree::node(Kind::exclusive, {std::move(t), ProcessTree::tau()});
}

// ---------------------------------------------------------------------------
// Graph-only recursion

std::size_t part_of(const Parts& parts, const std::string& a) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (std::binary_search(parts[i].begin(), parts[i].end(), a)) return i;
  }
  return parts.size();
}

ProcessTree mine_dfg(const DirectlyFollowsGraph& dfg) {
  if (dfg.activities.empty()) return ProcessTree::tau();
  if (dfg.activities.size() == 1) {
    const std::string& a = *dfg.activities.begin();
    ProcessTree leaf = ProcessTree::leaf(a);
    if (dfg.edges.count({a, a})) return ProcessTree::node(Kind::loop, {std::move(leaf), ProcessTree::tau()});
    return leaf;
  }
  Cut cut = find_cut(dfg);
  if (cut.parts.empty()) return flower(dfg.activities);

  std::vector<DirectlyFollowsGraph> subs(cut.parts.size());
  std::vector<std::size_t> owner;
  auto owner_of = [&](const std::string& a) { return part_of(cut.parts, a); };
  for (std::size_t i = 0; i < cut.parts.size(); ++i) {
    subs[i].activities.insert(cut.parts[i].begin(), cut.parts[i].end());
  }
  for (const auto& [a, n] : dfg.starts) subs[owner_of(a)].starts.add(a, n);
  for (const auto& [a, n] : dfg.ends) subs[owner_of(a)].ends.add(a, n);
  std::vector<bool> skippable(cut.parts.size(), false);
  for (const auto& [edge, n] : dfg.edges) {
    const std::size_t from = owner_of(edge.first);
    const std::size_t to = owner_of(edge.second);
    if (from == to) {
      subs[from].edges[edge] += n;
      continue;
    }
    if (cut.kind == Kind::sequence) {
      subs[to].starts.add(edge.second, n);
      subs[from].ends.add(edge.first, n);
      for (std::size_t k = from + 1; k < to; ++k) skippable[k] = true;
    } else if (cut.kind == Kind::loop) {
      subs[to].starts.add(edge.second, n);
      subs[from].ends.add(edge.first, n);
    }
  }
  if (cut.kind == Kind::sequence) {
    for (const auto& [a, n] : dfg.starts) {
      for (std::size_t k = 0; k < owner_of(a); ++k) skippable[k] = true;
    }
    for (const auto& [a, n] : dfg.ends) {
      for (std::size_t k = owner_of(a) + 1; k < cut.parts.size(); ++k) skippable[k] = true;
    }
  }
  std::vector<ProcessTree> children;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    ProcessTree child = mine_dfg(subs[i]);
    children.push_back(skippable[i] ? optional_tree(std::move(child)) : std::move(child));
  }
  if (cut.kind == Kind::loop && children.size() > 2) {
    std::vector<ProcessTree> redo(std::make_move_iterator(children.begin() + 1),
                                  std::make_move_iterator(children.end()));
    children.resize(1);
    children.push_back(ProcessTree::node(Kind::exclusive, std::move(redo)));
  }
  return ProcessTree::node(cut.kind, std::move(children));
}

// ---------------------------------------------------------------------------
// Log-splitting recursion

Trace project(const Trace& t, const std::vector<std::string>& part) {
  Trace out;
  for (const auto& a : t) {
    if (std::binary_search(part.begin(), part.end(), a)) out.push_back(a);
  }
  return out;
}

ProcessTree mine_log(const TraceLog& log, double noise);

std::vector<TraceLog> split_log(const TraceLog& log, const Cut& cut) {
  const std::size_t k = cut.parts.size();
  std::vector<TraceLog> subs(k);
  auto owner_of = [&](const std::string& a) { return part_of(cut.parts, a); };
  for (const auto& [trace, n] : log.variants()) {
    switch (cut.kind) {
      case Kind::exclusive: {
        std::vector<std::size_t> hits(k, 0);
        for (const auto& a : trace) ++hits[owner_of(a)];
        const std::size_t best =
            static_cast<std::size_t>(std::max_element(hits.begin(), hits.end()) - hits.begin());
        subs[best].add(project(trace, cut.parts[best]), n);
        break;
      }
      case Kind::sequence:
      case Kind::parallel:
        for (std::size_t i = 0; i < k; ++i) subs[i].add(project(trace, cut.parts[i]), n);
        break;
      case Kind::loop: {
        // Alternate do / redo segments; a trace always starts and ends with a do segment.
        Trace segment;
        bool in_redo = false;
        auto flush_redo = [&]() {
          std::vector<std::size_t> hits(k, 0);
          for (const auto& a : segment) ++hits[owner_of(a)];
          const std::size_t best = static_cast<std::size_t>(
              std::max_element(hits.begin() + 1, hits.end()) - hits.begin());
          subs[best].add(project(segment, cut.parts[best]), n);
        };
        for (const auto& a : trace) {
          const bool redo_activity = owner_of(a) != 0;
          if (redo_activity != in_redo) {
            if (in_redo) {
              flush_redo();
            } else {
              subs[0].add(segment, n);
            }
            segment.clear();
            in_redo = redo_activity;
          }
          segment.push_back(a);
        }
        if (in_redo) {
          flush_redo();
          segment.clear();
        }
        subs[0].add(segment, n);
        break;
      }
      default:
        break;
    }
  }
  return subs;
}

// Splits every trace where `cut_here(prev, next)` holds. Returns an empty log
// if no trace was split.
TraceLog split_traces(const TraceLog& log,
                      const std::function<bool(const std::string&, const std::string&)>& cut_here) {
  TraceLog out;
  bool split = false;
  for (const auto& [trace, n] : log.variants()) {
    Trace part;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i > 0 && cut_here(trace[i - 1], trace[i])) {
        out.add(part, n);
        part.clear();
        split = true;
      }
      part.push_back(trace[i]);
    }
    out.add(part, n);
  }
  return split ? out : TraceLog{};
}

ProcessTree mine_log(const TraceLog& log, double noise) {
  if (log.empty()) return ProcessTree::tau();
  TraceLog nonempty;
  std::size_t empty_count = 0;
  std::set<std::string> alphabet;
  for (const auto& [trace, n] : log.variants()) {
    if (trace.empty()) {
      empty_count += n;
    } else {
      nonempty.add(trace, n);
      alphabet.insert(trace.begin(), trace.end());
    }
  }
  if (nonempty.empty()) return ProcessTree::tau();
  if (empty_count > 0 &&
      static_cast<double>(empty_count) > noise * static_cast<double>(log.total())) {
    return optional_tree(mine_log(nonempty, noise));
  }

  if (alphabet.size() == 1) {
    ProcessTree leaf = ProcessTree::leaf(*alphabet.begin());
    for (const auto& [trace, n] : nonempty.variants()) {
      if (trace.size() > 1) return ProcessTree::node(Kind::loop, {std::move(leaf), ProcessTree::tau()});
    }
    return leaf;
  }

  const DirectlyFollowsGraph full = build_dfg(nonempty);
  Cut cut = find_cut(filter_dfg(full, noise));
  if (!cut.parts.empty()) {
    std::vector<ProcessTree> children;
    for (const auto& sub : split_log(nonempty, cut)) children.push_back(mine_log(sub, noise));
    if (cut.kind == Kind::loop && children.size() > 2) {
      std::vector<ProcessTree> redo(std::make_move_iterator(children.begin() + 1),
                                    std::make_move_iterator(children.end()));
      children.resize(1);
      children.push_back(ProcessTree::node(Kind::exclusive, std::move(redo)));
    }
    return ProcessTree::node(cut.kind, std::move(children));
  }

  // Fall-throughs, most specific first.
  for (const auto& a : alphabet) {
    bool once = true;
    for (const auto& [trace, n] : nonempty.variants()) {
      if (std::count(trace.begin(), trace.end(), a) != 1) {
        once = false;
        break;
      }
    }
    if (!once) continue;
    Cut split{Kind::parallel, {{a}, {}}};
    for (const auto& b : alphabet) {
      if (b != a) split.parts[1].push_back(b);
    }
    std::vector<ProcessTree> children;
    for (const auto& sub : split_log(nonempty, split)) children.push_back(mine_log(sub, noise));
    return ProcessTree::node(Kind::parallel, std::move(children));
  }
  TraceLog strict = split_traces(nonempty, [&](const std::string& prev, const std::string& next) {
    return full.ends.contains(prev) && full.starts.contains(next);
  });
  if (!strict.empty()) {
    return ProcessTree::node(Kind::loop, {mine_log(strict, noise), ProcessTree::tau()});
  }
  TraceLog loose = split_traces(nonempty, [&](const std::string&, const std::string& next) {
    return full.starts.contains(next);
  });
  if (!loose.empty()) {
    return ProcessTree::node(Kind::loop, {mine_log(loose, noise), ProcessTree::tau()});
  }
  return flower(alphabet);
}

// ---------------------------------------------------------------------------
// Tree to net

class NetBuilder {
public:
  explicit NetBuilder(std::string_view prefix) : prefix_(prefix) {}

  PlaceId place() { return apn_.net.add_place(prefix_ + ":" + std::to_string(++places_)); }

  TransitionId silent() {
    return apn_.net.add_transition(prefix_ + ":tau" + std::to_string(++silents_), std::nullopt);
  }

  TransitionId visible(const std::string& label) {
    if (apn_.net.find_transition(label)) {
      throw InvalidArgumentError("activity '" + label + "' occurs twice in the process tree");
    }
    if (apn_.net.find_place(label)) {
      throw InvalidArgumentError("activity '" + label + "' clashes with a generated place name");
    }
    return apn_.net.add_transition(label, label);
  }

  void connect(PlaceId in, TransitionId t, PlaceId out) {
    apn_.net.add_input(in, t);
    apn_.net.add_output(t, out);
  }

  void build(const ProcessTree& node, PlaceId in, PlaceId out) {
    switch (node.kind) {
      case Kind::activity:
        connect(in, visible(node.label), out);
        return;
      case Kind::silent:
        connect(in, silent(), out);
        return;
      case Kind::exclusive:
        for (const auto& c : node.children) build(c, in, out);
        return;
      case Kind::sequence: {
        PlaceId current = in;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          const PlaceId next = i + 1 == node.children.size() ? out : place();
          build(node.children[i], current, next);
          current = next;
        }
        return;
      }
      case Kind::parallel: {
        const TransitionId split = silent();
        const TransitionId join = silent();
        apn_.net.add_input(in, split);
        apn_.net.add_output(join, out);
        for (const auto& c : node.children) {
          const PlaceId a = place();
          const PlaceId b = place();
          apn_.net.add_output(split, a);
          build(c, a, b);
          apn_.net.add_input(b, join);
        }
        return;
      }
      case Kind::loop: {
        const PlaceId head = place();
        const PlaceId tail = place();
        connect(in, silent(), head);
        build(node.children.front(), head, tail);
        for (std::size_t i = 1; i < node.children.size(); ++i) build(node.children[i], tail, head);
        connect(tail, silent(), out);
        return;
      }
    }
  }

  AcceptingPetriNet finish(const ProcessTree& tree) {
    const PlaceId source = place();
    const PlaceId sink = place();
    build(tree, source, sink);
    apn_.initial.add(source);
    apn_.final.add(sink);
    return std::move(apn_);
  }

private:
  std::string prefix_;
  AcceptingPetriNet apn_;
  std::size_t places_ = 0;
  std::size_t silents_ = 0;
};

}  // namespace

ProcessTree discover_process_tree(const DirectlyFollowsGraph& dfg) { return mine_dfg(dfg); }

ProcessTree discover_process_tree(const TraceLog& log, double noise) {
  if (log.empty()) throw InvalidArgumentError("cannot discover a process tree from an empty log");
  return mine_log(log, noise);
}

AcceptingPetriNet tree_to_accepting_net(const ProcessTree& tree, std::string_view prefix) {
  return NetBuilder(prefix).finish(tree);
}

AcceptingPetriNet discover_accepting_net(const TraceLog& log, double noise, std::string_view prefix) {
  return tree_to_accepting_net(discover_process_tree(log, noise), prefix);
}

}  // namespace ocpn
