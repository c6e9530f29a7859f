#include <doctest.h>

#include <random>

#include "ocpn/discovery.hpp"
#include "support.hpp"

using namespace ocpn;
using ocpn::testing::random_tree;
using ocpn::testing::sample_trace;

namespace {

Trace tr(std::initializer_list<const char*> xs) { return Trace(xs.begin(), xs.end()); }

}  // namespace

TEST_CASE("directly-follows graph") {
  TraceLog log;
  log.add(tr({"a", "b", "c"}), 3);
  log.add(tr({"a", "c"}));
  const auto dfg = build_dfg(log);
  CHECK(dfg.activities == std::set<std::string>{"a", "b", "c"});
  CHECK(dfg.edges.at({"a", "b"}) == 3);
  CHECK(dfg.edges.at({"a", "c"}) == 1);
  CHECK(dfg.starts.count("a") == 4);
  CHECK(dfg.ends.count("c") == 4);
}

TEST_CASE("noise filtering drops infrequent edges") {
  TraceLog log;
  log.add(tr({"a", "b", "c"}), 50);
  log.add(tr({"a", "c", "b"}), 1);
  const auto dfg = build_dfg(log);
  CHECK(filter_dfg(dfg, 0.0) == dfg);
  const auto filtered = filter_dfg(dfg, 0.2);
  CHECK(filtered.edges.count({"a", "c"}) == 0);
  CHECK(filtered.edges.count({"a", "b"}) == 1);
}

TEST_CASE("simple operators are recovered") {
  TraceLog seq;
  seq.add(tr({"a", "b", "c"}));
  CHECK(discover_process_tree(seq).to_string() == "->( 'a', 'b', 'c' )");

  TraceLog xorlog;
  xorlog.add(tr({"a"}));
  xorlog.add(tr({"b"}));
  CHECK(discover_process_tree(xorlog).to_string() == "X( 'a', 'b' )");

  TraceLog par;
  par.add(tr({"a", "b"}));
  par.add(tr({"b", "a"}));
  CHECK(discover_process_tree(par).to_string() == "+( 'a', 'b' )");

  TraceLog loop;
  loop.add(tr({"a"}));
  loop.add(tr({"a", "b", "a"}));
  CHECK(discover_process_tree(loop).to_string() == "*( 'a', 'b' )");
}

TEST_CASE("discovered nets accept their log") {
  TraceLog log;
  log.add(tr({"po", "pi", "sh", "in", "pa", "co"}));
  log.add(tr({"po", "in", "sr", "pi", "pa", "sh", "co"}));
  log.add(tr({"po", "in", "pi", "sr", "sr", "sh", "pa", "co"}));
  const auto apn = discover_accepting_net(log);
  for (const auto& [t, n] : log.variants()) CHECK(trace_accepted(apn, t));
  CHECK(conformance_fraction(log, apn) == 1.0);
}

TEST_CASE("tree translation") {
  const auto tree = ProcessTree::node(ProcessTree::Kind::sequence,
                                      {ProcessTree::leaf("a"), ProcessTree::tau(), ProcessTree::leaf("b")});
  CHECK(tree.depth() == 1);
  CHECK(tree.alphabet() == std::set<std::string>{"a", "b"});
  const auto apn = tree_to_accepting_net(tree);
  CHECK(trace_accepted(apn, tr({"a", "b"})));
  CHECK_FALSE(trace_accepted(apn, tr({"b", "a"})));
  CHECK_FALSE(trace_accepted(apn, tr({"a"})));
}

TEST_CASE("fitness on logs sampled from random trees") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 100; ++round) {
    int next = 0;
    const auto tree = random_tree(rng, 3, next);
    TraceLog log;
    for (int i = 0; i < 30; ++i) log.add(sample_trace(tree, rng));
    const auto apn = discover_accepting_net(log);
    INFO(tree.to_string());
    for (const auto& [t, n] : log.variants()) CHECK(trace_accepted(apn, t));
  }
}
