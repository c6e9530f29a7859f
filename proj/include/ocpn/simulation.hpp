// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ocpn/event_log.hpp"
#include "ocpn/ocpn.hpp"
#include "ocpn/time.hpp"

namespace ocpn {

/// Fixed parent/child partition, e.g. the items of each order. Either give
/// one size per parent or a [min_size, max_size] range; with a range the
/// sizes are drawn so that they add up to the child count exactly.
struct GroupSpec {
  std::string parent_type;
  std::string child_type;
  std::vector<std::size_t> sizes;
  std::size_t min_size = 1;
  std::size_t max_size = 1;
};

/// Batches formed while simulating, e.g. routes or packages. When a batch
/// object first fires, it takes `sizes[i]` member objects that are ready at
/// the transition's input places and keeps them for its later firings.
struct BatchSpec {
  std::string batch_type;
  std::string member_type;
  std::vector<std::size_t> sizes;  ///< one per batch object, sums to the member count
};

/// Objects that do not flow through the net but are referenced alongside an
/// owner (products of an item, customer of an order).
struct AttachedSpec {
  std::string type;
  std::string owner_type;
  std::size_t pool = 1;  ///< number of distinct objects of `type`
  std::size_t min_per_owner = 1;
  std::size_t max_per_owner = 1;
};

struct ObjectPopulation {
  std::map<std::string, std::size_t> counts;
  std::vector<GroupSpec> groups;
  std::vector<BatchSpec> batches;
  std::vector<AttachedSpec> attached;
  /// Parent types added to every event that binds one of their children
  /// (an item event also references the item's order).
  std::set<std::string> include_parents;
  /// Relative transition weights by name; 1.0 when absent.
  std::map<std::string, double> weights;
};

struct SimulationOptions {
  Timestamp start = make_timestamp(2019, 5, 20, 9, 0, 0);
  Duration min_delay = std::chrono::minutes(1);
  Duration max_delay = std::chrono::hours(1);
};

/// Plays the token game with bindings chosen at random (seeded) and records
/// one event per labeled firing. Deterministic for a fixed seed. Throws
/// InvalidArgumentError for inconsistent populations and Error when the run
/// gets stuck before reaching the final marking.
ObjectCentricEventLog simulate_log(const AcceptingOCPN& model, const ObjectPopulation& population,
                                   std::uint64_t seed, const SimulationOptions& options = {});

/// Object ids follow "{type}-{n}" with n starting at 1.
std::string object_id(const std::string& type, std::size_t n);

// ---------------------------------------------------------------------------
// Presets

/// Orders, items and routes: place order, send invoice, send reminder (loop),
/// pay order, mark as completed; items are picked and delivered in routes.
/// Initial and final markings hold one token per object of `population`.
AcceptingOCPN order_item_route_model(const ObjectPopulation& population);
/// 100 orders with 5 items each, 10 routes of 50 items.
ObjectPopulation order_item_route_population();

/// Order management with orders, items and packages.
AcceptingOCPN order_management_model(const ObjectPopulation& population);
/// 2000 orders, 8159 items (1 to 15 per order), 1325 packages of 6 or 7
/// items, 20 products attached to items and 17 customers attached to orders.
ObjectPopulation order_management_population();
/// Activity to retained object types for the order-management log.
std::map<std::string, std::set<std::string>> order_management_retained_types();

/// Same shape with a different number of orders; items and packages scale
/// with it (about 11 events per order).
ObjectPopulation order_management_population(std::size_t orders);

/// Builds an accepting OCPN from per-type markings: every object listed in
/// `population.counts` gets a token in each of its type's `initial`/`final` places.
AcceptingOCPN with_population(ObjectCentricPetriNet net,
                              const std::map<std::string, std::vector<PlaceId>>& initial,
                              const std::map<std::string, std::vector<PlaceId>>& final,
                              const ObjectPopulation& population);

}  // namespace ocpn
