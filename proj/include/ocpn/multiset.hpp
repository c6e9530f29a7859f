// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <ostream>
#include <utility>

namespace ocpn {

/// Finite multiset (bag) with an ordered, canonical representation: two
/// multisets with the same elements and multiplicities compare equal and
/// iterate in the same order. Elements with multiplicity zero are never stored.
template <class T, class Compare = std::less<T>>
class Multiset {
public:
  using Storage = std::map<T, std::size_t, Compare>;
  using const_iterator = typename Storage::const_iterator;

  Multiset() = default;
  Multiset(std::initializer_list<T> elements) {
    for (const auto& e : elements) add(e);
  }

  void add(const T& element, std::size_t times = 1) {
    if (times == 0) return;
    items_[element] += times;
    size_ += times;
  }

  /// Removes up to `times` copies; returns how many were actually removed.
  std::size_t remove(const T& element, std::size_t times = 1) {
    auto it = items_.find(element);
    if (it == items_.end() || times == 0) return 0;
    const std::size_t removed = std::min(times, it->second);
    it->second -= removed;
    size_ -= removed;
    if (it->second == 0) items_.erase(it);
    return removed;
  }

  std::size_t count(const T& element) const {
    auto it = items_.find(element);
    return it == items_.end() ? 0 : it->second;
  }

  bool contains(const T& element) const { return items_.count(element) != 0; }

  /// Total number of elements, counting multiplicities.
  std::size_t size() const noexcept { return size_; }
  /// Number of distinct elements (size of the support).
  std::size_t distinct() const noexcept { return items_.size(); }
  bool empty() const noexcept { return size_ == 0; }

  const_iterator begin() const noexcept { return items_.begin(); }
  const_iterator end() const noexcept { return items_.end(); }

  Multiset& operator+=(const Multiset& other) {
    for (const auto& [e, n] : other.items_) add(e, n);
    return *this;
  }

  /// Saturating difference: multiplicities never drop below zero.
  Multiset& operator-=(const Multiset& other) {
    for (const auto& [e, n] : other.items_) remove(e, n);
    return *this;
  }

  friend Multiset operator+(Multiset lhs, const Multiset& rhs) { return lhs += rhs; }
  friend Multiset operator-(Multiset lhs, const Multiset& rhs) { return lhs -= rhs; }

  /// Inclusion: every element of `*this` occurs at least as often in `other`.
  bool included_in(const Multiset& other) const {
    if (size_ > other.size_) return false;
    for (const auto& [e, n] : items_) {
      if (other.count(e) < n) return false;
    }
    return true;
  }

  friend bool operator<=(const Multiset& lhs, const Multiset& rhs) { return lhs.included_in(rhs); }
  friend bool operator==(const Multiset& lhs, const Multiset& rhs) {
    return lhs.size_ == rhs.size_ && lhs.items_ == rhs.items_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto& [e, n] : items_) {
      h ^= std::hash<T>{}(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= n + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

private:
  Storage items_;
  std::size_t size_ = 0;
};

/// Prints `[a, b^2, c]`.
template <class T, class C>
std::ostream& operator<<(std::ostream& os, const Multiset<T, C>& m) {
  os << '[';
  bool first = true;
  for (const auto& [e, n] : m) {
    if (!first) os << ", ";
    first = false;
    os << e;
    if (n > 1) os << '^' << n;
  }
  return os << ']';
}

}  // namespace ocpn
