// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#include "ocpn/time.hpp"

#include <cmath>
#include <cstdio>

namespace ocpn {
namespace {

using namespace std::chrono;

class Cursor {
public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ == s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  // Reads between min_digits and max_digits decimal digits.
  std::optional<unsigned> number(int min_digits, int max_digits) {
    unsigned value = 0;
    int n = 0;
    while (!done() && n < max_digits && s_[pos_] >= '0' && s_[pos_] <= '9') {
      value = value * 10 + static_cast<unsigned>(s_[pos_] - '0');
      ++pos_;
      ++n;
    }
    if (n < min_digits) return std::nullopt;
    return value;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::optional<Timestamp> build(int y, unsigned mo, unsigned d, unsigned h, unsigned mi, unsigned s,
                               unsigned ms, minutes offset = minutes{0}) {
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60 || ms > 999) return std::nullopt;
  return Timestamp{sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms} - offset};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<Timestamp> parse_iso(std::string_view text) {
  Cursor c{text};
  auto y = c.number(4, 4);
  if (!y || !c.consume('-')) return std::nullopt;
  auto mo = c.number(1, 2);
  if (!mo || !c.consume('-')) return std::nullopt;
  auto d = c.number(1, 2);
  if (!d) return std::nullopt;
  if (c.done()) return build(static_cast<int>(*y), *mo, *d, 0, 0, 0, 0);
  if (!c.consume('T') && !c.consume(' ')) return std::nullopt;
  auto h = c.number(1, 2);
  if (!h || !c.consume(':')) return std::nullopt;
  auto mi = c.number(1, 2);
  if (!mi) return std::nullopt;
  unsigned s = 0;
  unsigned ms = 0;
  if (c.consume(':')) {
    auto sec = c.number(1, 2);
    if (!sec) return std::nullopt;
    s = *sec;
    if (c.consume('.')) {
      // Keep millisecond precision, drop finer digits.
      unsigned scale = 100;
      int digits = 0;
      while (!c.done() && c.peek() >= '0' && c.peek() <= '9') {
        if (digits < 3) ms += scale * static_cast<unsigned>(c.peek() - '0');
        scale /= 10;
        ++digits;
        c.consume(c.peek());
      }
      if (digits == 0) return std::nullopt;
    }
  }
  minutes offset{0};
  if (c.consume('Z')) {
  } else if (c.peek() == '+' || c.peek() == '-') {
    const bool negative = c.peek() == '-';
    c.consume(c.peek());
    auto oh = c.number(2, 2);
    if (!oh) return std::nullopt;
    c.consume(':');
    auto om = c.number(2, 2);
    if (!om) return std::nullopt;
    offset = hours{*oh} + minutes{*om};
    if (negative) offset = -offset;
  }
  if (!c.done()) return std::nullopt;
  return build(static_cast<int>(*y), *mo, *d, *h, *mi, s, ms, offset);
}

std::optional<Timestamp> parse_day_first(std::string_view text) {
  Cursor c{text};
  auto d = c.number(1, 2);
  if (!d || !c.consume('-')) return std::nullopt;
  auto mo = c.number(1, 2);
  if (!mo || !c.consume('-')) return std::nullopt;
  auto y = c.number(4, 4);
  if (!y) return std::nullopt;
  if (c.done()) return build(static_cast<int>(*y), *mo, *d, 0, 0, 0, 0);
  if (!c.consume(':') && !c.consume(' ')) return std::nullopt;
  // Hour fields with a leading zero too many ("010.25") show up in hand-typed data.
  auto h = c.number(1, 3);
  if (!h || !(c.consume('.') || c.consume(':'))) return std::nullopt;
  auto mi = c.number(1, 2);
  if (!mi) return std::nullopt;
  unsigned s = 0;
  if (c.consume('.') || c.consume(':')) {
    auto sec = c.number(1, 2);
    if (!sec) return std::nullopt;
    s = *sec;
  }
  if (!c.done()) return std::nullopt;
  return build(static_cast<int>(*y), *mo, *d, *h, *mi, s, 0);
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text, TimestampFormat format) {
  text = trim(text);
  switch (format) {
    case TimestampFormat::iso:
      return parse_iso(text);
    case TimestampFormat::day_first:
      return parse_day_first(text);
    case TimestampFormat::automatic:
      if (auto t = parse_iso(text)) return t;
      return parse_day_first(text);
  }
  return std::nullopt;
}

namespace {

struct Fields {
  int y;
  unsigned mo, d, h, mi, s, ms;
};

Fields split(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  return {static_cast<int>(ymd.year()),
          static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()),
          static_cast<unsigned>(tod.hours().count()),
          static_cast<unsigned>(tod.minutes().count()),
          static_cast<unsigned>(tod.seconds().count()),
          static_cast<unsigned>(tod.subseconds().count())};
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  const Fields f = split(t);
  char buf[40];
  if (f.ms == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u:%02u", f.y, f.mo, f.d, f.h, f.mi, f.s);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u:%02u.%03u", f.y, f.mo, f.d, f.h, f.mi,
                  f.s, f.ms);
  }
  return buf;
}

std::string format_timestamp_iso(Timestamp t) {
  const Fields f = split(t);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02u.%03uZ", f.y, f.mo, f.d, f.h, f.mi,
                f.s, f.ms);
  return buf;
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour, unsigned minute,
                         unsigned second, unsigned millis) {
  return Timestamp{sys_days{year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                           std::chrono::day{day}}} +
                   hours{hour} + minutes{minute} + seconds{second} + milliseconds{millis}};
}

std::string humanize_seconds(double seconds) {
  char buf[64];
  const double a = std::fabs(seconds);
  const char* sign = seconds < 0 ? "-" : "";
  if (a >= 86400.0) {
    const auto d = static_cast<long long>(a / 86400.0);
    const auto h = static_cast<long long>(std::fmod(a, 86400.0) / 3600.0);
    std::snprintf(buf, sizeof buf, "%s%lldd %lldh", sign, d, h);
  } else if (a >= 3600.0) {
    const auto h = static_cast<long long>(a / 3600.0);
    const auto m = static_cast<long long>(std::fmod(a, 3600.0) / 60.0);
    std::snprintf(buf, sizeof buf, "%s%lldh %lldm", sign, h, m);
  } else if (a >= 60.0) {
    const auto m = static_cast<long long>(a / 60.0);
    const auto s = static_cast<long long>(std::fmod(a, 60.0));
    std::snprintf(buf, sizeof buf, "%s%lldm %llds", sign, m, s);
  } else {
    std::snprintf(buf, sizeof buf, "%s%.1fs", sign, a);
  }
  return buf;
}

}  // namespace ocpn
