// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ocpn {

/// UTC instant with millisecond precision.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

enum class TimestampFormat {
  /// Try ISO-8601, then "YYYY-MM-DD HH:MM:SS", then "DD-MM-YYYY:HH.MM".
  automatic,
  /// "YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM]" or with a space instead of 'T'.
  iso,
  /// "DD-MM-YYYY:HH.MM" as used by hand-written fragment tables.
  day_first,
};

std::optional<Timestamp> parse_timestamp(std::string_view text,
                                         TimestampFormat format = TimestampFormat::automatic);

/// "YYYY-MM-DD HH:MM:SS", with ".mmm" appended only when milliseconds are non-zero.
std::string format_timestamp(Timestamp t);

/// ISO-8601 with 'T' separator and 'Z' suffix; used by the JSON formats.
std::string format_timestamp_iso(Timestamp t);

/// Builds a timestamp from calendar fields (UTC).
Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour = 0,
                         unsigned minute = 0, unsigned second = 0, unsigned millis = 0);

inline double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

/// "3d 4h", "2h 5m", "12m 3s", "4.2s".
std::string humanize_seconds(double seconds);

}  // namespace ocpn
