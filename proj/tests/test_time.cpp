#include <doctest.h>

#include "ocpn/time.hpp"

using namespace ocpn;

TEST_CASE("timestamp formats") {
  const Timestamp t = make_timestamp(2019, 5, 20, 9, 7, 47);
  CHECK(parse_timestamp("2019-05-20 09:07:47") == t);
  CHECK(parse_timestamp("2019-05-20T09:07:47") == t);
  CHECK(parse_timestamp("2019-05-20T09:07:47Z") == t);
  CHECK(parse_timestamp("2019-05-20T11:07:47+02:00") == t);
  CHECK(parse_timestamp("20-05-2019:09.07") == make_timestamp(2019, 5, 20, 9, 7));
  CHECK(parse_timestamp("2019-05-20 09:07:47.250") == t + std::chrono::milliseconds(250));
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK_FALSE(parse_timestamp("2019-13-01 00:00:00"));
  CHECK_FALSE(parse_timestamp("2019-05-20 09:07:47", TimestampFormat::day_first));
}

TEST_CASE("formatting round trips") {
  const Timestamp t = make_timestamp(2020, 2, 29, 23, 59, 58, 5);
  CHECK(format_timestamp(t) == "2020-02-29 23:59:58.005");
  CHECK(format_timestamp(make_timestamp(2020, 2, 29)) == "2020-02-29 00:00:00");
  CHECK(parse_timestamp(format_timestamp(t)) == t);
  CHECK(parse_timestamp(format_timestamp_iso(t)) == t);
}

TEST_CASE("durations") {
  CHECK(to_seconds(std::chrono::minutes(2)) == 120.0);
  CHECK(humanize_seconds(4.2) == "4.2s");
  CHECK(humanize_seconds(3 * 86400 + 4 * 3600) == "3d 4h");
}
