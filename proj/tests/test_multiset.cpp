#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include "ocpn/multiset.hpp"

using ocpn::Multiset;
using MS = Multiset<std::string>;

TEST_CASE("multiset sum, difference and inclusion") {
  const MS ab{"a", "b"};
  const MS bc{"b", "c"};
  const MS ab2c{"a", "b", "b", "c"};
  CHECK(ab + bc == ab2c);
  CHECK(ab2c - bc == ab);
  CHECK(ab <= ab2c);
  CHECK_FALSE(ab2c <= ab);
}

TEST_CASE("difference saturates at zero") {
  const MS a{"a"};
  const MS aab{"a", "a", "b"};
  CHECK((a - aab).empty());
  CHECK((aab - a) == MS{"a", "b"});
}

TEST_CASE("counts, size and printing") {
  MS m;
  m.add("x", 3);
  m.add("y");
  CHECK(m.count("x") == 3);
  CHECK(m.count("z") == 0);
  CHECK(m.size() == 4);
  CHECK(m.distinct() == 2);
  CHECK(m.remove("x", 5) == 3);
  CHECK_FALSE(m.contains("x"));
  std::ostringstream os;
  os << MS{"a", "b", "b"};
  CHECK(os.str() == "[a, b^2]");
}

TEST_CASE("algebraic laws on random multisets") {
  std::mt19937_64 rng(11);
  auto random_ms = [&] {
    MS m;
    std::uniform_int_distribution<int> n(0, 6), e(0, 3);
    for (int i = n(rng); i > 0; --i) m.add(std::string(1, static_cast<char>('a' + e(rng))));
    return m;
  };
  for (int i = 0; i < 500; ++i) {
    const MS x = random_ms(), y = random_ms(), z = random_ms();
    CHECK(x + y == y + x);
    CHECK((x + y) + z == x + (y + z));
    CHECK((x + y) - y == x);
    CHECK(x <= x + y);
    CHECK((x - y) <= x);
    CHECK((x + y).size() == x.size() + y.size());
    if (x == y) CHECK(x.hash() == y.hash());
  }
}
