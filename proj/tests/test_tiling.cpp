#include "doctest.h"
#include "support.hpp"
#include "ufh/errors.hpp"
#include "ufh/tiling.hpp"

using namespace ufh;

TEST_CASE("greedy 1-tiling of Z on window 30 is 3Z") {
  Group z(GroupSpec::int_lattice(1));
  const auto t = greedy_tiling(z, 1, Window{30});
  std::vector<Element> expect;
  for (int x = -30; x <= 30; x += 3) expect.push_back(z.make({x}));
  CHECK(t.centers == FiniteSubset(expect));
  CHECK(t.packing_ok);
  CHECK(t.covering_ok_on_interior);
}

TEST_CASE("greedy tilings are packings and coverings") {
  for (const auto& g : ufh::testing::small_groups()) {
    for (std::int64_t r = 1; r <= 2; ++r) {
      const std::int64_t w = g.spec().family() == Family::Heisenberg3 ? 7 : 12;
      auto t = greedy_tiling(g, r, Window{w});
      // Independent pairwise and covering checks.
      for (const auto& a : t.centers)
        for (const auto& b : t.centers)
          if (a != b) CHECK(g.distance(a, b) > 2 * r);
      for (const auto& x : g.metric().ball_bfs(w - 2 * r)) {
        bool covered = false;
        for (const auto& c : t.centers) covered = covered || g.distance(x, c) <= 2 * r;
        CHECK(covered);
      }
      verify_tiling(t);
      CHECK(t.packing_ok);
      CHECK(t.covering_ok_on_interior);
    }
  }
}

TEST_CASE("tiling is stable under window growth") {
  Group z2(GroupSpec::int_lattice(2));
  const auto small = greedy_tiling(z2, 2, Window{10});
  const auto large = greedy_tiling(z2, 2, Window{16});
  std::vector<Element> restricted;
  for (const auto& c : large.centers)
    if (z2.word_length(c) <= 10) restricted.push_back(c);
  CHECK(small.centers == FiniteSubset(restricted));
}

TEST_CASE("tiles inside a set") {
  Group z(GroupSpec::int_lattice(1));
  const auto t = greedy_tiling(z, 1, Window{30});
  // Tiles [c-1, c+1] inside [-4, 4]: centers -3, 0, 3.
  const auto in = tiles_in(t, ball(z, 4));
  CHECK(in.tiles == FiniteSubset({z.make({-3}), z.make({0}), z.make({3})}));
  CHECK(in.exact);
  CHECK_FALSE(tiles_in(t, ball(z, 30)).exact);
}

TEST_CASE("density bounds along balls for r = 1..3") {
  Group z2(GroupSpec::int_lattice(2));
  const FolnerFamily balls(z2, FolnerKind::Balls);
  for (std::int64_t r = 1; r <= 3; ++r) {
    const auto t = greedy_tiling(z2, r, Window{40 + r});
    const auto idx = tiling_index(t, balls, 40);
    REQUIRE(idx.l.has_value());
    for (const auto& row : idx.rows) {
      CHECK(row.upper == make_rational(1, static_cast<std::int64_t>(z2.metric().ball_size(r))));
      CHECK(row.lower == make_rational(1, 2 * static_cast<std::int64_t>(z2.metric().ball_size(2 * r))));
      if (row.j >= *idx.l) CHECK(row.within());
    }
  }
}

TEST_CASE("window too small is an argument error") {
  Group z(GroupSpec::int_lattice(1));
  CHECK_THROWS_AS(greedy_tiling(z, 3, Window{5}), InvalidArgument);
}

TEST_CASE("tiling JSON round trip") {
  Group h(GroupSpec::heisenberg3());
  const auto t = greedy_tiling(h, 1, Window{5});
  const auto back = Tiling::from_json(t.to_json());
  CHECK(back.centers == t.centers);
  CHECK(back.r == 1);
}
