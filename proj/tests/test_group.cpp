#include <filesystem>

#include "doctest.h"
#include "support.hpp"
#include "ufh/errors.hpp"

using namespace ufh;
using ufh::testing::Rng;

namespace {

// Independent oracle: Heisenberg group as unitriangular matrices
// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab'), breadth-first from e.
// Values produced by a separate brute-force run and frozen here.
constexpr std::size_t kHeisBalls[] = {1, 5, 17, 53, 135, 299, 593, 1069, 1793};
// Same oracle for Z² ⋊ [[2,1],[1,1]] with generators e1, e2, t.
constexpr std::size_t kSolBalls[] = {1, 7, 33, 103, 273, 663, 1521, 3355};

}  // namespace

TEST_CASE("ball sizes of lattices follow the closed forms") {
  Group z(GroupSpec::int_lattice(1)), z2(GroupSpec::int_lattice(2));
  for (std::int64_t r = 0; r <= 20; ++r) {
    CHECK(z.metric().ball_size(r) == static_cast<std::size_t>(2 * r + 1));
    CHECK(z2.metric().ball_size(r) == static_cast<std::size_t>(2 * r * r + 2 * r + 1));
  }
}

TEST_CASE("Z^3 spheres match the crosspolytope count") {
  Group z3(GroupSpec::int_lattice(3));
  // |S_r| = 4r² + 2 for r ≥ 1.
  for (std::int64_t r = 1; r <= 8; ++r) CHECK(z3.metric().sphere_size(r) == static_cast<std::size_t>(4 * r * r + 2));
}

TEST_CASE("Heisenberg and lattice-semidirect balls match the frozen oracle") {
  Group h(GroupSpec::heisenberg3());
  for (int r = 0; r <= 8; ++r) CHECK(h.metric().ball_size(r) == kHeisBalls[r]);
  Group sol(GroupSpec::lattice_semidirect(Matrix2{{{2, 1}, {1, 1}}}));
  for (int r = 0; r <= 7; ++r) CHECK(sol.metric().ball_size(r) == kSolBalls[r]);
}

TEST_CASE("canonical order on Z alternates generator and inverse") {
  Group z(GroupSpec::int_lattice(1));
  const auto b = z.metric().ball_bfs(2);
  REQUIRE(b.size() == 5);
  CHECK(b[0] == z.make({0}));
  CHECK(b[1] == z.make({1}));
  CHECK(b[2] == z.make({-1}));
  CHECK(b[3] == z.make({2}));
  CHECK(b[4] == z.make({-2}));
}

TEST_CASE("group axioms hold on random triples") {
  Rng rng(11);
  auto groups = ufh::testing::small_groups();
  groups.emplace_back(GroupSpec::lattice_semidirect(Matrix2{{{2, 1}, {1, 1}}}));
  for (const auto& g : groups) {
    for (int i = 0; i < 200; ++i) {
      const auto a = ufh::testing::random_element(g, rng, 4);
      const auto b = ufh::testing::random_element(g, rng, 4);
      const auto c = ufh::testing::random_element(g, rng, 4);
      CHECK(g.compose(g.compose(a, b), c) == g.compose(a, g.compose(b, c)));
      CHECK(g.compose(a, g.invert(a)) == g.identity());
      CHECK(g.compose(g.identity(), a) == a);
    }
  }
}

TEST_CASE("word metric is a left-invariant metric") {
  Rng rng(12);
  for (const auto& g : ufh::testing::small_groups()) {
    for (int i = 0; i < 150; ++i) {
      const auto a = ufh::testing::random_element(g, rng, 3);
      const auto b = ufh::testing::random_element(g, rng, 3);
      const auto c = ufh::testing::random_element(g, rng, 3);
      CHECK(g.distance(a, b) == g.distance(b, a));
      CHECK(g.distance(a, c) <= g.distance(a, b) + g.distance(b, c));
      CHECK(g.distance(g.compose(c, a), g.compose(c, b)) == g.distance(a, b));
      CHECK((g.distance(a, b) == 0) == (a == b));
    }
  }
}

TEST_CASE("spheres partition the ball") {
  Group h(GroupSpec::heisenberg3());
  std::size_t total = 0;
  for (int r = 0; r <= 5; ++r) {
    for (const auto& x : h.metric().sphere(r)) CHECK(h.word_length(x) == r);
    total += h.metric().sphere_size(r);
    CHECK(total == h.metric().ball_size(r));
  }
}

TEST_CASE("metric tables survive a save and load") {
  const auto path = (std::filesystem::temp_directory_path() / "ufh_metric_test.bfs").string();
  Group a(GroupSpec::heisenberg3());
  a.metric().ensure_radius(5);
  a.metric().save(path);
  Group b(GroupSpec::heisenberg3());
  CHECK(b.metric().load(path));
  CHECK(b.metric().explored_radius() >= 5);
  CHECK(b.metric().ball_bfs(5) == a.metric().ball_bfs(5));
  Group c(GroupSpec::int_lattice(2));
  CHECK_FALSE(c.metric().load(path));
  std::filesystem::remove(path);
}

TEST_CASE("cap overflow raises instead of truncating") {
  Group z2(GroupSpec::int_lattice(2), 100);
  CHECK_THROWS_AS(z2.metric().ensure_radius(50), BeyondWindow);
}

TEST_CASE("model mismatch is rejected") {
  const auto z2 = GroupSpec::int_lattice(2);
  const auto h = GroupSpec::heisenberg3();
  CHECK_THROWS_AS(z2.compose(z2.identity(), h.make({1, 0, 0})), ModelMismatch);
}

TEST_CASE("spec JSON round trip") {
  for (const auto& s : {GroupSpec::int_lattice(3), GroupSpec::heisenberg3(),
                        GroupSpec::lattice_semidirect(Matrix2{{{2, 1}, {1, 1}}})}) {
    CHECK(GroupSpec::from_json(s.to_json()) == s);
    const auto g = s.symmetric_generators().back();
    CHECK(s.element_from_json(s.element_to_json(g)) == g);
  }
}

TEST_CASE("coset representatives are constant on cosets") {
  Rng rng(13);
  Group z2(GroupSpec::int_lattice(2));
  Group heis(GroupSpec::heisenberg3());
  const auto row = SubgroupSpec::coordinate(z2.spec(), {1});
  const auto center = SubgroupSpec::heisenberg_center();
  for (int i = 0; i < 100; ++i) {
    const auto g = ufh::testing::random_element(z2, rng, 5);
    const auto hz = z2.make({ufh::testing::uniform(rng, -9, 9), 0});
    CHECK(row.contains(hz));
    CHECK(row.rep(z2.compose(hz, g)) == row.rep(g));
    CHECK(row.rep(row.rep(g)) == row.rep(g));
    const auto x = ufh::testing::random_element(heis, rng, 4);
    const auto zc = heis.make({0, 0, ufh::testing::uniform(rng, -9, 9)});
    CHECK(center.rep(heis.compose(zc, x)) == center.rep(x));
  }
}

TEST_CASE("subgroup of full rank is refused") {
  const auto z2 = GroupSpec::int_lattice(2);
  CHECK_THROWS(SubgroupSpec::coordinate(z2, {1, 2}));
}
