#pragma once

// Hand-rolled generators for property tests.  Every generator draws from an
// explicit std::mt19937_64 so failures replay from the seed.

#include <random>
#include <vector>

#include "ufh/chains.hpp"

namespace ufh::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Element random_element(const Group& g, Rng& rng, std::int64_t radius) {
  const auto ball = g.metric().ball_bfs(radius);
  return ball[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(ball.size()) - 1))];
}

/// Small non-zero rational p/q with |p| ≤ 9, 1 ≤ q ≤ 6.
inline Rational random_coefficient(Rng& rng) {
  std::int64_t p = 0;
  while (p == 0) p = uniform(rng, -9, 9);
  return make_rational(p, uniform(rng, 1, 6));
}

/// Random degree-n chain: `terms` tuples x_0·(e, s_1, ..., s_n) with every
/// s_i in B_{span/2}(e), so the diameter is at most span.
inline UfChain random_chain(const Group& g, Rng& rng, int degree, std::int64_t span, int terms,
                            std::int64_t base_radius = 6) {
  UfChain c(degree, span);
  for (int t = 0; t < terms; ++t) {
    const auto x0 = random_element(g, rng, base_radius);
    Tuple x{x0};
    for (int i = 0; i < degree; ++i) x.push_back(g.compose(x0, random_element(g, rng, span / 2)));
    c.add(x, random_coefficient(rng));
  }
  return c;
}

inline BoundedFunction random_table(const Group& g, Rng& rng, std::int64_t radius, int points) {
  std::map<Element, Rational> tab;
  for (int i = 0; i < points; ++i) tab[random_element(g, rng, radius)] = random_coefficient(rng);
  return BoundedFunction::table(std::move(tab));
}

inline std::vector<Group> small_groups() {
  return {Group(GroupSpec::int_lattice(1)), Group(GroupSpec::int_lattice(2)),
          Group(GroupSpec::heisenberg3())};
}

}  // namespace ufh::testing
