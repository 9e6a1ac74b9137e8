#pragma once

// Greedy r-tilings and the tile-density index along a Følner family.

#include <cstdint>
#include <optional>
#include <vector>

#include "ufh/geometry.hpp"

namespace ufh {

/// Centers T with pairwise d > 2r (disjoint r-balls) whose 2r-balls cover
/// the window interior B_{W-2r}(e).
struct Tiling {
  Group group;
  std::int64_t r = 1;
  Window window;
  FiniteSubset centers;
  bool packing_ok = false;
  bool covering_ok_on_interior = false;

  json to_json() const;
  static Tiling from_json(const json& j);
};

/// Maximal 2r-separated subset of B_W(e), scanned in canonical BFS order.
///
/// Because acceptance of g depends only on centers of smaller or equal
/// length, the result restricted to B_{W'}(e) does not depend on W ≥ W'.
/// Throws InvalidArgument when W < 2r.
Tiling greedy_tiling(const Group& group, std::int64_t r, Window window);

/// Independent check of both tiling axioms; fills the flags.
void verify_tiling(Tiling& t);

struct TilesResult {
  FiniteSubset tiles;
  /// False when S reaches past B_{W-r}(e).
  bool exact = true;
};

/// T_S = { t ∈ T : B_r(t) ⊆ S }.
TilesResult tiles_in(const Tiling& tiling, const FiniteSubset& s);

struct DensityRow {
  int j = 0;
  std::size_t tiles = 0;
  std::size_t size = 0;
  Rational density;
  Rational lower;  // 1 / (2 |B_{2r}(e)|)
  Rational upper;  // 1 / |B_r(e)|
  bool exact = true;
  bool within() const { return lower <= density && density <= upper; }
};

struct TilingIndex {
  /// Least j such that the two-sided bound holds for every computed j' ≥ j;
  /// empty when the bound fails at the last computed index.
  std::optional<int> l;
  std::vector<DensityRow> rows;
  bool truncated = false;
};

TilingIndex tiling_index(const Tiling& tiling, const FolnerFamily& family, int j_max);

}  // namespace ufh
