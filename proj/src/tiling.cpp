#include "ufh/tiling.hpp"

#include <unordered_set>

#include "ufh/errors.hpp"

namespace ufh {

Tiling greedy_tiling(const Group& group, std::int64_t r, Window window) {
  if (r < 1) throw InvalidArgument("tiling radius must be positive");
  if (window.radius < 2 * r) throw InvalidArgument("window radius must be at least 2r");
  const auto order = group.metric().ball_bfs(window.radius);
  const auto reach = group.metric().ball_bfs(2 * r);
  std::unordered_set<Element, ElementHash> blocked;
  std::vector<Element> centers;
  for (const auto& g : order) {
    if (blocked.contains(g)) continue;
    centers.push_back(g);
    for (const auto& x : reach) blocked.insert(group.compose(g, x));
  }
  Tiling t{group, r, window, FiniteSubset(std::move(centers))};
  verify_tiling(t);
  return t;
}

void verify_tiling(Tiling& t) {
  const auto& g = t.group;
  const auto reach = g.metric().ball_bfs(2 * t.r);
  // Packing: no other center within distance 2r of any center.
  t.packing_ok = true;
  for (const auto& c : t.centers) {
    for (const auto& x : reach) {
      if (x == g.identity()) continue;
      if (t.centers.contains(g.compose(c, x))) {
        t.packing_ok = false;
        break;
      }
    }
    if (!t.packing_ok) break;
  }
  // Covering of the interior by 2r-balls.
  std::unordered_set<Element, ElementHash> covered;
  for (const auto& c : t.centers)
    for (const auto& x : reach) covered.insert(g.compose(c, x));
  t.covering_ok_on_interior = true;
  const auto interior = t.window.interior(2 * t.r);
  if (interior >= 0) {
    for (const auto& p : g.metric().ball_bfs(interior)) {
      if (!covered.contains(p)) {
        t.covering_ok_on_interior = false;
        break;
      }
    }
  }
}

TilesResult tiles_in(const Tiling& tiling, const FiniteSubset& s) {
  TilesResult out;
  const auto& g = tiling.group;
  const auto limit = tiling.window.interior(tiling.r);
  for (const auto& p : s) {
    if (g.word_length(p) > limit) {
      out.exact = false;
      break;
    }
  }
  const auto offsets = g.metric().ball_bfs(tiling.r);
  std::vector<Element> tiles;
  for (const auto& c : tiling.centers) {
    if (!s.contains(c)) continue;
    bool inside = true;
    for (const auto& x : offsets) {
      if (!s.contains(g.compose(c, x))) {
        inside = false;
        break;
      }
    }
    if (inside) tiles.push_back(c);
  }
  out.tiles = FiniteSubset(std::move(tiles));
  return out;
}

TilingIndex tiling_index(const Tiling& tiling, const FolnerFamily& family, int j_max) {
  TilingIndex idx;
  auto& metric = tiling.group.metric();
  const auto br = static_cast<std::int64_t>(metric.ball_size(tiling.r));
  const auto b2r = static_cast<std::int64_t>(metric.ball_size(2 * tiling.r));
  const Rational lower = make_rational(1, 2 * b2r);
  const Rational upper = make_rational(1, br);
  for (int j = family.first_index(); j <= j_max; ++j) {
    FiniteSubset s;
    try {
      s = family.set(j);
    } catch (const BeyondWindow&) {
      idx.truncated = true;
      break;
    }
    const auto res = tiles_in(tiling, s);
    DensityRow row;
    row.j = j;
    row.tiles = res.tiles.size();
    row.size = s.size();
    row.density = make_rational(static_cast<std::int64_t>(row.tiles), static_cast<std::int64_t>(row.size));
    row.lower = lower;
    row.upper = upper;
    row.exact = res.exact;
    idx.rows.push_back(row);
  }
  for (auto it = idx.rows.rbegin(); it != idx.rows.rend(); ++it) {
    if (!it->within()) break;
    idx.l = it->j;
  }
  return idx;
}

json Tiling::to_json() const {
  json c = json::array();
  for (const auto& p : centers) c.push_back(group.spec().element_to_json(p));
  return json{{"group", group.spec().to_json()}, {"r", r}, {"window", window.radius}, {"centers", c}};
}

Tiling Tiling::from_json(const json& j) {
  Group g(GroupSpec::from_json(j.at("group")));
  std::vector<Element> c;
  for (const auto& e : j.at("centers")) c.push_back(g.spec().element_from_json(e));
  Tiling t{g, j.at("r").get<std::int64_t>(), Window{j.at("window").get<std::int64_t>()},
           FiniteSubset(std::move(c))};
  verify_tiling(t);
  return t;
}

}  // namespace ufh
