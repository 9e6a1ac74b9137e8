#include "ufh/geometry.hpp"

#include <algorithm>
#include <unordered_set>

#include "ufh/errors.hpp"

namespace ufh {

FiniteSubset::FiniteSubset(std::vector<Element> elements) : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

bool FiniteSubset::contains(const Element& g) const {
  return std::binary_search(elements_.begin(), elements_.end(), g);
}

bool FiniteSubset::includes(const FiniteSubset& other) const {
  return std::includes(elements_.begin(), elements_.end(), other.elements_.begin(),
                       other.elements_.end());
}

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<Element> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset(std::move(out));
}

FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<Element> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset(std::move(out));
}

FiniteSubset set_intersection(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<Element> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset(std::move(out));
}

FiniteSubset ball(const Group& group, std::int64_t r) {
  if (r < 0) throw InvalidArgument("ball radius must be non-negative");
  return FiniteSubset(group.metric().ball_bfs(r));
}

FiniteSubset ball(const Group& group, std::int64_t r, const Element& center) {
  if (r < 0) throw InvalidArgument("ball radius must be non-negative");
  auto pts = group.metric().ball_bfs(r);
  for (auto& x : pts) x = group.compose(center, x);
  return FiniteSubset(std::move(pts));
}

FiniteSubset r_boundary(const Group& group, const FiniteSubset& s, std::int64_t r) {
  if (s.empty()) throw InvalidArgument("r-boundary of the empty set");
  if (r < 1) throw InvalidArgument("boundary radius must be positive");
  const auto offsets = group.metric().ball_bfs(r);
  std::unordered_set<Element, ElementHash> out;
  for (const auto& g : s) {
    for (const auto& x : offsets) {
      auto h = group.compose(g, x);
      if (!s.contains(h)) out.insert(h);
    }
  }
  return FiniteSubset(std::vector<Element>(out.begin(), out.end()));
}

std::int64_t max_length(const Group& group, const FiniteSubset& s) {
  std::int64_t m = 0;
  for (const auto& g : s) m = std::max(m, group.word_length(g));
  return m;
}

// ---------------------------------------------------------------------------
// Følner families

namespace {

std::int64_t pow3(std::int64_t e) {
  std::int64_t out = 1;
  for (std::int64_t i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(out, 3, &out)) throw BeyondWindow("radius 3^" + std::to_string(e) + " overflows");
  }
  return out;
}

}  // namespace

std::string to_string(FolnerKind k) {
  switch (k) {
    case FolnerKind::Cubes: return "cubes";
    case FolnerKind::Balls: return "balls";
    case FolnerKind::HeisBoxes: return "heisboxes";
    case FolnerKind::SuperGeometricBalls: return "supergeo";
  }
  return "?";
}

FolnerKind folner_kind_from_string(const std::string& s) {
  if (s == "cubes") return FolnerKind::Cubes;
  if (s == "balls") return FolnerKind::Balls;
  if (s == "heisboxes") return FolnerKind::HeisBoxes;
  if (s == "supergeo") return FolnerKind::SuperGeometricBalls;
  throw InvalidArgument("unknown Følner family '" + s + "'");
}

FolnerFamily::FolnerFamily(Group group, FolnerKind kind) : group_(std::move(group)), kind_(kind) {
  const auto f = group_.spec().family();
  if (f == Family::LatticeSemidirect)
    throw InvalidArgument("no Følner family is provided for " + group_.spec().name());
  if (kind == FolnerKind::Cubes && f != Family::IntLattice)
    throw InvalidArgument("cubes require an IntLattice group");
  if (kind == FolnerKind::HeisBoxes && f != Family::Heisenberg3)
    throw InvalidArgument("Heisenberg boxes require Heis3");
  if (kind == FolnerKind::SuperGeometricBalls)
    star_ = [](int j) { return pow3(static_cast<std::int64_t>(j - 1) * (j - 1)); };
}

std::optional<std::int64_t> FolnerFamily::ball_radius(int j) const {
  if (kind_ == FolnerKind::Balls) return j;
  if (kind_ == FolnerKind::SuperGeometricBalls) return pow3(static_cast<std::int64_t>(j) * j);
  return std::nullopt;
}

FiniteSubset FolnerFamily::set(int j) const {
  if (j < first_index()) throw InvalidArgument("Følner index below the first index");
  if (auto r = ball_radius(j)) return ball(group_, *r);
  std::vector<Element> pts;
  const auto& spec = group_.spec();
  if (kind_ == FolnerKind::Cubes) {
    const auto d = static_cast<std::size_t>(spec.rank());
    std::array<std::int64_t, kMaxCoords> c{};
    for (;;) {
      pts.push_back(spec.make(std::span<const std::int64_t>(c.data(), d)));
      std::size_t i = 0;
      for (; i < d; ++i) {
        if (++c[i] < j) break;
        c[i] = 0;
      }
      if (i == d) break;
    }
  } else {
    const std::int64_t jj = static_cast<std::int64_t>(j) * j;
    for (std::int64_t a = -j; a <= j; ++a)
      for (std::int64_t b = -j; b <= j; ++b)
        for (std::int64_t c = -jj; c <= jj; ++c) pts.push_back(spec.make({a, b, c}));
  }
  return FiniteSubset(std::move(pts));
}

std::size_t FolnerFamily::set_size(int j) const {
  if (j < first_index()) throw InvalidArgument("Følner index below the first index");
  if (auto r = ball_radius(j)) return group_.metric().ball_size(*r);
  if (kind_ == FolnerKind::Cubes) {
    std::size_t n = 1;
    for (int i = 0; i < group_.spec().rank(); ++i) n *= static_cast<std::size_t>(j);
    return n;
  }
  const auto side = static_cast<std::size_t>(2 * j + 1);
  return side * side * static_cast<std::size_t>(2 * j * j + 1);
}

std::int64_t FolnerFamily::star_radius(int j) const {
  if (!star_) throw InvalidArgument("not a nested family: " + name() + " has no star radii");
  return star_(j);
}

FolnerFamily FolnerFamily::with_star_radii(RadiusFn radii) const {
  FolnerFamily out = *this;
  out.star_ = std::move(radii);
  return out;
}

std::string FolnerFamily::name() const { return to_string(kind_); }

json FolnerFamily::to_json() const {
  return json{{"group", group_.spec().to_json()}, {"kind", to_string(kind_)}};
}

FolnerFamily FolnerFamily::from_json(const json& j) {
  return FolnerFamily(Group(GroupSpec::from_json(j.at("group"))),
                      folner_kind_from_string(j.at("kind").get<std::string>()));
}

// ---------------------------------------------------------------------------
// Profiles

namespace {

std::size_t boundary_size(const FolnerFamily& family, int j) {
  if (auto r = family.ball_radius(j)) {
    // ∂_1 B_r(e) is the sphere of radius r+1.
    return family.group().metric().sphere_size(*r + 1);
  }
  return r_boundary(family.group(), family.set(j), 1).size();
}

}  // namespace

GrowthTable sigma_profile(const FolnerFamily& family, int j_max) {
  std::vector<int> idx;
  for (int j = family.first_index(); j <= j_max; ++j) idx.push_back(j);
  return sigma_profile(family, idx);
}

GrowthTable sigma_profile(const FolnerFamily& family, const std::vector<int>& indices) {
  GrowthTable t;
  t.group = family.group().spec().name();
  t.family = family.name();
  for (int j : indices) {
    GrowthRow row;
    row.j = j;
    try {
      row.size = family.set_size(j);
      row.boundary = boundary_size(family, j);
    } catch (const BeyondWindow&) {
      t.truncated = true;
      t.truncated_at = j;
      break;
    }
    row.sigma = Rational(make_rational(static_cast<std::int64_t>(row.boundary),
                                       static_cast<std::int64_t>(row.size)));
    if (!t.rows.empty() && row.sigma > t.rows.back().sigma) t.non_monotone.push_back(j);
    t.rows.push_back(std::move(row));
  }
  return t;
}

StarReport check_star_condition(const FolnerFamily& family, int j_max) {
  if (!family.has_star_radii())
    throw InvalidArgument("not a nested family: " + family.name() + " has no star radii");
  StarReport rep;
  const auto& g = family.group();
  for (int j = family.first_index() + 1; j <= j_max; ++j) {
    StarRow row;
    row.j = j;
    row.radius = family.star_radius(j);
    try {
      const auto prev = family.set(j - 1);
      const auto cur = family.set(j);
      const auto inner = ball(g, row.radius);
      const auto outer = ball(g, 3 * row.radius);
      row.prev_in_ball = inner.includes(prev);
      row.ball_in_triple = outer.includes(inner);
      row.triple_in_set = cur.includes(outer);
      row.ratio = make_rational(static_cast<std::int64_t>(prev.size()),
                                static_cast<std::int64_t>(cur.size()));
    } catch (const BeyondWindow&) {
      rep.truncated = true;
      break;
    }
    rep.rows.push_back(row);
    if (!row.ok()) {
      rep.passed = false;
      rep.first_violation = j;
      break;
    }
  }
  return rep;
}

}  // namespace ufh
