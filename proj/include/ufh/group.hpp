#pragma once

// Finitely generated group models with exact normal forms, and the word
// metric computed by breadth-first search in the Cayley graph.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace ufh {

using json = nlohmann::json;

enum class Family : std::uint8_t { IntLattice, Heisenberg3, LatticeSemidirect };

std::string to_string(Family f);

inline constexpr std::size_t kMaxCoords = 4;

/// Normal form of a group element.
///
/// IntLattice(d): (x_1..x_d).  Heisenberg3: (a,b,c) with
/// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').  LatticeSemidirect:
/// (v_1,v_2,k) with (v,k)(w,l) = (v + A^k w, k+l).
///
/// Two elements are equal iff their coordinates are equal; the ordering is
/// lexicographic on coordinates within a family.
class Element {
 public:
  Element() = default;
  Element(Family family, std::span<const std::int64_t> coords);
  Element(Family family, std::initializer_list<std::int64_t> coords)
      : Element(family, std::span<const std::int64_t>(coords.begin(), coords.size())) {}

  Family family() const noexcept { return family_; }
  std::size_t size() const noexcept { return size_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::span<const std::int64_t> coords() const noexcept { return {coords_.data(), size_}; }

  friend bool operator==(const Element&, const Element&) = default;
  friend std::strong_ordering operator<=>(const Element&, const Element&) = default;

 private:
  Family family_ = Family::IntLattice;
  std::uint8_t size_ = 0;
  std::array<std::int64_t, kMaxCoords> coords_{};
};

struct ElementHash {
  std::size_t operator()(const Element& g) const noexcept;
};

std::string to_string(const Element& g);

using Matrix2 = std::array<std::array<std::int64_t, 2>, 2>;

/// Group model: one of the three supported families plus its generators.
/// Value type; cheap to copy.
class GroupSpec {
 public:
  static GroupSpec int_lattice(int d);
  static GroupSpec heisenberg3();
  static GroupSpec lattice_semidirect(const Matrix2& a);

  Family family() const noexcept { return family_; }
  int rank() const noexcept { return rank_; }
  const Matrix2& matrix() const noexcept { return a_; }
  /// Number of coordinates of an element.
  std::size_t coord_count() const noexcept;

  Element identity() const;
  Element make(std::initializer_list<std::int64_t> coords) const;
  Element make(std::span<const std::int64_t> coords) const;

  /// The standard generating set S (without inverses).
  std::vector<Element> generators() const;
  /// S ∪ S⁻¹ ordered as s_1, s_1⁻¹, s_2, s_2⁻¹, ...  This order fixes the
  /// canonical breadth-first enumeration.
  std::vector<Element> symmetric_generators() const;

  Element compose(const Element& a, const Element& b) const;
  Element invert(const Element& a) const;
  /// A^k for the semidirect family (k may be negative).
  Matrix2 matrix_power(std::int64_t k) const;

  bool belongs(const Element& g) const noexcept;
  void check(const Element& g) const;

  std::string name() const;
  json to_json() const;
  static GroupSpec from_json(const json& j);
  json element_to_json(const Element& g) const;
  Element element_from_json(const json& j) const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

 private:
  Family family_ = Family::IntLattice;
  int rank_ = 1;
  Matrix2 a_{{{1, 0}, {0, 1}}};
};

inline constexpr std::size_t kDefaultElementCap = 10'000'000;

/// Memoized breadth-first search from the identity over S ∪ S⁻¹.
///
/// Spheres are stored in discovery order; a ball B_r(e) in canonical BFS
/// order is the concatenation of spheres 0..r.  Expansion is guarded by a
/// lock so a metric may be shared between threads.
class WordMetric {
 public:
  explicit WordMetric(GroupSpec spec, std::size_t cap = kDefaultElementCap);

  const GroupSpec& spec() const noexcept { return spec_; }
  std::size_t cap() const noexcept { return cap_; }

  /// d_S(e, g).  Throws BeyondWindow if g is not reached before the cap.
  std::int64_t length(const Element& g);
  /// Length if already enumerated, without expanding.
  std::optional<std::int64_t> known_length(const Element& g) const;

  /// Enumerates every sphere up to radius r.  Throws BeyondWindow past the cap.
  void ensure_radius(std::int64_t r);
  std::int64_t explored_radius() const;

  std::size_t ball_size(std::int64_t r);
  std::size_t sphere_size(std::int64_t r);
  /// B_r(e) in canonical BFS order.
  std::vector<Element> ball_bfs(std::int64_t r);
  /// The sphere of radius r in discovery order.  Stable storage.
  std::span<const Element> sphere(std::int64_t r);

  void save(const std::string& path) const;
  /// Loads a table written by save() for the same spec; returns false if
  /// the file is absent or belongs to another spec.
  bool load(const std::string& path);

 private:
  void expand_one_layer();  // caller holds the unique lock

  GroupSpec spec_;
  std::size_t cap_;
  std::vector<Element> generators_;
  std::vector<std::vector<Element>> spheres_;
  std::unordered_map<Element, std::int32_t, ElementHash> dist_;
  std::size_t total_ = 0;
  mutable std::shared_mutex mutex_;
};

/// A group model together with its shared word-metric cache.
class Group {
 public:
  explicit Group(GroupSpec spec, std::size_t cap = kDefaultElementCap);

  const GroupSpec& spec() const noexcept { return spec_; }
  WordMetric& metric() const noexcept { return *metric_; }

  Element identity() const { return spec_.identity(); }
  Element make(std::initializer_list<std::int64_t> coords) const { return spec_.make(coords); }
  Element compose(const Element& a, const Element& b) const { return spec_.compose(a, b); }
  Element invert(const Element& a) const { return spec_.invert(a); }

  std::int64_t word_length(const Element& g) const;
  /// d(g, h) = |g⁻¹h|.
  std::int64_t distance(const Element& g, const Element& h) const;

 private:
  GroupSpec spec_;
  std::shared_ptr<WordMetric> metric_;
};

/// A subgroup H of infinite index with a coset-representative map for the
/// right cosets Hg: rep(h·g) = rep(g), rep(rep(g)) = rep(g).
///
/// Supported: coordinate subgroups of Z^d (spanned by the listed axes) and
/// the center {(0,0,c)} of the Heisenberg group.  Both are normal.
class SubgroupSpec {
 public:
  enum class Kind { Coordinate, HeisenbergCenter };

  /// `axes` are 1-based coordinate indices spanning H.
  static SubgroupSpec coordinate(const GroupSpec& g, std::vector<int> axes);
  static SubgroupSpec heisenberg_center();

  Kind kind() const noexcept { return kind_; }
  const std::vector<int>& axes() const noexcept { return axes_; }
  bool normal() const noexcept { return true; }
  const GroupSpec& ambient() const noexcept { return ambient_; }

  bool contains(const Element& g) const;
  Element rep(const Element& g) const;
  /// Følner set of H used by coset averaging: H-coordinates in [-j, j].
  std::vector<Element> folner_set(std::int64_t j) const;
  /// H ∩ B_r(e).
  std::vector<Element> elements_in_ball(const Group& g, std::int64_t r) const;

  std::string name() const;
  json to_json() const;
  static SubgroupSpec from_json(const GroupSpec& ambient, const json& j);

 private:
  Kind kind_ = Kind::Coordinate;
  GroupSpec ambient_;
  std::vector<int> axes_;
};

}  // namespace ufh
