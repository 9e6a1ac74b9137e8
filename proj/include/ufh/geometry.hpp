#pragma once

// Balls, r-boundaries, Følner families and isoperimetric profiles.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ufh/group.hpp"
#include "ufh/rational.hpp"

namespace ufh {

/// Deduplicated, lexicographically sorted finite set of elements.
class FiniteSubset {
 public:
  FiniteSubset() = default;
  explicit FiniteSubset(std::vector<Element> elements);

  const std::vector<Element>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  bool contains(const Element& g) const;
  bool includes(const FiniteSubset& other) const;

  auto begin() const noexcept { return elements_.begin(); }
  auto end() const noexcept { return elements_.end(); }

  friend bool operator==(const FiniteSubset&, const FiniteSubset&) = default;

 private:
  std::vector<Element> elements_;
};

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_intersection(const FiniteSubset& a, const FiniteSubset& b);

/// The bounded universe B_W(e).
struct Window {
  std::int64_t radius = 0;

  /// B_{W-margin}(e): the part on which a computation reaching `margin`
  /// further is exact.
  std::int64_t interior(std::int64_t margin) const { return radius - margin; }
};

/// B_r(center) = center · B_r(e).
FiniteSubset ball(const Group& group, std::int64_t r);
FiniteSubset ball(const Group& group, std::int64_t r, const Element& center);

/// ∂_r(S) = { g : 0 < d(g, S) ≤ r }.  Throws InvalidArgument for empty S.
FiniteSubset r_boundary(const Group& group, const FiniteSubset& s, std::int64_t r);

/// Largest word length attained on S.
std::int64_t max_length(const Group& group, const FiniteSubset& s);

enum class FolnerKind { Cubes, Balls, HeisBoxes, SuperGeometricBalls };

std::string to_string(FolnerKind k);
FolnerKind folner_kind_from_string(const std::string& s);

/// An indexed family j ↦ S_j of non-empty finite sets.
///
/// Cubes (IntLattice): S_j = {0..j-1}^d, j ≥ 1.
/// Balls: S_j = B_j(e), j ≥ 0.
/// HeisBoxes: S_j = {|a|,|b| ≤ j, |c| ≤ j²}, j ≥ 0.
/// SuperGeometricBalls: S_j = B_{3^{j²}}(e), j ≥ 0, with star radii
/// R(j) = 3^{(j-1)²}.
class FolnerFamily {
 public:
  using RadiusFn = std::function<std::int64_t(int)>;

  FolnerFamily(Group group, FolnerKind kind);

  const Group& group() const noexcept { return group_; }
  FolnerKind kind() const noexcept { return kind_; }
  int first_index() const noexcept { return kind_ == FolnerKind::Cubes ? 1 : 0; }
  bool monotone() const noexcept { return true; }
  bool exhausting() const noexcept { return kind_ != FolnerKind::Cubes; }

  /// For ball families, S_j = B_{radius}(e).
  std::optional<std::int64_t> ball_radius(int j) const;
  FiniteSubset set(int j) const;
  std::size_t set_size(int j) const;

  bool has_star_radii() const noexcept { return static_cast<bool>(star_); }
  std::int64_t star_radius(int j) const;
  /// Same sets with explicitly supplied radii R(j) for the nesting condition.
  FolnerFamily with_star_radii(RadiusFn radii) const;

  std::string name() const;
  json to_json() const;
  static FolnerFamily from_json(const json& j);

 private:
  Group group_;
  FolnerKind kind_;
  RadiusFn star_;
};

struct GrowthRow {
  int j = 0;
  std::size_t size = 0;
  std::size_t boundary = 0;
  Rational sigma;
  std::optional<Rational> chain_sum;
  std::optional<Rational> beta;
  std::optional<Rational> beta_over_sigma;
};

struct GrowthTable {
  std::string group;
  std::string family;
  std::string chain;
  std::vector<GrowthRow> rows;
  /// Set when the enumeration cap stopped the table early.
  bool truncated = false;
  int truncated_at = -1;
  /// Indices j where σ(j) > σ(j_prev).
  std::vector<int> non_monotone;
};

/// σ_S(j) = |∂_1 S_j| / |S_j| for j = first..j_max, exact.
GrowthTable sigma_profile(const FolnerFamily& family, int j_max);
GrowthTable sigma_profile(const FolnerFamily& family, const std::vector<int>& indices);

struct StarRow {
  int j = 0;
  std::int64_t radius = 0;
  bool prev_in_ball = false;    // S_{j-1} ⊆ B_R(e)
  bool ball_in_triple = false;  // B_R(e) ⊆ B_{3R}(e)
  bool triple_in_set = false;   // B_{3R}(e) ⊆ S_j
  Rational ratio;               // |S_{j-1}| / |S_j|
  bool ok() const { return prev_in_ball && ball_in_triple && triple_in_set; }
};

struct StarReport {
  std::vector<StarRow> rows;
  bool passed = true;
  int first_violation = -1;
  bool truncated = false;
};

/// Verifies S_{j-1} ⊆ B_{R(j)} ⊆ B_{3R(j)} ⊆ S_j for j = first+1..j_max.
/// Stops at the first violation.  Throws InvalidArgument without star radii.
StarReport check_star_condition(const FolnerFamily& family, int j_max);

}  // namespace ufh
