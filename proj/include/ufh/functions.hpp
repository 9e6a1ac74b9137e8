#pragma once

// Procedural subsets Γ ⊆ G and bounded functions φ: G → Q.  Both are
// immutable expression trees evaluated pointwise, so they can describe
// infinite objects and still be serialized.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ufh/geometry.hpp"
#include "ufh/rational.hpp"

namespace ufh {

namespace detail {
struct SetNode;
struct FunctionNode;
}  // namespace detail

class SetRule {
 public:
  static SetRule all();
  static SetRule finite(FiniteSubset points);
  /// {n^k : n ∈ N} ⊂ Z, including 0.
  static SetRule powers(int k);
  /// { g : g_axis ≡ residue (mod modulus) }, axis 1-based.
  static SetRule congruence(int axis, std::int64_t modulus, std::int64_t residue);
  /// { g : g_axis ≥ min }.
  static SetRule half_space(int axis, std::int64_t min);
  /// ∪ H·a over the listed elements a.
  static SetRule coset_union(SubgroupSpec h, const FiniteSubset& tiles);
  /// An explicitly computed set, known on B_radius(e) only.  `payload`
  /// carries the construction data that produced it.
  static SetRule materialized(std::string kind, FiniteSubset points, std::int64_t radius,
                              json payload);

  friend SetRule operator|(const SetRule& a, const SetRule& b);
  friend SetRule operator&(const SetRule& a, const SetRule& b);
  friend SetRule operator-(const SetRule& a, const SetRule& b);
  SetRule complement() const;

  /// Throws BeyondWindow when membership is not known at g.
  bool contains(const Group& group, const Element& g) const;
  /// Γ ∩ B_r(e), sorted.
  FiniteSubset members_in_ball(const Group& group, std::int64_t r) const;
  /// Finite point list when the rule is a plain finite set.
  std::optional<FiniteSubset> finite_points() const;

  std::string describe() const;
  json to_json(const GroupSpec& spec) const;
  static SetRule from_json(const GroupSpec& spec, const json& j);

  const detail::SetNode& node() const { return *node_; }

 private:
  explicit SetRule(std::shared_ptr<const detail::SetNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::SetNode> node_;
};

/// A bounded function on G with a recorded bound sup_bound() ≥ sup |φ|.
class BoundedFunction {
 public:
  static BoundedFunction constant(Rational value);
  static BoundedFunction indicator(SetRule set);
  static BoundedFunction delta(const Element& g);
  /// Finitely supported function; zero entries are dropped.
  static BoundedFunction table(std::map<Element, Rational> values);
  static BoundedFunction linear(std::vector<std::pair<Rational, BoundedFunction>> terms);
  /// ψ ∘ π where π(g) is the coset representative of Hg.
  static BoundedFunction coset_pullback(SubgroupSpec h, BoundedFunction psi);
  /// τ_j(φ)(g) = |F_j|⁻¹ Σ_{h∈F_j} φ(h·rep(g)) with F_j the H-Følner box.
  static BoundedFunction coset_average(SubgroupSpec h, std::int64_t j, BoundedFunction phi);

  /// (g·φ)(x) = φ(g⁻¹x).
  BoundedFunction left_translate(const Element& g) const;
  /// (φ∘R_g)(x) = φ(xg).
  BoundedFunction right_translate(const Element& g) const;
  /// x ↦ φ(x⁻¹).
  BoundedFunction inverted() const;

  friend BoundedFunction operator+(const BoundedFunction& a, const BoundedFunction& b);
  friend BoundedFunction operator*(const Rational& q, const BoundedFunction& f);

  Rational operator()(const Group& group, const Element& x) const;
  Rational sup_bound() const;
  /// The finite support, when it can be derived structurally.
  std::optional<std::vector<Element>> finite_support(const Group& group) const;
  /// Equivalent table when finitely supported.
  std::optional<std::map<Element, Rational>> materialize(const Group& group) const;

  std::string describe() const;
  json to_json(const GroupSpec& spec) const;
  static BoundedFunction from_json(const GroupSpec& spec, const json& j);

 private:
  explicit BoundedFunction(std::shared_ptr<const detail::FunctionNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::FunctionNode> node_;
};

/// Σ_{s∈S} φ(s).
Rational sum_over(const Group& group, const BoundedFunction& f, const FiniteSubset& s);

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);

}  // namespace ufh
