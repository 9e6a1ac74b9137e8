#pragma once

// Uniformly finite chains at window scale, the ℓ∞-coefficient form,
// Følner-averaged means, transfer, quasi-isometry pushforward, invariant
// cycles and coset averaging.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ufh/functions.hpp"

namespace ufh {

using Tuple = std::vector<Element>;

/// Degree-n chain with finitely many (n+1)-tuples and exact coefficients.
/// Zero coefficients are never stored.
class UfChain {
 public:
  UfChain() = default;
  explicit UfChain(int degree, std::int64_t span = 0) : degree_(degree), span_(span) {}

  int degree() const noexcept { return degree_; }
  /// Recorded bound R_c on tuple diameters.
  std::int64_t span() const noexcept { return span_; }
  void set_span(std::int64_t s) { span_ = s; }
  const std::map<Tuple, Rational>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Adds q·x; throws InvalidArgument when the tuple length is not degree+1.
  void add(const Tuple& x, const Rational& q);
  Rational coefficient(const Tuple& x) const;

  Rational sup_norm() const;
  /// max over tuples of max_{i,j} d(x_i, x_j).
  std::int64_t measured_span(const Group& group) const;

  friend bool operator==(const UfChain& a, const UfChain& b) {
    return a.degree_ == b.degree_ && a.entries_ == b.entries_;
  }

  json to_json(const GroupSpec& spec) const;
  static UfChain from_json(const GroupSpec& spec, const json& j);

 private:
  int degree_ = 0;
  std::int64_t span_ = 0;
  std::map<Tuple, Rational> entries_;
};

/// ∂(x_0..x_n) = Σ (-1)^i (x_0..x̂_i..x_n).  Throws for degree 0.
UfChain boundary(const UfChain& c);

/// Rewrites every tuple as x_0·(e, x_0⁻¹x_1, ..., x_0⁻¹x_n) and keeps the
/// second factor: the image in the coinvariants.
UfChain normalize(const Group& group, const UfChain& c);

/// Degree-n chain in ℓ∞ form: n-tuples (t_1..t_n) with bounded function
/// coefficients.  The tuple stands for (e, t_1, ..., t_n).
class LInftyChain {
 public:
  LInftyChain() = default;
  explicit LInftyChain(int degree) : degree_(degree) {}

  int degree() const noexcept { return degree_; }
  const std::map<Tuple, BoundedFunction>& terms() const noexcept { return terms_; }
  void add(const Tuple& t, const BoundedFunction& f);

  json to_json(const GroupSpec& spec) const;

 private:
  int degree_ = 0;
  std::map<Tuple, BoundedFunction> terms_;
};

/// φ_{(t_1..t_n)}(g) = c(g⁻¹, g⁻¹t_1, ..., g⁻¹t_n).  In degree 0 this is the
/// inversion φ(g) = c(g⁻¹).
LInftyChain rho(const Group& group, const UfChain& c);
/// Inverse of rho; needs finitely supported coefficients.
UfChain rho_inv(const Group& group, const LInftyChain& c, std::int64_t span = 0);
/// Boundary induced on the ℓ∞ side so that rho is a chain map.
LInftyChain boundary(const Group& group, const LInftyChain& c);

/// m_j(φ) = |S_j|⁻¹ Σ_{s∈S_j} φ(s).
class ApproxMean {
 public:
  ApproxMean(FolnerFamily family, int j);

  const FolnerFamily& family() const noexcept { return family_; }
  int index() const noexcept { return j_; }
  const FiniteSubset& set() const noexcept { return set_; }

  Rational operator()(const BoundedFunction& f) const;

 private:
  FolnerFamily family_;
  int j_;
  FiniteSubset set_;
};

/// Σ_t (e, t) ⊗ φ_t ↦ Σ_t m(φ_t)·(e, t).
UfChain transfer(const Group& group, const LInftyChain& c, const ApproxMean& mean);
/// q·(x_0..x_n) ↦ (x_0⁻¹x_1, ..., x_0⁻¹x_n) ⊗ q·χ_G.
LInftyChain i_star(const Group& group, const UfChain& c);

struct InvarianceCheck {
  Rational deviation;  // |m(φ∘R_g) − m(φ)|
  Rational bound;      // 2‖φ‖ |∂_{|g|} S| / |S|
  bool holds() const { return deviation <= bound; }
};

InvarianceCheck right_translation_check(const BoundedFunction& f, const Element& g,
                                        const ApproxMean& mean);

/// A map between groups with claimed quasi-isometry constants
/// d(f x, f y) ≤ λ d(x, y) + ε.  The constants are recorded, not verified.
struct QiMap {
  std::function<Element(const Element&)> map;
  Rational lambda = 1;
  Rational epsilon = 0;
  std::string name;
};

/// Σ c(x)·(f(x_0), ..., f(x_n)), summing coefficients on collisions.
UfChain qi_push(const UfChain& c, const QiMap& f);

struct InvariantCycle {
  UfChain chain;
  Window window;
  /// ∂ = 0 is asserted on B_{interior}(e).
  std::int64_t interior = 0;
};

/// Σ_{g ∈ B_W(e)} φ(g)·g·(template), where the template is a chain over H
/// whose tuples begin with e and whose normalized boundary vanishes.
///
/// Rejects (VerificationFailure with a witness) a template that is not an
/// H-cycle or a φ with φ(s·g) ≠ φ(g) for an H-generator s and g ∈ B_{W-1}.
InvariantCycle invariant_cycle(const Group& group, const SubgroupSpec& h, const UfChain& templ,
                               const BoundedFunction& phi, Window window);

/// Points of B_r(e) where a chain's boundary does not vanish.
std::vector<Element> boundary_defects(const Group& group, const UfChain& c, std::int64_t r);

/// ψ ↦ ψ∘π for a function ψ on coset representatives.
BoundedFunction pi_star(const SubgroupSpec& h, const BoundedFunction& psi);
/// τ_j(φ), averaged over the H-Følner box of index j.  Throws for non-normal H.
BoundedFunction coset_average(const SubgroupSpec& h, const BoundedFunction& phi, std::int64_t j);

}  // namespace ufh
