#pragma once

// Degree-0 class analysis: growth profiles β/σ and their comparison,
// Whyte witnesses, sparse sets and their certificates, thick families.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ufh/chains.hpp"
#include "ufh/tiling.hpp"

namespace ufh {

// ---------------------------------------------------------------------------
// Growth profiles

/// Exact Σ_{s∈S_j} c(s) for each requested j.  Ball families are summed
/// sphere by sphere.
std::vector<Rational> chain_sums(const BoundedFunction& c, const FolnerFamily& family,
                                 const std::vector<int>& indices);

/// σ, Σ c, β = |Σ c| / |S_j| and β/σ for each requested j.
GrowthTable beta_profile(const BoundedFunction& c, const FolnerFamily& family,
                         const std::vector<int>& indices, const std::string& chain_id = "");
GrowthTable beta_profile(const BoundedFunction& c, const FolnerFamily& family, int j_max,
                         const std::string& chain_id = "");

/// Roughly `count` distinct integers spaced geometrically in [lo, hi].
std::vector<int> log_spaced_indices(int lo, int hi, int count);

enum class Relation { Prec, Sim, Succ, Inconclusive };
std::string to_string(Relation r);

struct ComparisonOptions {
  double tolerance = 0.05;
  int max_tail = 10;
};

/// Finite-range evidence for α ≺ β, α ∼ β or α ≻ β.
struct ComparisonVerdict {
  Relation relation = Relation::Inconclusive;
  std::optional<double> limit;  // estimated lim α/β for Sim
  std::vector<std::int64_t> tail_indices;
  std::vector<double> tail_ratios;
  bool non_increasing = false;
  bool non_decreasing = false;
  double log_slope = 0.0;
  std::string label = "finite-range evidence";

  json to_json() const;
};

/// Heuristic classification of lim α(n)/β(n) from a tail of K samples
/// spaced geometrically in [√n_max, n_max], K = min(max_tail, N/2).
///
///   prec: ratios non-increasing with an overall drop, and either the last
///         ratio is below the tolerance or the log-log slope is below
///         -tolerance (the ratio decays like a power of n);
///   sim:  every tail ratio lies within tolerance·last of the last ratio;
///   succ: prec holds for β/α;
///   otherwise inconclusive.
///
/// Throws InvalidArgument on length mismatch or a non-positive β.
ComparisonVerdict compare(const std::vector<std::int64_t>& n, const std::vector<Rational>& alpha,
                          const std::vector<Rational>& beta, ComparisonOptions opt = {});
ComparisonVerdict compare(const std::vector<std::int64_t>& n, const std::vector<double>& alpha,
                          const std::vector<double>& beta, ComparisonOptions opt = {});

// ---------------------------------------------------------------------------
// Whyte witnesses

struct WhyteResult {
  bool found = false;
  int j = -1;
  std::string source;  // "family" or "support"
  FiniteSubset set;
  Rational sum;
  std::size_t boundary = 0;
  int examined = 0;
};

/// Searches S_j, then (S_j ∩ supp c)·B_1(e), for j = first..budget, for a
/// set with |Σ_S c| > n |∂_1 S|.  Not-found is inconclusive.
WhyteResult whyte_witness(const BoundedFunction& c, const FolnerFamily& family, int level,
                          int budget);

struct BoundaryBoundRow {
  std::size_t set_size = 0;
  Rational sum;    // Σ_S ∂b
  Rational bound;  // 2 ‖b‖ |B_R(e)| |∂_R S|
  bool ok() const { return rabs(sum) <= bound; }
};

/// |Σ_{s∈S} (∂b)(s)| ≤ 2‖b‖ |B_R(e)| |∂_R S| with R the span of b.
std::vector<BoundaryBoundRow> boundary_bound_check(const Group& group, const UfChain& b,
                                                   const std::vector<FiniteSubset>& test_sets);

// ---------------------------------------------------------------------------
// Sparse sets

struct SparseRow {
  int j = 0;
  std::int64_t r = 1;
  bool fallback = false;
  /// Which condition stops r from growing: "cap", "ratio", "sqrt_c",
  /// "tiling_index", or "fallback".
  std::string binding;
  bool ratio_ok = false;   // |B_r| / (4|B_2r|) ≥ |S_{j-1}| / |S_j|
  bool sqrt_c_ok = false;  // 1 / (4|B_2r|) ≥ √c(j)
  bool index_ok = false;   // l(T^r) ≤ j
  std::optional<int> tiling_index;
  Rational c;
  std::size_t set_size = 0;
  std::size_t ring_points = 0;     // |Γ ∩ (S_j \ S_{j-1})|
  std::size_t tiles_now = 0;       // |T_j^r|
  std::size_t tiles_before = 0;    // |T_{j-1}^r|
  Rational density;                // |Γ ∩ S_j| / |S_j|
  Rational ring_bound;             // 1 / (4 |B_{2r}(e)|)
};

struct SparseSet {
  Group group;
  SetRule rule;
  FiniteSubset points;
  std::map<Element, int> ring;  // smallest j contributing the point
  std::vector<SparseRow> rows;
  int j_max = 0;
  bool truncated = false;
  /// Γ is known exactly on B_known(e).
  std::int64_t known_radius = 0;
  std::int64_t tiling_window = 0;
  /// Largest word length on S_j, parallel to rows.
  std::vector<std::int64_t> row_extent;
  std::vector<std::string> log;

  /// Ring threshold for r: extent(S_{j*-1}) + r with j* least such that
  /// r(l) > 2r for every l in [j*, j_max]; empty if none.
  std::optional<std::int64_t> ring_threshold(std::int64_t r) const;
  std::int64_t max_r() const;
};

/// Builds Γ_c = T_0^{r(0)} ∪ ⋃_j (T_j^{r(j)} \ T_{j-1}^{r(j)}) for c given
/// by its values c(0..j_max).  r(0,c) = 1.  Refuses (VerificationFailure)
/// when the nesting condition fails on the range; truncates at the cap.
SparseSet sparse_construct(const FolnerFamily& family, const std::vector<Rational>& c, int j_max);

/// Recomputes the point set from the stored payload.
FiniteSubset rederive_sparse(const json& payload);

/// c(j) = σ_S(j)^2 and c(j) = (j+1)^{-p}.
std::vector<Rational> c_sigma_squared(const FolnerFamily& family, int j_max);
std::vector<Rational> c_power(int p, int j_max);

struct SparseCertRow {
  std::int64_t r = 0;
  /// Least R with C_obs(R) ≤ C, or the imposed threshold.
  std::optional<std::int64_t> threshold;
  int c_obs = 0;               // max over R < |g| ≤ W - r of |Γ ∩ B_r(g)|
  int c_all = 0;               // max over |g| ≤ W - r
  bool vacuous = false;        // no g with R < |g| ≤ W - r
  std::vector<int> layer_max;  // per |g| = 0..W-r
  bool imposed = false;
  bool ok = false;
};

struct SparseCertificate {
  int claimed_c = 2;
  std::int64_t window = 0;
  std::vector<SparseCertRow> rows;
  bool valid() const;
  json to_json() const;
};

/// Exhaustive counts |Γ ∩ B_r(g)| for |g| ≤ W - r.  When `thresholds` has
/// an entry for r it is imposed; otherwise the least working R is found.
SparseCertificate sparse_verify(const Group& group, const SetRule& gamma,
                                const std::vector<std::int64_t>& r_list, Window window,
                                int claimed_c,
                                const std::map<std::int64_t, std::int64_t>& thresholds = {});

struct DecayRow {
  int j = 0;
  Rational beta;
  /// Per certified r: C/|B_r| (1 + |∂_r S_j|/|S_j|) + |B_R| |Γ ∩ B_{R+r}| / (|B_r| |S_j|).
  std::map<std::int64_t, Rational> bounds;
  bool ok = true;
};

/// β_{χ_Γ}(j) with the counting bound for every certified r whose window
/// contains S_j ∪ ∂_r S_j.
std::vector<DecayRow> invisibility_decay(const Group& group, const SetRule& gamma,
                                         const FolnerFamily& family, const std::vector<int>& indices,
                                         const SparseCertificate& cert);

struct IterationStep {
  int n = 0;
  SparseSet set;
  std::vector<Rational> c;
  GrowthTable beta;
};

struct IterationReport {
  std::vector<IterationStep> steps;
  std::vector<ComparisonVerdict> verdicts;  // σ vs β_0, β_0 vs β_1, ...
  int depth_reached = 0;
  std::string stop_reason;
};

/// Γ_0 = Γ_σ, Γ_{n+1} = Γ_{β_{Γ_n}} for as many steps as the window allows.
IterationReport iterate_sparse(const FolnerFamily& family, int j_max, int depth);

struct IndependenceReport {
  std::vector<std::string> names;
  std::vector<std::int64_t> indices;
  std::vector<std::vector<Rational>> sums;  // per function, per index
  std::vector<std::vector<Rational>> matrix;  // Σc_i / Σc_k at the last index
  std::vector<ComparisonVerdict> chain;  // σ vs f_0, f_0 vs f_1, ...
  bool ordered = false;
  std::string label = "finite-range evidence";
};

/// Evidence for σ ≺ β_{f_0} ≺ β_{f_1} ≺ ... on the given indices.
IndependenceReport independence_matrix(const std::vector<BoundedFunction>& functions,
                                       const std::vector<std::string>& names,
                                       const FolnerFamily& family, const std::vector<int>& indices,
                                       ComparisonOptions opt = {});

// ---------------------------------------------------------------------------
// Thick families

/// First g in canonical order with π(T·g) ∩ π(T') = ∅, searched in
/// B_budget(e).  Throws BeyondWindow when the budget is exhausted.
Element separate_search(const Group& group, const SubgroupSpec& h, const FiniteSubset& t,
                        const FiniteSubset& t_prime, std::int64_t budget);

struct ThickTile {
  int k = 0;
  int l = 0;
  Element translator;
};

struct ThickFamily {
  Group group;
  SubgroupSpec subgroup;
  int families = 0;
  int depth = 0;
  std::vector<ThickTile> tiles;  // in construction order
  std::vector<std::string> log;

  /// A^k_l = B_l(e)·g.
  FiniteSubset tile_set(const ThickTile& t) const;
  /// T^k = ⋃_l H·A^k_l.
  SetRule union_rule(int k) const;
  const ThickTile& tile(int k, int l) const;

  json to_json() const;
  static ThickFamily from_json(const json& j);
};

/// Tiles for l = 1..depth (outer) and k = 1..families (inner), each
/// separated from the union of all earlier tiles.
ThickFamily thick_construct(const Group& group, const SubgroupSpec& h, int families, int depth,
                            std::int64_t budget = 256);

struct ThickReport {
  bool projections_disjoint = true;
  /// D[j][k][l] = |T^j ∩ A^k_l| / |A^k_l|, indices from 0.
  std::vector<std::vector<std::vector<Rational>>> density;
  bool density_identity = true;
  bool left_invariant = true;
  std::int64_t invariance_radius = 0;
  std::size_t invariance_checks = 0;
  /// witnesses[k][r-1] = translator g with B_r(e)·g ⊆ T^k.
  std::vector<std::vector<std::optional<Element>>> witnesses;
  bool thick_ok = true;
  std::optional<json> failure;
  bool ok() const { return projections_disjoint && density_identity && left_invariant && thick_ok; }
  json to_json(const GroupSpec& spec) const;
};

/// Checks disjoint projections, the density matrix, left-H-invariance for
/// h ∈ H ∩ B_h(e) on every point of B_W(e), and thickness witnesses.
ThickReport thick_verify(const ThickFamily& tf, Window window, std::int64_t h_radius);

}  // namespace ufh
