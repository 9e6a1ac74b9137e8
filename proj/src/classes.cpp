#include "ufh/classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

Rational ratio(std::size_t a, std::size_t b) {
  return make_rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
}

json ej(const GroupSpec& spec, const Element& g) { return spec.element_to_json(g); }

/// Largest word length on S_j; exact radius for ball families.
std::int64_t set_extent(const FolnerFamily& family, int j) {
  if (auto r = family.ball_radius(j)) return *r;
  return max_length(family.group(), family.set(j));
}

}  // namespace

// ---------------------------------------------------------------------------
// Growth profiles

std::vector<Rational> chain_sums(const BoundedFunction& c, const FolnerFamily& family,
                                 const std::vector<int>& indices) {
  std::vector<Rational> out(indices.size());
  const auto& g = family.group();
  if (!indices.empty() && family.ball_radius(indices.front())) {
    std::vector<std::pair<std::int64_t, std::size_t>> want;
    for (std::size_t i = 0; i < indices.size(); ++i) want.emplace_back(*family.ball_radius(indices[i]), i);
    std::sort(want.begin(), want.end());
    Rational acc = 0;
    std::int64_t done = -1;
    for (const auto& [radius, slot] : want) {
      for (; done < radius; ++done)
        for (const auto& x : g.metric().sphere(done + 1)) acc += c(g, x);
      out[slot] = acc;
    }
    return out;
  }
  for (std::size_t i = 0; i < indices.size(); ++i) out[i] = sum_over(g, c, family.set(indices[i]));
  return out;
}

GrowthTable beta_profile(const BoundedFunction& c, const FolnerFamily& family,
                         const std::vector<int>& indices, const std::string& chain_id) {
  auto t = sigma_profile(family, indices);
  t.chain = chain_id;
  std::vector<int> present;
  for (const auto& row : t.rows) present.push_back(row.j);
  std::vector<Rational> sums;
  try {
    sums = chain_sums(c, family, present);
  } catch (const BeyondWindow&) {
    // Fall back to one index at a time so the table keeps its exact prefix.
    for (std::size_t i = 0; i < present.size(); ++i) {
      try {
        sums.push_back(chain_sums(c, family, {present[i]}).front());
      } catch (const BeyondWindow&) {
        t.truncated = true;
        t.truncated_at = present[i];
        t.rows.resize(i);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto& row = t.rows[i];
    row.chain_sum = sums[i];
    row.beta = rabs(sums[i]) / static_cast<long>(row.size);
    row.beta_over_sigma = *row.beta / row.sigma;
  }
  return t;
}

GrowthTable beta_profile(const BoundedFunction& c, const FolnerFamily& family, int j_max,
                         const std::string& chain_id) {
  std::vector<int> idx;
  for (int j = family.first_index(); j <= j_max; ++j) idx.push_back(j);
  return beta_profile(c, family, idx, chain_id);
}

std::vector<int> log_spaced_indices(int lo, int hi, int count) {
  if (lo < 1 || hi < lo || count < 1) throw InvalidArgument("bad index range");
  std::vector<int> out;
  if (count == 1) return {hi};
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    const int v = static_cast<int>(std::lround(std::exp(a + (b - a) * i / (count - 1))));
    const int clamped = std::clamp(v, lo, hi);
    if (out.empty() || clamped > out.back()) out.push_back(clamped);
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Prec: return "prec";
    case Relation::Sim: return "sim";
    case Relation::Succ: return "succ";
    case Relation::Inconclusive: return "inconclusive";
  }
  return "?";
}

json ComparisonVerdict::to_json() const {
  json out{{"relation", to_string(relation)},
           {"label", label},
           {"tail_indices", tail_indices},
           {"tail_ratios", tail_ratios},
           {"non_increasing", non_increasing},
           {"non_decreasing", non_decreasing},
           {"log_slope", log_slope}};
  if (limit) out["limit"] = *limit;
  return out;
}

namespace {

struct TailStats {
  bool non_increasing = true;
  bool non_decreasing = true;
  double slope = 0.0;
  bool prec = false;
};

TailStats tail_stats(const std::vector<std::int64_t>& n, const std::vector<double>& r, double tol) {
  TailStats s;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i] > r[i - 1]) s.non_increasing = false;
    if (r[i] < r[i - 1]) s.non_decreasing = false;
  }
  const double first = r.front(), last = r.back();
  const double span = std::log(static_cast<double>(n.back()) / static_cast<double>(n.front()));
  if (last <= 0.0)
    s.slope = -std::numeric_limits<double>::infinity();
  else if (first <= 0.0 || span <= 0.0)
    s.slope = 0.0;
  else
    s.slope = std::log(last / first) / span;
  s.prec = s.non_increasing && last < first && (last < tol || s.slope < -tol);
  return s;
}

}  // namespace

ComparisonVerdict compare(const std::vector<std::int64_t>& n, const std::vector<double>& alpha,
                          const std::vector<double>& beta, ComparisonOptions opt) {
  if (n.size() != alpha.size() || n.size() != beta.size())
    throw InvalidArgument("compare needs equal index ranges");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(beta[i] > 0.0)) throw InvalidArgument("compare needs strictly positive β values");
    if (alpha[i] < 0.0) throw InvalidArgument("compare needs non-negative α values");
    if (n[i] < 1 || (i > 0 && n[i] <= n[i - 1]))
      throw InvalidArgument("compare needs strictly increasing positive indices");
  }
  ComparisonVerdict v;
  const int total = static_cast<int>(n.size());
  const int k = std::min(opt.max_tail, total / 2);
  if (k < 2) return v;

  const double hi = static_cast<double>(n.back());
  const double lo = std::max(static_cast<double>(n.front()), std::sqrt(hi));
  std::vector<std::size_t> picks;
  for (int m = 0; m < k; ++m) {
    const double target = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * m / (k - 1));
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double d = std::abs(std::log(static_cast<double>(n[i])) - std::log(target));
      if (d < best_d) best_d = d, best = i;
    }
    if (picks.empty() || best > picks.back()) picks.push_back(best);
  }
  if (picks.size() < 2) return v;

  std::vector<double> ra, rb;
  bool alpha_positive = true;
  for (auto i : picks) {
    v.tail_indices.push_back(n[i]);
    ra.push_back(alpha[i] / beta[i]);
    if (!(alpha[i] > 0.0)) alpha_positive = false;
  }
  v.tail_ratios = ra;
  const auto s = tail_stats(v.tail_indices, ra, opt.tolerance);
  v.non_increasing = s.non_increasing;
  v.non_decreasing = s.non_decreasing;
  v.log_slope = s.slope;
  if (s.prec) {
    v.relation = Relation::Prec;
    return v;
  }
  const double last = ra.back();
  if (last > 0.0 &&
      std::all_of(ra.begin(), ra.end(), [&](double x) { return std::abs(x - last) <= opt.tolerance * last; })) {
    v.relation = Relation::Sim;
    v.limit = last;
    return v;
  }
  if (alpha_positive) {
    for (auto i : picks) rb.push_back(beta[i] / alpha[i]);
    if (tail_stats(v.tail_indices, rb, opt.tolerance).prec) v.relation = Relation::Succ;
  }
  return v;
}

ComparisonVerdict compare(const std::vector<std::int64_t>& n, const std::vector<Rational>& alpha,
                          const std::vector<Rational>& beta, ComparisonOptions opt) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (beta[i] <= 0) throw InvalidArgument("compare needs strictly positive β values");
  for (const auto& q : alpha) a.push_back(to_double(q));
  for (const auto& q : beta) b.push_back(to_double(q));
  return compare(n, a, b, opt);
}

// ---------------------------------------------------------------------------
// Whyte witnesses

WhyteResult whyte_witness(const BoundedFunction& c, const FolnerFamily& family, int level, int budget) {
  if (level < 1) throw InvalidArgument("Whyte level must be at least 1");
  const auto& g = family.group();
  WhyteResult res;
  auto test = [&](FiniteSubset s, int j, const char* source) {
    ++res.examined;
    if (s.empty()) return false;
    const auto sum = sum_over(g, c, s);
    const auto bd = r_boundary(g, s, 1).size();
    if (rabs(sum) > Rational(static_cast<long>(level)) * static_cast<long>(bd)) {
      res = WhyteResult{true, j, source, std::move(s), sum, bd, res.examined};
      return true;
    }
    return false;
  };
  const auto b1 = g.metric().ball_bfs(1);
  for (int j = family.first_index(); j <= budget; ++j) {
    FiniteSubset s;
    try {
      s = family.set(j);
    } catch (const BeyondWindow&) {
      break;
    }
    if (test(s, j, "family")) return res;
    std::vector<Element> grown;
    for (const auto& x : s)
      if (c(g, x) != 0)
        for (const auto& y : b1) grown.push_back(g.compose(x, y));
    if (test(FiniteSubset(std::move(grown)), j, "support")) return res;
  }
  return res;
}

std::vector<BoundaryBoundRow> boundary_bound_check(const Group& group, const UfChain& b,
                                                   const std::vector<FiniteSubset>& test_sets) {
  if (b.degree() != 1) throw InvalidArgument("boundary_bound_check takes a degree-1 chain");
  const auto reach = std::max<std::int64_t>(b.span(), b.measured_span(group));
  const auto r = std::max<std::int64_t>(reach, 1);
  const auto db = boundary(b);
  const auto ball_r = static_cast<long>(group.metric().ball_size(r));
  std::vector<BoundaryBoundRow> out;
  for (const auto& s : test_sets) {
    BoundaryBoundRow row;
    row.set_size = s.size();
    for (const auto& [x, q] : db.entries())
      if (s.contains(x.front())) row.sum += q;
    const auto rim = static_cast<long>(r_boundary(group, s, r).size());
    row.bound = 2 * b.sup_norm() * ball_r * rim;
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse sets

std::vector<Rational> c_sigma_squared(const FolnerFamily& family, int j_max) {
  std::vector<Rational> out;
  const auto t = sigma_profile(family, j_max);
  for (const auto& row : t.rows) out.push_back(row.sigma * row.sigma);
  return out;
}

std::vector<Rational> c_power(int p, int j_max) {
  if (p < 1) throw InvalidArgument("power sequence exponent must be positive");
  std::vector<Rational> out;
  for (int j = 0; j <= j_max; ++j) {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), static_cast<unsigned long>(j + 1), static_cast<unsigned long>(p));
    out.emplace_back(mpz_class(1), d);
  }
  return out;
}

std::optional<std::int64_t> SparseSet::ring_threshold(std::int64_t r) const {
  std::optional<int> jstar;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->r > 2 * r)
      jstar = it->j;
    else
      break;
  }
  if (!jstar) return std::nullopt;
  // Beyond S_{j*-1}·B_r only rings l ≥ j* are visible, each r(l)-separated.
  if (*jstar == rows.front().j) return r;
  return row_extent.at(static_cast<std::size_t>(*jstar - 1 - rows.front().j)) + r;
}

std::int64_t SparseSet::max_r() const {
  std::int64_t m = 0;
  for (const auto& row : rows) m = std::max(m, row.r);
  return m;
}

namespace {

struct Assembly {
  FiniteSubset points;
  std::map<Element, int> ring;
  std::map<int, std::pair<std::size_t, std::size_t>> tiles;  // j -> (|T_j|, |T_{j-1}|)
};

class TilingCache {
 public:
  TilingCache(Group g, std::int64_t window) : g_(std::move(g)), w_(window) {}
  const Tiling& get(std::int64_t r) {
    auto it = cache_.find(r);
    if (it == cache_.end()) it = cache_.emplace(r, greedy_tiling(g_, r, Window{w_})).first;
    return it->second;
  }
  std::int64_t window() const { return w_; }

 private:
  Group g_;
  std::int64_t w_;
  std::map<std::int64_t, Tiling> cache_;
};

Assembly assemble(const std::vector<FiniteSubset>& sets, int first, const std::vector<std::int64_t>& rvals,
                  TilingCache& tilings) {
  Assembly a;
  std::vector<Element> pts;
  const auto add = [&](const FiniteSubset& s, int j) {
    for (const auto& p : s) {
      if (a.ring.emplace(p, j).second) pts.push_back(p);
    }
  };
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const int j = first + static_cast<int>(i);
    const auto& t = tilings.get(rvals[i]);
    const auto now = tiles_in(t, sets[i]);
    if (!now.exact) throw BeyondWindow("tiling window too small for S_" + std::to_string(j));
    if (i == 0) {
      add(now.tiles, j);
      a.tiles[j] = {now.tiles.size(), 0};
      continue;
    }
    const auto before = tiles_in(t, sets[i - 1]);
    add(set_difference(now.tiles, before.tiles), j);
    a.tiles[j] = {now.tiles.size(), before.tiles.size()};
  }
  a.points = FiniteSubset(std::move(pts));
  return a;
}

bool ratio_condition(std::size_t br, std::size_t b2r, std::size_t prev, std::size_t cur) {
  // |B_r| / (4|B_2r|) ≥ |S_{j-1}| / |S_j|
  return static_cast<unsigned __int128>(br) * cur >= static_cast<unsigned __int128>(4) * b2r * prev;
}

bool sqrt_c_condition(std::size_t b2r, const Rational& c) {
  // 1 / (4|B_2r|) ≥ √c  ⟺  16 |B_2r|² c ≤ 1
  const Rational b = static_cast<long>(b2r);
  return 16 * b * b * c <= 1;
}

}  // namespace

SparseSet sparse_construct(const FolnerFamily& family, const std::vector<Rational>& c, int j_max) {
  if (!family.has_star_radii()) throw InvalidArgument("not a nested family: " + family.name() + " has no star radii");
  const int first = family.first_index();
  if (j_max < first + 1) throw InvalidArgument("sparse construction needs j_max > first index");
  if (static_cast<int>(c.size()) < j_max - first + 1)
    throw InvalidArgument("c must have a value for every j in range");
  for (const auto& q : c)
    if (q <= 0) throw InvalidArgument("c must be positive");
  const auto& g = family.group();
  SparseSet out{g, SetRule::all(), {}, {}, {}, j_max};

  // Largest index whose set fits the enumeration cap.
  int j_eff = first;
  std::vector<FiniteSubset> sets;
  for (int j = first; j <= j_max; ++j) {
    try {
      sets.push_back(family.set(j));
      j_eff = j;
    } catch (const BeyondWindow&) {
      out.truncated = true;
      out.log.push_back("S_" + std::to_string(j) + " exceeds the enumeration cap; truncated at j=" +
                        std::to_string(j_eff));
      break;
    }
  }
  if (j_eff < first + 1) throw BeyondWindow("no ring fits the enumeration cap");

  const auto star = check_star_condition(family, j_eff);
  if (!star.passed)
    throw VerificationFailure("nesting condition fails at j=" + std::to_string(star.first_violation),
                              json{{"j", star.first_violation}}.dump());

  std::int64_t r_cap = 1;
  for (int j = first + 1; j <= j_eff; ++j) r_cap = std::max(r_cap, family.star_radius(j));
  const auto extent = set_extent(family, j_eff);
  TilingCache tilings(g, std::max(extent + r_cap, 2 * r_cap));
  out.tiling_window = tilings.window();

  auto& metric = g.metric();
  std::vector<std::int64_t> rvals;
  for (int j = first; j <= j_eff; ++j) {
    const auto i = static_cast<std::size_t>(j - first);
    SparseRow row;
    row.j = j;
    row.c = c[i];
    row.set_size = sets[i].size();
    if (j == first) {
      row.r = 1;
      row.binding = "initial";
      rvals.push_back(1);
      out.rows.push_back(row);
      out.row_extent.push_back(set_extent(family, j));
      continue;
    }
    const auto cap = family.star_radius(j);
    std::string blocked_above = "cap";
    std::optional<std::int64_t> chosen;
    for (std::int64_t r = cap; r >= 1; --r) {
      const auto br = metric.ball_size(r);
      const auto b2r = metric.ball_size(2 * r);
      std::string reason;
      if (!ratio_condition(br, b2r, sets[i - 1].size(), sets[i].size())) {
        reason = "ratio";
      } else if (!sqrt_c_condition(b2r, c[i])) {
        reason = "sqrt_c";
      } else {
        const auto idx = tiling_index(tilings.get(r), family, j_eff);
        if (!idx.l || *idx.l > j) reason = "tiling_index";
        else row.tiling_index = idx.l;
      }
      if (reason.empty()) {
        chosen = r;
        break;
      }
      blocked_above = reason;
    }
    if (chosen) {
      row.r = *chosen;
      row.binding = *chosen == cap ? "cap" : blocked_above;
    } else {
      row.r = 1;
      row.fallback = true;
      row.binding = "fallback";
    }
    const auto br = metric.ball_size(row.r);
    const auto b2r = metric.ball_size(2 * row.r);
    row.ratio_ok = ratio_condition(br, b2r, sets[i - 1].size(), sets[i].size());
    row.sqrt_c_ok = sqrt_c_condition(b2r, c[i]);
    if (!row.tiling_index) row.tiling_index = tiling_index(tilings.get(row.r), family, j_eff).l;
    row.index_ok = row.tiling_index && *row.tiling_index <= j;
    rvals.push_back(row.r);
    out.rows.push_back(row);
    out.row_extent.push_back(set_extent(family, j));
    out.log.push_back("j=" + std::to_string(j) + " r=" + std::to_string(row.r) + " (" + row.binding + ")");
  }

  auto a = assemble(sets, first, rvals, tilings);
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    auto& row = out.rows[i];
    const auto inside = set_intersection(a.points, sets[i]);
    row.density = ratio(inside.size(), sets[i].size());
    row.ring_bound = Rational(1) / (4 * static_cast<long>(metric.ball_size(2 * row.r)));
    row.tiles_now = a.tiles[row.j].first;
    row.tiles_before = a.tiles[row.j].second;
    for (const auto& p : inside)
      if (a.ring.at(p) == row.j) ++row.ring_points;
  }

  out.known_radius = family.ball_radius(j_eff) ? extent : 3 * family.star_radius(j_eff);
  json rj = json::array(), cj = json::array(), star_j = json::array();
  for (std::size_t i = 0; i < rvals.size(); ++i) {
    rj.push_back(rvals[i]);
    cj.push_back(rational_to_json(c[i]));
  }
  for (int j = first + 1; j <= j_eff; ++j) star_j.push_back(family.star_radius(j));
  json payload{{"family", family.to_json()}, {"first", first}, {"j_max", j_eff},
               {"r", rj},  {"c", cj}, {"star_radii", star_j}, {"tiling_window", out.tiling_window}};
  out.points = a.points;
  out.ring = std::move(a.ring);
  out.j_max = j_eff;
  out.rule = SetRule::materialized("sparse", out.points, out.known_radius, payload);
  return out;
}

FiniteSubset rederive_sparse(const json& payload) {
  const auto family = FolnerFamily::from_json(payload.at("family"));
  const int first = payload.at("first").get<int>();
  const int j_max = payload.at("j_max").get<int>();
  std::vector<std::int64_t> rvals = payload.at("r").get<std::vector<std::int64_t>>();
  if (static_cast<int>(rvals.size()) != j_max - first + 1) throw InvalidArgument("sparse payload is inconsistent");
  std::vector<FiniteSubset> sets;
  for (int j = first; j <= j_max; ++j) sets.push_back(family.set(j));
  TilingCache tilings(family.group(), payload.at("tiling_window").get<std::int64_t>());
  return assemble(sets, first, rvals, tilings).points;
}

bool SparseCertificate::valid() const {
  return std::all_of(rows.begin(), rows.end(), [](const SparseCertRow& r) { return r.ok; });
}

json SparseCertificate::to_json() const {
  json rs = json::array();
  for (const auto& r : rows) {
    json row{{"r", r.r}, {"C_obs", r.c_obs}, {"C_all", r.c_all}, {"imposed", r.imposed},
             {"vacuous", r.vacuous}, {"ok", r.ok}};
    row["R"] = r.threshold ? json(*r.threshold) : json(nullptr);
    rs.push_back(row);
  }
  return {{"C", claimed_c}, {"window", window}, {"rows", rs}, {"valid", valid()}};
}

SparseCertificate sparse_verify(const Group& group, const SetRule& gamma,
                                const std::vector<std::int64_t>& r_list, Window window, int claimed_c,
                                const std::map<std::int64_t, std::int64_t>& thresholds) {
  SparseCertificate cert;
  cert.claimed_c = claimed_c;
  cert.window = window.radius;
  const auto members = gamma.members_in_ball(group, window.radius);
  auto& metric = group.metric();
  for (auto r : r_list) {
    if (r < 1) throw InvalidArgument("sparse radii must be positive");
    SparseCertRow row;
    row.r = r;
    const auto top = window.interior(r);
    if (top < 0) {
      row.vacuous = true;
      row.ok = false;
      cert.rows.push_back(row);
      continue;
    }
    std::unordered_map<Element, int, ElementHash> counts;
    const auto offsets = metric.ball_bfs(r);
    for (const auto& p : members)
      for (const auto& x : offsets) ++counts[group.compose(p, x)];
    row.layer_max.assign(static_cast<std::size_t>(top + 1), 0);
    for (std::int64_t len = 0; len <= top; ++len) {
      int m = 0;
      for (const auto& g : metric.sphere(len)) {
        auto it = counts.find(g);
        if (it != counts.end()) m = std::max(m, it->second);
      }
      row.layer_max[static_cast<std::size_t>(len)] = m;
      row.c_all = std::max(row.c_all, m);
    }
    // suffix[R] = max over layers R+1..top.
    std::vector<int> suffix(static_cast<std::size_t>(top + 2), 0);
    for (std::int64_t len = top; len >= 0; --len)
      suffix[static_cast<std::size_t>(len)] =
          std::max(suffix[static_cast<std::size_t>(len + 1)], row.layer_max[static_cast<std::size_t>(len)]);
    const auto beyond = [&](std::int64_t big_r) {
      return big_r + 1 > top ? 0 : suffix[static_cast<std::size_t>(big_r + 1)];
    };
    if (auto it = thresholds.find(r); it != thresholds.end()) {
      row.imposed = true;
      row.threshold = it->second;
      row.vacuous = it->second >= top;
      row.c_obs = beyond(std::max<std::int64_t>(it->second, 0));
      row.ok = row.c_obs <= claimed_c;
    } else {
      std::int64_t big_r = 0;
      while (big_r < top && beyond(big_r) > claimed_c) ++big_r;
      row.threshold = big_r;
      row.c_obs = beyond(big_r);
      row.vacuous = big_r >= top;
      row.ok = !row.vacuous && row.c_obs <= claimed_c;
    }
    cert.rows.push_back(std::move(row));
  }
  return cert;
}

std::vector<DecayRow> invisibility_decay(const Group& group, const SetRule& gamma, const FolnerFamily& family,
                                         const std::vector<int>& indices, const SparseCertificate& cert) {
  std::vector<DecayRow> out;
  auto& metric = group.metric();
  for (int j : indices) {
    DecayRow row;
    row.j = j;
    FiniteSubset s;
    std::size_t hits = 0;
    try {
      s = family.set(j);
      for (const auto& p : s)
        if (gamma.contains(group, p)) ++hits;
    } catch (const BeyondWindow&) {
      break;
    }
    row.beta = ratio(hits, s.size());
    const auto ext = set_extent(family, j);
    for (const auto& cr : cert.rows) {
      if (!cr.ok || cr.vacuous || !cr.threshold) continue;
      if (ext + cr.r > cert.window - cr.r) continue;
      const auto big_r = *cr.threshold;
      const Rational br = static_cast<long>(metric.ball_size(cr.r));
      const Rational rim = static_cast<long>(r_boundary(group, s, cr.r).size());
      const Rational size = static_cast<long>(s.size());
      const Rational inner = static_cast<long>(gamma.members_in_ball(group, big_r + cr.r).size());
      const Rational ball_big = static_cast<long>(metric.ball_size(big_r));
      const Rational bound = Rational(cert.claimed_c) / br * (1 + rim / size) + ball_big * inner / (br * size);
      row.bounds.emplace(cr.r, bound);
      if (row.beta > bound) row.ok = false;
    }
    out.push_back(std::move(row));
  }
  return out;
}

IterationReport iterate_sparse(const FolnerFamily& family, int j_max, int depth) {
  IterationReport rep;
  const auto sigma = sigma_profile(family, j_max);
  std::vector<Rational> c;
  for (const auto& row : sigma.rows) c.push_back(row.sigma);
  std::vector<std::int64_t> n;
  std::vector<Rational> prev;
  for (const auto& row : sigma.rows)
    if (row.j >= 1) {
      n.push_back(row.j);
      prev.push_back(row.sigma);
    }
  for (int step = 0; step < depth; ++step) {
    std::optional<SparseSet> built;
    try {
      built = sparse_construct(family, c, j_max);
    } catch (const BeyondWindow& e) {
      rep.stop_reason = e.what();
      break;
    }
    auto& s = *built;
    auto beta = beta_profile(BoundedFunction::indicator(s.rule), family, s.j_max, "gamma_" + std::to_string(step));
    std::vector<Rational> next;
    std::vector<Rational> cn;
    bool positive = true;
    for (const auto& row : beta.rows) {
      cn.push_back(*row.beta);
      if (*row.beta <= 0) positive = false;
      if (row.j >= 1) next.push_back(*row.beta);
    }
    if (next.size() == prev.size()) {
      try {
        rep.verdicts.push_back(compare(n, prev, next));
      } catch (const InvalidArgument&) {
        rep.verdicts.push_back(ComparisonVerdict{});
      }
    }
    rep.steps.push_back(IterationStep{step, std::move(s), c, std::move(beta)});
    rep.depth_reached = step + 1;
    if (!positive) {
      rep.stop_reason = "β vanishes at some index; it cannot serve as the next sequence c";
      break;
    }
    c = std::move(cn);
    prev = std::move(next);
  }
  if (rep.stop_reason.empty()) rep.stop_reason = "depth reached";
  return rep;
}

IndependenceReport independence_matrix(const std::vector<BoundedFunction>& functions,
                                       const std::vector<std::string>& names, const FolnerFamily& family,
                                       const std::vector<int>& indices, ComparisonOptions opt) {
  if (functions.empty()) throw InvalidArgument("independence needs at least one function");
  IndependenceReport rep;
  rep.names = names;
  const auto sigma = sigma_profile(family, indices);
  if (sigma.truncated) throw BeyondWindow("Følner sets exceed the enumeration cap");
  std::vector<Rational> sig;
  for (const auto& row : sigma.rows) {
    rep.indices.push_back(row.j);
    sig.push_back(row.sigma);
  }
  std::vector<std::vector<Rational>> betas;
  for (const auto& f : functions) {
    auto sums = chain_sums(f, family, indices);
    std::vector<Rational> b;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (sums[i] == 0) throw InvalidArgument("zero chain sum at j=" + std::to_string(indices[i]));
      b.push_back(rabs(sums[i]) / static_cast<long>(sigma.rows[i].size));
    }
    rep.sums.push_back(std::move(sums));
    betas.push_back(std::move(b));
  }
  const auto last = rep.sums.front().size() - 1;
  for (const auto& si : rep.sums) {
    std::vector<Rational> row;
    for (const auto& sk : rep.sums) row.push_back(si[last] / sk[last]);
    rep.matrix.push_back(std::move(row));
  }
  rep.chain.push_back(compare(rep.indices, sig, betas.front(), opt));
  for (std::size_t i = 0; i + 1 < betas.size(); ++i) rep.chain.push_back(compare(rep.indices, betas[i], betas[i + 1], opt));
  rep.ordered = std::all_of(rep.chain.begin(), rep.chain.end(),
                            [](const ComparisonVerdict& v) { return v.relation == Relation::Prec; });
  return rep;
}

// ---------------------------------------------------------------------------
// Thick families

Element separate_search(const Group& group, const SubgroupSpec& h, const FiniteSubset& t,
                        const FiniteSubset& t_prime, std::int64_t budget) {
  if (t_prime.empty() || t.empty()) return group.identity();
  std::unordered_set<Element, ElementHash> blocked;
  for (const auto& x : t_prime) blocked.insert(h.rep(x));
  auto& metric = group.metric();
  for (std::int64_t len = 0; len <= budget; ++len) {
    for (const auto& g : metric.sphere(len)) {
      bool clear = true;
      for (const auto& x : t) {
        if (blocked.contains(h.rep(group.compose(x, g)))) {
          clear = false;
          break;
        }
      }
      if (clear) return g;
    }
  }
  throw BeyondWindow("separation search exhausted B_" + std::to_string(budget) + "(e); window too small");
}

FiniteSubset ThickFamily::tile_set(const ThickTile& t) const {
  std::vector<Element> pts;
  for (const auto& x : group.metric().ball_bfs(t.l)) pts.push_back(group.compose(x, t.translator));
  return FiniteSubset(std::move(pts));
}

SetRule ThickFamily::union_rule(int k) const {
  std::vector<Element> pts;
  for (const auto& t : tiles)
    if (t.k == k)
      for (const auto& p : tile_set(t)) pts.push_back(p);
  return SetRule::coset_union(subgroup, FiniteSubset(std::move(pts)));
}

const ThickTile& ThickFamily::tile(int k, int l) const {
  for (const auto& t : tiles)
    if (t.k == k && t.l == l) return t;
  throw InvalidArgument("no tile A^" + std::to_string(k) + "_" + std::to_string(l));
}

json ThickFamily::to_json() const {
  const auto& spec = group.spec();
  json ts = json::array();
  for (const auto& t : tiles) ts.push_back({{"k", t.k}, {"l", t.l}, {"translator", ej(spec, t.translator)}});
  return {{"group", spec.to_json()}, {"subgroup", subgroup.to_json()}, {"families", families},
          {"depth", depth},          {"tiles", ts},                      {"log", log}};
}

ThickFamily ThickFamily::from_json(const json& j) {
  Group g(GroupSpec::from_json(j.at("group")));
  ThickFamily tf{g, SubgroupSpec::from_json(g.spec(), j.at("subgroup")), j.at("families").get<int>(),
                 j.at("depth").get<int>()};
  for (const auto& t : j.at("tiles"))
    tf.tiles.push_back({t.at("k").get<int>(), t.at("l").get<int>(), g.spec().element_from_json(t.at("translator"))});
  if (j.contains("log")) tf.log = j.at("log").get<std::vector<std::string>>();
  return tf;
}

ThickFamily thick_construct(const Group& group, const SubgroupSpec& h, int families, int depth,
                            std::int64_t budget) {
  if (families < 1 || depth < 1) throw InvalidArgument("thick families need n ≥ 1 and L ≥ 1");
  if (!(h.ambient() == group.spec())) throw ModelMismatch("subgroup belongs to another group");
  ThickFamily tf{group, h, families, depth};
  FiniteSubset used;
  for (int l = 1; l <= depth; ++l) {
    const auto bl = ball(group, l);
    for (int k = 1; k <= families; ++k) {
      const auto g = separate_search(group, h, bl, used, budget);
      ThickTile t{k, l, g};
      tf.tiles.push_back(t);
      used = set_union(used, tf.tile_set(t));
      tf.log.push_back("l=" + std::to_string(l) + " k=" + std::to_string(k) + " g=" + to_string(g));
    }
  }
  return tf;
}

json ThickReport::to_json(const GroupSpec& spec) const {
  json d = json::array();
  for (const auto& a : density) {
    json m = json::array();
    for (const auto& b : a) {
      json row = json::array();
      for (const auto& q : b) row.push_back(rational_to_json(q));
      m.push_back(row);
    }
    d.push_back(m);
  }
  json w = json::array();
  for (const auto& per_k : witnesses) {
    json row = json::array();
    for (const auto& g : per_k) row.push_back(g ? ej(spec, *g) : json(nullptr));
    w.push_back(row);
  }
  json out{{"projections_disjoint", projections_disjoint},
           {"density", d},
           {"density_identity", density_identity},
           {"left_invariant", left_invariant},
           {"invariance_radius", invariance_radius},
           {"invariance_checks", invariance_checks},
           {"thickness_witnesses", w},
           {"thick_ok", thick_ok},
           {"ok", ok()}};
  if (failure) out["failure"] = *failure;
  return out;
}

ThickReport thick_verify(const ThickFamily& tf, Window window, std::int64_t h_radius) {
  ThickReport rep;
  const auto& g = tf.group;
  const auto& spec = g.spec();
  const auto& h = tf.subgroup;
  const auto note = [&](json f) {
    if (!rep.failure) rep.failure = std::move(f);
  };

  std::vector<FiniteSubset> sets;
  for (const auto& t : tf.tiles) sets.push_back(tf.tile_set(t));

  // Exhaustive projection disjointness.
  std::map<Element, std::size_t> owner;
  for (std::size_t i = 0; i < tf.tiles.size() && rep.projections_disjoint; ++i) {
    std::set<Element> proj;
    for (const auto& p : sets[i]) proj.insert(h.rep(p));
    for (const auto& q : proj) {
      auto [it, fresh] = owner.emplace(q, i);
      if (!fresh) {
        rep.projections_disjoint = false;
        const auto& a = tf.tiles[it->second];
        const auto& b = tf.tiles[i];
        note({{"check", "projections_disjoint"},
              {"coset_rep", ej(spec, q)},
              {"tiles", json::array({json::array({a.k, a.l}), json::array({b.k, b.l})})}});
        break;
      }
    }
  }

  std::vector<SetRule> unions;
  for (int k = 1; k <= tf.families; ++k) unions.push_back(tf.union_rule(k));

  rep.density.assign(static_cast<std::size_t>(tf.families),
                     std::vector<std::vector<Rational>>(static_cast<std::size_t>(tf.families),
                                                        std::vector<Rational>(static_cast<std::size_t>(tf.depth))));
  for (int j = 1; j <= tf.families; ++j) {
    for (std::size_t i = 0; i < tf.tiles.size(); ++i) {
      const auto& t = tf.tiles[i];
      if (t.k < 1 || t.k > tf.families || t.l < 1 || t.l > tf.depth) continue;
      std::size_t hits = 0;
      for (const auto& p : sets[i])
        if (unions[static_cast<std::size_t>(j - 1)].contains(g, p)) ++hits;
      const auto d = ratio(hits, sets[i].size());
      rep.density[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(t.k - 1)][static_cast<std::size_t>(t.l - 1)] = d;
      const Rational expect = j == t.k ? 1 : 0;
      if (d != expect) {
        rep.density_identity = false;
        note({{"check", "density_identity"}, {"j", j}, {"k", t.k}, {"l", t.l}, {"density", rational_to_json(d)}});
      }
    }
  }

  rep.invariance_radius = h_radius;
  const auto hs = h.elements_in_ball(g, h_radius);
  for (const auto& x : g.metric().ball_bfs(window.radius)) {
    for (std::size_t k = 0; k < unions.size(); ++k) {
      const bool base = unions[k].contains(g, x);
      for (const auto& y : hs) {
        ++rep.invariance_checks;
        if (unions[k].contains(g, g.compose(y, x)) != base) {
          rep.left_invariant = false;
          note({{"check", "left_invariant"}, {"k", k + 1}, {"point", ej(spec, x)}, {"by", ej(spec, y)}});
        }
      }
    }
  }

  rep.witnesses.assign(static_cast<std::size_t>(tf.families),
                       std::vector<std::optional<Element>>(static_cast<std::size_t>(tf.depth)));
  for (int k = 1; k <= tf.families; ++k) {
    for (int r = 1; r <= tf.depth; ++r) {
      const auto br = g.metric().ball_bfs(r);
      for (const auto& t : tf.tiles) {
        if (t.k != k || t.l < r) continue;
        const bool inside = std::all_of(br.begin(), br.end(), [&](const Element& x) {
          return unions[static_cast<std::size_t>(k - 1)].contains(g, g.compose(x, t.translator));
        });
        if (inside) {
          rep.witnesses[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r - 1)] = t.translator;
          break;
        }
      }
      if (!rep.witnesses[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(r - 1)]) {
        rep.thick_ok = false;
        note({{"check", "thickness"}, {"k", k}, {"r", r}});
      }
    }
  }
  return rep;
}

}  // namespace ufh
