// Acceptance run: one PASS/FAIL line per criterion.  Every tolerance and
// time limit is a named constant below.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "support.hpp"
#include "ufh/classes.hpp"
#include "ufh/cli.hpp"
#include "ufh/errors.hpp"
#include "ufh/io.hpp"

using namespace ufh;
using ufh::testing::Rng;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double kCompareTolerance = 0.05;

constexpr double kLimitChainComplex = 10.0;
constexpr double kLimitRho = 10.0;
constexpr double kLimitTransfer = 5.0;
constexpr double kLimitTiling = 60.0;
constexpr double kLimitSparseZ = 120.0;
constexpr double kLimitSparseZ2 = 300.0;
constexpr double kLimitIndependence = 60.0;
constexpr double kLimitThick = 120.0;

// Heisenberg balls r ≤ 8 from an independent brute-force BFS over
// unitriangular matrices, frozen after the first run.
constexpr std::size_t kHeisBalls[] = {1, 5, 17, 53, 135, 299, 593, 1069, 1793};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body, double limit = 0) {
  Timer t;
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double s = t.seconds();
  if (limit > 0 && s >= limit) {
    o.pass = false;
    o.detail += " (time limit exceeded)";
  }
  if (!o.pass) ++failures;
  std::printf("C%02d %s  %-58s %7.2fs", id, o.pass ? "PASS" : "FAIL", title.c_str(), s);
  if (limit > 0) std::printf(" (< %.0fs)", limit);
  std::printf("  %s\n", o.detail.c_str());
  for (const auto& n : o.notes) std::printf("      %s\n", n.c_str());
  std::fflush(stdout);
}

std::string q(const Rational& x) { return x.get_str(); }

// ---------------------------------------------------------------------------

Outcome chain_complex() {
  Rng rng(kSeed);
  int checked = 0, bad = 0;
  const auto groups = ufh::testing::small_groups();
  for (int i = 0; i < 200; ++i) {
    const auto& g = groups[static_cast<std::size_t>(i % 3)];
    const int degree = 1 + (i / 3) % 3;
    const auto span = ufh::testing::uniform(rng, 0, 4);
    const auto c = ufh::testing::random_chain(g, rng, degree, span, 6);
    if (c.measured_span(g) > 4) ++bad;
    if (degree == 1) {
      // Degree 1: the augmentation of ∂c vanishes.
      Rational total = 0;
      const auto b = boundary(c);
      for (const auto& [x, coeff] : b.entries()) total += coeff;
      if (total != 0) ++bad;
    } else if (!boundary(boundary(c)).empty()) {
      ++bad;
    }
    ++checked;
  }
  return {bad == 0, std::to_string(checked) + " chains, " + std::to_string(bad) + " violations"};
}

Outcome rho_iso() {
  Rng rng(kSeed + 1);
  const auto groups = ufh::testing::small_groups();
  int bad = 0, n = 0;
  for (int degree = 0; degree <= 2; ++degree)
    for (int i = 0; i < 50; ++i) {
      const auto& g = groups[static_cast<std::size_t>(i % 3)];
      const auto c = ufh::testing::random_chain(g, rng, degree, 4, 5);
      const auto l = rho(g, c);
      if (!(rho_inv(g, l) == c)) ++bad;
      if (degree >= 1 && !(rho_inv(g, boundary(g, l)) == boundary(c))) ++bad;
      ++n;
    }
  return {bad == 0, std::to_string(n) + " chains, " + std::to_string(bad) + " violations"};
}

Outcome transfer_left_inverse() {
  Rng rng(kSeed + 2);
  Group z2(GroupSpec::int_lattice(2));
  const FolnerFamily cubes(z2, FolnerKind::Cubes);
  int bad = 0;
  for (int j = 1; j <= 20; ++j) {
    const ApproxMean mean(cubes, j);
    for (int degree = 0; degree <= 2; ++degree) {
      const auto c = normalize(z2, ufh::testing::random_chain(z2, rng, degree, 4, 4));
      if (!(transfer(z2, i_star(z2, c), mean) == c)) ++bad;
    }
  }
  return {bad == 0, "j = 1..20, degrees 0..2, " + std::to_string(bad) + " violations"};
}

Outcome mean_invariance() {
  Rng rng(kSeed + 3);
  Group z2(GroupSpec::int_lattice(2));
  const FolnerFamily balls(z2, FolnerKind::Balls);
  int bad = 0;
  Rational worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int j = static_cast<int>(ufh::testing::uniform(rng, 1, 12));
    const auto phi = ufh::testing::random_table(z2, rng, 10, 8) +
                     ufh::testing::random_coefficient(rng) * BoundedFunction::indicator(SetRule::half_space(1, 0));
    const auto g = ufh::testing::random_element(z2, rng, 4);
    const auto chk = right_translation_check(phi, g, ApproxMean(balls, j));
    if (!chk.holds()) ++bad;
    if (chk.bound > 0) worst = std::max(worst, Rational(chk.deviation / chk.bound));
  }
  return {bad == 0, "100 triples, max deviation/bound = " + q(worst)};
}

Outcome metric_regression() {
  Group z(GroupSpec::int_lattice(1)), z2(GroupSpec::int_lattice(2)), h(GroupSpec::heisenberg3());
  int bad = 0;
  for (std::int64_t r = 0; r <= 20; ++r) {
    bad += z.metric().ball_size(r) != static_cast<std::size_t>(2 * r + 1);
    bad += z2.metric().ball_size(r) != static_cast<std::size_t>(2 * r * r + 2 * r + 1);
  }
  for (int r = 0; r <= 8; ++r) bad += h.metric().ball_size(r) != kHeisBalls[r];
  return {bad == 0, "Z, Z2 r <= 20; Heis3 r <= 8; " + std::to_string(bad) + " mismatches"};
}

Outcome tiling_bounds() {
  Outcome o;
  Group z(GroupSpec::int_lattice(1));
  const auto t1 = greedy_tiling(z, 1, Window{30});
  std::vector<Element> three;
  for (int x = -30; x <= 30; x += 3) three.push_back(z.make({x}));
  if (!(t1.centers == FiniteSubset(three))) {
    o.pass = false;
    o.notes.push_back("greedy 1-tiling of Z on window 30 differs from 3Z");
  }
  struct Case {
    int d;
    FolnerKind kind;
    int j_max;
  };
  const Case cases[] = {{1, FolnerKind::Balls, 300}, {1, FolnerKind::Cubes, 300},
                        {2, FolnerKind::Balls, 50},  {2, FolnerKind::Cubes, 50}};
  int rows = 0;
  for (const auto& c : cases) {
    Group g(GroupSpec::int_lattice(c.d));
    const FolnerFamily fam(g, c.kind);
    const auto extent = max_length(g, fam.set(c.j_max));
    for (std::int64_t r = 1; r <= 3; ++r) {
      const auto t = greedy_tiling(g, r, Window{extent + r});
      const auto idx = tiling_index(t, fam, c.j_max);
      std::ostringstream tag;
      tag << "Z" << c.d << " " << to_string(c.kind) << " r=" << r;
      if (!idx.l) {
        o.pass = false;
        o.notes.push_back(tag.str() + ": bound not attained in range");
        continue;
      }
      for (const auto& row : idx.rows) {
        if (row.j < *idx.l) continue;
        ++rows;
        if (!row.exact || !row.within()) {
          o.pass = false;
          o.notes.push_back(tag.str() + ": j=" + std::to_string(row.j) + " density " + q(row.density));
        }
      }
      o.notes.push_back(tag.str() + ": l = " + std::to_string(*idx.l));
    }
  }
  o.detail = std::to_string(rows) + " rows with j >= l checked; 3Z tiling " +
             (t1.centers == FiniteSubset(three) ? "exact" : "WRONG");
  return o;
}

Outcome sparse_pipeline(int d, int j_max) {
  Outcome o;
  Group g(GroupSpec::int_lattice(d));
  const FolnerFamily sg(g, FolnerKind::SuperGeometricBalls);
  const auto c = c_sigma_squared(sg, j_max);
  const auto s = sparse_construct(sg, c, j_max);
  std::string rs;
  for (const auto& row : s.rows) rs += (rs.empty() ? "" : ",") + std::to_string(row.r);
  o.notes.push_back("r(j,c) = [" + rs + "], |Gamma| = " + std::to_string(s.points.size()) + " on B_" +
                    std::to_string(s.known_radius));

  // Sparseness beyond the ring threshold.
  std::vector<std::int64_t> radii;
  std::map<std::int64_t, std::int64_t> thresholds;
  for (std::int64_t r = 1; 2 * r < s.max_r(); ++r) {
    radii.push_back(r);
    thresholds[r] = *s.ring_threshold(r);
  }
  if (radii.empty()) {
    o.notes.push_back("no r with 2r < max r(j,c): the sparseness check is vacuous");
  } else {
    const auto cert = sparse_verify(g, s.rule, radii, Window{s.known_radius}, 2, thresholds);
    int worst = 0;
    for (const auto& row : cert.rows) worst = std::max(worst, row.c_obs);
    if (!cert.valid()) o.pass = false;
    o.notes.push_back("sparse_verify: r = 1.." + std::to_string(radii.back()) + ", max C_obs = " +
                      std::to_string(worst) + (cert.valid() ? " <= 2" : " > 2"));
  }

  // β_{Γ_c}(j) ≥ √c(j), compared as β² ≥ c.
  std::vector<int> idx;
  for (int j = 1; j <= s.j_max; ++j) idx.push_back(j);
  const auto beta = beta_profile(BoundedFunction::indicator(s.rule), sg, idx);
  for (const auto& row : beta.rows) {
    const auto& cj = c[static_cast<std::size_t>(row.j)];
    const bool ok = (*row.beta) * (*row.beta) >= cj;
    if (!ok) o.pass = false;
    o.notes.push_back("j=" + std::to_string(row.j) + ": beta = " + q(*row.beta) + ", sqrt c = sigma = " +
                      q(row.sigma) + (ok ? "  ok" : "  beta < sqrt c"));
  }
  o.detail = o.pass ? "construction, sparseness and ring density hold"
                    : "ring density below sqrt c at some j (see notes)";
  return o;
}

Outcome iterated_independence() {
  Group z(GroupSpec::int_lattice(1));
  const FolnerFamily balls(z, FolnerKind::Balls);
  const std::vector<BoundedFunction> fs{BoundedFunction::indicator(SetRule::powers(3)),
                                        BoundedFunction::indicator(SetRule::powers(2)),
                                        BoundedFunction::indicator(SetRule::powers(1))};
  ComparisonOptions opt;
  opt.tolerance = kCompareTolerance;
  const auto rep = independence_matrix(fs, {"n^3", "n^2", "n^1"}, balls, log_spaced_indices(1, 1000000, 60), opt);
  Outcome o;
  o.pass = rep.ordered;
  const char* pairs[] = {"sigma vs beta_3", "beta_3 vs beta_2", "beta_2 vs beta_1"};
  for (std::size_t i = 0; i < rep.chain.size(); ++i) {
    std::ostringstream s;
    s << pairs[i] << ": " << to_string(rep.chain[i].relation) << ", log-log slope " << rep.chain[i].log_slope;
    o.notes.push_back(s.str());
  }
  o.detail = rep.ordered ? "sigma < beta_3 < beta_2 < beta_1 on j <= 10^6 (finite-range evidence)"
                         : "chain not ordered";
  return o;
}

Outcome whyte() {
  Outcome o;
  Group z(GroupSpec::int_lattice(1));
  const FolnerFamily balls(z, FolnerKind::Balls);
  const auto one = BoundedFunction::constant(1);
  int failed_levels = 0;
  for (int n = 1; n <= 50; ++n) {
    const auto w = whyte_witness(one, balls, n, 200);
    const auto big = balls.set(100 * n + 1);
    const auto sum = sum_over(z, one, big);
    const auto bd = r_boundary(z, big, 1).size();
    if (!w.found || !(sum > Rational(n) * static_cast<long>(bd))) ++failed_levels;
  }
  if (failed_levels > 0) o.pass = false;

  // δ_e over every interval of length ≤ 100 meeting e.
  const auto delta = BoundedFunction::delta(z.identity());
  Rational worst = 0;
  std::size_t intervals = 0;
  for (std::int64_t len = 1; len <= 100; ++len)
    for (std::int64_t a = -len + 1; a <= 0; ++a) {
      std::vector<Element> pts;
      for (std::int64_t x = a; x < a + len; ++x) pts.push_back(z.make({x}));
      const FiniteSubset s(pts);
      const Rational ratio = rabs(sum_over(z, delta, s)) / static_cast<long>(r_boundary(z, s, 1).size());
      worst = std::max(worst, ratio);
      ++intervals;
    }
  if (worst > make_rational(1, 2)) o.pass = false;

  Rng rng(kSeed + 9);
  Group z2(GroupSpec::int_lattice(2));
  const FolnerFamily cubes(z2, FolnerKind::Cubes);
  std::vector<FiniteSubset> boxes;
  for (int j = 1; j <= 10; ++j) boxes.push_back(cubes.set(j));
  int bound_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto b = ufh::testing::random_chain(z2, rng, 1, ufh::testing::uniform(rng, 1, 3), 8, 6);
    for (const auto& row : boundary_bound_check(z2, b, boxes)) bound_bad += !row.ok();
  }
  if (bound_bad > 0) o.pass = false;
  o.detail = "chi_G levels 1..50 failed: " + std::to_string(failed_levels) + "; delta_e max ratio " + q(worst) +
             " over " + std::to_string(intervals) + " intervals; boundary bound violations: " +
             std::to_string(bound_bad);
  return o;
}

struct ThickCase {
  ThickFamily family;
  ThickReport report;
  std::int64_t window;
};

std::vector<ThickCase> thick_cases;

Outcome thick_families() {
  Outcome o;
  Group z2(GroupSpec::int_lattice(2));
  Group h3(GroupSpec::heisenberg3());
  struct Setup {
    Group g;
    SubgroupSpec h;
    int n, depth;
  };
  const Setup setups[] = {{z2, SubgroupSpec::coordinate(z2.spec(), {1}), 3, 4},
                          {h3, SubgroupSpec::heisenberg_center(), 2, 2}};
  for (const auto& st : setups) {
    auto tf = thick_construct(st.g, st.h, st.n, st.depth);
    std::int64_t extent = 0;
    for (const auto& t : tf.tiles) extent = std::max(extent, max_length(st.g, tf.tile_set(t)));
    const auto window = extent + 2;
    auto rep = thick_verify(tf, Window{window}, 10);
    bool identity = rep.density.size() == static_cast<std::size_t>(st.n);
    for (std::size_t j = 0; j < rep.density.size(); ++j)
      for (std::size_t k = 0; k < rep.density[j].size(); ++k)
        for (const auto& d : rep.density[j][k]) identity = identity && d == (j == k ? 1 : 0);
    bool witnesses = true;
    for (const auto& per_k : rep.witnesses) {
      witnesses = witnesses && per_k.size() == static_cast<std::size_t>(st.depth);
      for (const auto& w : per_k) witnesses = witnesses && w.has_value();
    }
    const bool ok = rep.ok() && identity && witnesses && rep.invariance_radius == 10;
    if (!ok) o.pass = false;
    std::ostringstream s;
    s << st.g.spec().name() << " / " << st.h.name() << ": " << tf.tiles.size() << " tiles, window " << window
      << ", projections " << (rep.projections_disjoint ? "disjoint" : "OVERLAP") << ", density "
      << (identity ? "identity" : "NOT identity") << ", " << rep.invariance_checks << " invariance checks "
      << (rep.left_invariant ? "ok" : "FAILED") << ", thickness r <= " << st.depth << " "
      << (witnesses ? "ok" : "MISSING");
    o.notes.push_back(s.str());
    thick_cases.push_back({std::move(tf), std::move(rep), window});
  }
  o.detail = o.pass ? "both families verified" : "verification failed (see notes)";
  return o;
}

Outcome coset_averaging() {
  Rng rng(kSeed + 11);
  Group z2(GroupSpec::int_lattice(2));
  const auto h = SubgroupSpec::coordinate(z2.spec(), {1});
  const auto reps_ball = z2.metric().ball_bfs(8);
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    std::map<Element, Rational> tab;
    for (int k = 0; k < 5; ++k) tab[z2.make({0, ufh::testing::uniform(rng, -6, 6)})] = ufh::testing::random_coefficient(rng);
    const auto psi = BoundedFunction::table(tab);
    for (std::int64_t j = 0; j <= 10; ++j) {
      const auto back = coset_average(h, pi_star(h, psi), j);
      for (const auto& x : reps_ball) {
        const auto r = h.rep(x);
        bad += back(z2, r) != psi(z2, r);
      }
    }
  }
  for (std::int64_t j = 0; j <= 10; ++j)
    for (const auto& x : reps_ball) bad += coset_average(h, BoundedFunction::constant(1), j)(z2, x) != 1;
  return {bad == 0, "20 functions, j = 0..10, " + std::to_string(bad) + " mismatches"};
}

Outcome invariant_cycles() {
  Outcome o;
  if (thick_cases.empty()) return {false, "criterion 10 produced no families"};
  for (const auto& tc : thick_cases) {
    const auto& tf = tc.family;
    const auto& g = tf.group;
    const Element step = tf.subgroup.kind() == SubgroupSpec::Kind::HeisenbergCenter ? g.make({0, 0, 1})
                                                                                    : g.make({1, 0});
    UfChain templ(1);
    templ.add({g.identity(), step}, 1);
    std::vector<UfChain> chains;
    std::size_t defects = 0;
    for (int k = 1; k <= tf.families; ++k) {
      const auto phi = BoundedFunction::indicator(tf.union_rule(k));
      const auto cyc = invariant_cycle(g, tf.subgroup, templ, phi, Window{tc.window});
      defects += boundary_defects(g, cyc.chain, cyc.interior).size();
      chains.push_back(cyc.chain);
    }
    // Tile densities of the chains: share of v ∈ A^k_l carrying (v, v·step).
    bool identity = true;
    for (int j = 1; j <= tf.families; ++j)
      for (const auto& t : tf.tiles) {
        const auto tile = tf.tile_set(t);
        long hits = 0;
        for (const auto& v : tile) hits += chains[static_cast<std::size_t>(j - 1)].coefficient({v, g.compose(v, step)}) == 1;
        const auto density = make_rational(hits, static_cast<std::int64_t>(tile.size()));
        identity = identity && density == (j == t.k ? 1 : 0);
      }
    if (defects > 0 || !identity) o.pass = false;
    o.notes.push_back(g.spec().name() + ": " + std::to_string(tf.families) + " cycles, " + std::to_string(defects) +
                      " boundary defects on the interior, tile densities " + (identity ? "identity" : "NOT identity"));
  }
  o.detail = o.pass ? "boundaries vanish on the interior; densities separate" : "see notes";
  return o;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "ufh_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const std::string& n) { return (dir / n).string(); };
  write_file(p("thick_cfg.json"), R"({"group": "Z2", "subgroup": "axes:1", "n": 2, "L": 2})");
  if (run({"thick-build", "--config", p("thick_cfg.json"), "--out", p("thick.json")}) != 0)
    return {false, "thick-build failed"};
  if (run({"sparse-build", "--group", "Z", "--family", "supergeo", "--jmax", "3", "--c", "sigma_squared", "--out",
           p("sparse.json")}) != 0)
    return {false, "sparse-build failed"};
  const std::vector<json> configs = {
      {{"command", "ball"}, {"group", "Heis3"}, {"radius", 3}},
      {{"command", "folner"}, {"group", "Z"}, {"family", "supergeo"}, {"jmax", 3}},
      {{"command", "growth"}, {"group", "Z2"}, {"family", "cubes"}, {"jmax", 30}, {"chain", "chi_even_x"}},
      {{"command", "tile"}, {"group", "Z2"}, {"r", 2}, {"window", 20}, {"family", "balls"}, {"jmax", 15}},
      {{"command", "sparse-build"}, {"group", "Z"}, {"family", "supergeo"}, {"jmax", 3}, {"c", "sigma_squared"}},
      {{"command", "sparse-verify"}, {"input", p("sparse.json")}},
      {{"command", "thick-build"}, {"group", "Heis3"}, {"subgroup", "center"}, {"n", 2}, {"L", 2}},
      {{"command", "thick-verify"}, {"input", p("thick.json")}, {"hradius", 5}},
      {{"command", "whyte"}, {"group", "Z"}, {"family", "balls"}, {"function", "chi_G"}, {"level", 7}},
      {{"command", "indep"}, {"group", "Z"}, {"family", "balls"}, {"functions", {"powers:2", "powers:1"}},
       {"jmax", 5000}, {"samples", 20}},
      {{"command", "cycle"}, {"input", p("thick.json")}, {"k", 1}, {"window", 12}},
      {{"command", "coset-avg"}, {"group", "Z2"}, {"subgroup", "axes:1"}, {"function", "delta_e"}, {"j", 3},
       {"window", 3}},
  };
  std::size_t same = 0;
  std::vector<std::string> differing;
  for (const auto& cfg : configs) {
    const auto cmd = cfg.at("command").get<std::string>();
    write_file(p(cmd + ".cfg.json"), cfg.dump());
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = p(cmd + "." + std::to_string(rep));
      const int code = run({cmd, "--config", p(cmd + ".cfg.json"), "--out", out});
      outputs[rep] = std::to_string(code) + "\n" + read_file(out);
    }
    if (outputs[0] == outputs[1])
      ++same;
    else
      differing.push_back(cmd);
  }
  Outcome o{differing.empty(), std::to_string(same) + "/" + std::to_string(configs.size()) +
                                   " subcommands byte-identical on rerun"};
  for (const auto& d : differing) o.notes.push_back("differs: " + d);
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  std::printf("ufh %s acceptance (seed %llu, compare tolerance %.2f)\n", kVersion,
              static_cast<unsigned long long>(kSeed), kCompareTolerance);
  report(1, "boundary squares to zero", chain_complex, kLimitChainComplex);
  report(2, "rho round trip and chain map", rho_iso, kLimitRho);
  report(3, "transfer after i_star is the identity", transfer_left_inverse, kLimitTransfer);
  report(4, "approximate mean almost right-invariant", mean_invariance);
  report(5, "ball sizes regression", metric_regression);
  report(6, "tiling density bounds", tiling_bounds, kLimitTiling);
  report(7, "sparse pipeline on Z (j_max 3)", [] { return sparse_pipeline(1, 3); }, kLimitSparseZ);
  report(7, "sparse pipeline on Z2 (j_max 2)", [] { return sparse_pipeline(2, 2); }, kLimitSparseZ2);
  report(8, "independence of the power classes", iterated_independence, kLimitIndependence);
  report(9, "Whyte witnesses and boundary bound", whyte);
  report(10, "thick families", thick_families, kLimitThick);
  report(11, "coset averaging inverts pullback", coset_averaging);
  report(12, "invariant cycles from thick families", invariant_cycles);
  report(13, "rerun determinism", determinism);
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
