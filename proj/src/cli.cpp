#include "ufh/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ufh/errors.hpp"
#include "ufh/io.hpp"

namespace ufh {

// ---------------------------------------------------------------------------
// Presets

GroupSpec parse_group(const json& j) {
  if (j.is_object()) return GroupSpec::from_json(j);
  if (!j.is_string()) throw InvalidArgument("group must be a name or a JSON object");
  return parse_group(j.get<std::string>());
}

GroupSpec parse_group(const std::string& text) {
  if (!text.empty() && text.front() == '{') return GroupSpec::from_json(json::parse(text));
  if (text == "Z") return GroupSpec::int_lattice(1);
  if (text == "Heis3") return GroupSpec::heisenberg3();
  if (text.rfind("Z2xA", 0) == 0) {
    const auto m = json::parse(text.substr(4));
    return GroupSpec::lattice_semidirect(m.get<Matrix2>());
  }
  if (text.size() >= 2 && text.front() == 'Z') {
    try {
      std::size_t used = 0;
      const int d = std::stoi(text.substr(1), &used);
      if (used + 1 == text.size()) return GroupSpec::int_lattice(d);
    } catch (const std::logic_error&) {
    }
  }
  throw InvalidArgument("unknown group '" + text + "'");
}

SubgroupSpec parse_subgroup(const GroupSpec& spec, const json& j) {
  if (j.is_object()) return SubgroupSpec::from_json(spec, j);
  const auto s = j.get<std::string>();
  if (s == "center") {
    if (spec.family() != Family::Heisenberg3) throw ModelMismatch("center subgroup needs Heis3");
    return SubgroupSpec::heisenberg_center();
  }
  if (s.rfind("axes:", 0) == 0) {
    std::vector<int> axes;
    std::stringstream ss(s.substr(5));
    std::string tok;
    while (std::getline(ss, tok, ',')) axes.push_back(std::stoi(tok));
    return SubgroupSpec::coordinate(spec, axes);
  }
  throw InvalidArgument("unknown subgroup '" + s + "'");
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

SetRule parse_set(const GroupSpec& spec, const json& j) {
  if (j.is_object()) return SetRule::from_json(spec, j);
  const auto s = j.get<std::string>();
  if (s == "all") return SetRule::all();
  if (s == "even_x") return SetRule::congruence(1, 2, 0);
  if (s == "halfplane_x") return SetRule::half_space(1, 0);
  const auto parts = split(s, ':');
  if (parts.size() == 2 && parts[0] == "powers") return SetRule::powers(std::stoi(parts[1]));
  if (parts.size() == 4 && parts[0] == "congruence")
    return SetRule::congruence(std::stoi(parts[1]), std::stoll(parts[2]), std::stoll(parts[3]));
  throw InvalidArgument("unknown set '" + s + "'");
}

BoundedFunction parse_function(const GroupSpec& spec, const json& j) {
  if (j.is_object()) return BoundedFunction::from_json(spec, j);
  const auto s = j.get<std::string>();
  if (s == "chi_G") return BoundedFunction::constant(1);
  if (s == "delta_e") return BoundedFunction::delta(spec.identity());
  if (s == "chi_even_x") return BoundedFunction::indicator(SetRule::congruence(1, 2, 0));
  if (s == "halfplane_x") return BoundedFunction::indicator(SetRule::half_space(1, 0));
  if (s.rfind("powers:", 0) == 0) return BoundedFunction::indicator(parse_set(spec, s));
  if (s.rfind("chi:", 0) == 0) return BoundedFunction::indicator(parse_set(spec, s.substr(4)));
  throw InvalidArgument("unknown function '" + s + "'");
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

enum class Kind { Int, Str, Bool, IntList, StrList, Any };

struct Key {
  const char* name;
  Kind kind;
  const char* help;
};

const std::vector<Key> kCommon = {
    {"group", Kind::Any, "group name or JSON spec"},
    {"out", Kind::Str, "main output path (stdout if absent)"},
    {"seed", Kind::Int, "seed recorded with the run"},
};

const std::map<std::string, std::string> kSummaries = {
    {"ball", "ball membership and sphere sizes"},
    {"folner", "Følner family sizes and boundary ratios"},
    {"growth", "profile table for one function"},
    {"tile", "greedy tiling and its density table"},
    {"sparse-build", "sparse set for a decay rate c"},
    {"sparse-verify", "exhaustive sparseness certificate"},
    {"thick-build", "thick family relative to a subgroup"},
    {"thick-verify", "disjointness, densities, invariance, thickness"},
    {"whyte", "search for a set certifying a nonzero class"},
    {"indep", "growth ordering evidence for several functions"},
    {"cycle", "invariant cycle on a window and its boundary"},
    {"coset-avg", "pushforward to the quotient by averaging"},
};

const std::map<std::string, std::vector<Key>> kCommands = {
    {"ball", {{"radius", Kind::Int, "ball radius"}, {"center", Kind::Any, "center element as JSON"}}},
    {"folner", {{"family", Kind::Str, "cubes|balls|heisboxes|supergeo"}, {"jmax", Kind::Int, "last index"}}},
    {"growth",
     {{"family", Kind::Str, "Følner family"},
      {"jmax", Kind::Int, "last index"},
      {"indices", Kind::IntList, "explicit indices"},
      {"chain", Kind::Any, "function id"}}},
    {"tile",
     {{"r", Kind::Int, "tiling radius"},
      {"window", Kind::Int, "window radius"},
      {"family", Kind::Str, "Følner family for the density table"},
      {"jmax", Kind::Int, "last index"},
      {"table", Kind::Str, "density CSV path"}}},
    {"sparse-build",
     {{"family", Kind::Str, "nested Følner family (supergeo)"},
      {"jmax", Kind::Int, "last index"},
      {"c", Kind::Any, "sigma_squared | power:p | list of rationals"},
      {"cloud", Kind::Str, "point-cloud CSV path"}}},
    {"sparse-verify",
     {{"input", Kind::Str, "sparse-build output"},
      {"set", Kind::Any, "named subset, instead of --input"},
      {"radii", Kind::IntList, "radii r"},
      {"C", Kind::Int, "claimed constant"},
      {"window", Kind::Int, "window radius"},
      {"threshold", Kind::Int, "imposed R for every radius"}}},
    {"thick-build",
     {{"subgroup", Kind::Any, "center | axes:i,..."},
      {"n", Kind::Int, "number of families"},
      {"L", Kind::Int, "depth"},
      {"budget", Kind::Int, "search radius"}}},
    {"thick-verify",
     {{"input", Kind::Str, "thick-build output"},
      {"window", Kind::Int, "window radius"},
      {"hradius", Kind::Int, "radius for H-invariance samples"}}},
    {"whyte",
     {{"family", Kind::Str, "Følner family"},
      {"function", Kind::Any, "function id"},
      {"level", Kind::Int, "level n"},
      {"budget", Kind::Int, "largest index searched"}}},
    {"indep",
     {{"family", Kind::Str, "Følner family"},
      {"functions", Kind::StrList, "function ids in the claimed order"},
      {"jmax", Kind::Int, "last index"},
      {"samples", Kind::Int, "number of log-spaced indices (0: all)"}}},
    {"cycle",
     {{"subgroup", Kind::Any, "subgroup H"},
      {"input", Kind::Str, "thick family JSON (uses chi of T^k)"},
      {"k", Kind::Int, "family index"},
      {"function", Kind::Any, "coefficient function, instead of --input"},
      {"window", Kind::Int, "window radius"}}},
    {"coset-avg",
     {{"subgroup", Kind::Any, "normal subgroup H"},
      {"function", Kind::Any, "function id"},
      {"j", Kind::Int, "H-Følner index"},
      {"window", Kind::Int, "window radius"}}},
};

json convert_flag(const std::string& raw, Kind kind) {
  switch (kind) {
    case Kind::Int: return std::stoll(raw);
    case Kind::Str: return raw;
    case Kind::Bool: return raw != "0" && raw != "false";
    case Kind::IntList: {
      json out = json::array();
      for (const auto& t : split(raw, ',')) out.push_back(std::stoll(t));
      return out;
    }
    case Kind::StrList: {
      json out = json::array();
      for (const auto& t : split(raw, ',')) out.push_back(t);
      return out;
    }
    case Kind::Any:
      if (!raw.empty() && (raw.front() == '{' || raw.front() == '[')) return json::parse(raw);
      return raw;
  }
  return raw;
}

class Config {
 public:
  explicit Config(json j) : j_(std::move(j)) {}
  bool has(const char* k) const { return j_.contains(k); }
  const json& at(const char* k) const {
    if (!j_.contains(k)) throw InvalidArgument(std::string("missing setting '") + k + "'");
    return j_.at(k);
  }
  std::int64_t integer(const char* k) const { return at(k).get<std::int64_t>(); }
  std::int64_t integer(const char* k, std::int64_t def) const { return has(k) ? integer(k) : def; }
  std::string str(const char* k) const { return at(k).get<std::string>(); }
  std::string str(const char* k, const std::string& def) const { return has(k) ? str(k) : def; }
  const json& raw() const { return j_; }

 private:
  json j_;
};

struct Outcome {
  int code = 0;
  std::string witness;
};

struct Runner {
  Config cfg;
  EmitContext ctx;

  void emit(const std::string& data, const char* key = "out") const {
    if (cfg.has(key))
      write_file(cfg.str(key), data);
    else
      std::cout << data;
  }

  Group group() const {
    Group g(parse_group(cfg.at("group")));
    if (const char* dir = std::getenv("UFH_CACHE_DIR"); dir && *dir) {
      const auto path = std::filesystem::path(dir) / (fnv1a_hex(g.spec().to_json().dump()) + ".bfs");
      g.metric().load(path.string());
    }
    return g;
  }

  void save_cache(const Group& g) const {
    if (const char* dir = std::getenv("UFH_CACHE_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      const auto path = std::filesystem::path(dir) / (fnv1a_hex(g.spec().to_json().dump()) + ".bfs");
      g.metric().save(path.string());
    }
  }

  FolnerFamily family(const Group& g) const {
    return FolnerFamily(g, folner_kind_from_string(cfg.str("family")));
  }

  json header(const Group& g) const {
    return {{"tool", std::string("ufh ") + kVersion}, {"config", ctx.config_hash},
            {"group", g.spec().to_json()}, {"window", ctx.window}, {"seed", cfg.integer("seed", 0)}};
  }

  Outcome ball() {
    const auto g = group();
    const auto r = cfg.integer("radius");
    const auto center = cfg.has("center") ? g.spec().element_from_json(cfg.at("center")) : g.identity();
    const auto s = ufh::ball(g, r, center);
    ctx.window = r;
    auto out = header(g);
    out["window"] = r;
    out["center"] = g.spec().element_to_json(center);
    out["radius"] = r;
    out["size"] = s.size();
    out["elements"] = subset_json(g.spec(), s);
    emit(canonical_dump(out));
    save_cache(g);
    return {};
  }

  Outcome folner() {
    const auto g = group();
    const auto fam = family(g);
    const int jmax = static_cast<int>(cfg.integer("jmax"));
    json rows = json::array();
    bool truncated = false;
    for (int j = fam.first_index(); j <= jmax; ++j) {
      try {
        json row{{"j", j}, {"size", fam.set_size(j)}};
        if (auto r = fam.ball_radius(j)) row["radius"] = *r;
        rows.push_back(row);
      } catch (const BeyondWindow&) {
        truncated = true;
        break;
      }
    }
    auto out = header(g);
    out["family"] = fam.name();
    out["rows"] = rows;
    out["truncated"] = truncated;
    Outcome oc;
    if (fam.has_star_radii()) {
      const auto rep = check_star_condition(fam, jmax);
      json sr = json::array();
      for (const auto& r : rep.rows)
        sr.push_back({{"j", r.j}, {"R", r.radius}, {"prev_in_ball", r.prev_in_ball},
                      {"ball_in_triple", r.ball_in_triple}, {"triple_in_set", r.triple_in_set},
                      {"ratio", rational_to_json(r.ratio)}});
      out["star"] = {{"rows", sr}, {"passed", rep.passed}, {"truncated", rep.truncated},
                     {"first_violation", rep.first_violation}};
      if (!rep.passed) oc = {2, json{{"first_violation", rep.first_violation}}.dump()};
    }
    emit(canonical_dump(out));
    save_cache(g);
    return oc;
  }

  Outcome growth() {
    const auto g = group();
    const auto fam = family(g);
    std::vector<int> idx;
    if (cfg.has("indices")) {
      idx = cfg.at("indices").get<std::vector<int>>();
    } else {
      for (int j = fam.first_index(); j <= cfg.integer("jmax"); ++j) idx.push_back(j);
    }
    GrowthTable t;
    if (cfg.has("chain")) {
      const auto& id = cfg.at("chain");
      t = beta_profile(parse_function(g.spec(), id), fam, idx, id.is_string() ? id.get<std::string>() : id.dump());
    } else {
      t = sigma_profile(fam, idx);
    }
    if (!t.rows.empty()) ctx.window = max_length(g, fam.set(t.rows.back().j));
    emit(growth_csv(t, ctx));
    save_cache(g);
    return {};
  }

  Outcome tile() {
    const auto g = group();
    const auto r = cfg.integer("r");
    ctx.window = cfg.integer("window");
    const auto t = greedy_tiling(g, r, Window{ctx.window});
    auto out = header(g);
    out["tiling"] = t.to_json();
    out["packing_ok"] = t.packing_ok;
    out["covering_ok_on_interior"] = t.covering_ok_on_interior;
    if (cfg.has("family")) {
      const auto fam = family(g);
      const auto idx = tiling_index(t, fam, static_cast<int>(cfg.integer("jmax")));
      out["l"] = idx.l ? json(*idx.l) : json("not attained in range");
      out["range"] = {fam.first_index(), idx.rows.empty() ? fam.first_index() - 1 : idx.rows.back().j};
      if (cfg.has("table")) write_file(cfg.str("table"), density_csv(idx, ctx));
    }
    emit(canonical_dump(out));
    save_cache(g);
    if (!t.packing_ok || !t.covering_ok_on_interior)
      return {2, json{{"packing_ok", t.packing_ok}, {"covering_ok", t.covering_ok_on_interior}}.dump()};
    return {};
  }

  std::vector<Rational> c_values(const FolnerFamily& fam, int jmax) const {
    const auto& c = cfg.at("c");
    if (c.is_array()) {
      std::vector<Rational> out;
      for (const auto& v : c) out.push_back(rational_from_json(v));
      return out;
    }
    const auto s = c.get<std::string>();
    if (s == "sigma_squared") return c_sigma_squared(fam, jmax);
    if (s.rfind("power:", 0) == 0) return c_power(std::stoi(s.substr(6)), jmax);
    std::vector<Rational> out;
    for (const auto& t : split(s, ',')) out.push_back(parse_rational(t));
    return out;
  }

  Outcome sparse_build() {
    const auto g = group();
    const auto fam = family(g);
    const int jmax = static_cast<int>(cfg.integer("jmax"));
    const auto s = sparse_construct(fam, c_values(fam, jmax), jmax);
    ctx.window = s.known_radius;
    auto out = header(g);
    out["window"] = s.known_radius;
    out["sparse"] = sparse_json(s);
    emit(canonical_dump(out));
    if (cfg.has("cloud")) write_file(cfg.str("cloud"), cloud_csv(g.spec(), s, ctx));
    save_cache(g);
    return {};
  }

  Outcome sparse_verify() {
    std::optional<Group> g;
    std::optional<SetRule> rule;
    std::map<std::int64_t, std::int64_t> thresholds;
    std::vector<std::int64_t> radii;
    std::int64_t window = 0;
    Outcome oc;
    json extra = json::object();
    if (cfg.has("input")) {
      const auto doc = json::parse(read_file(cfg.str("input")));
      const auto& sp = doc.at("sparse");
      g.emplace(GroupSpec::from_json(sp.at("group")));
      rule = SetRule::from_json(g->spec(), sp.at("rule"));
      window = sp.at("known_radius").get<std::int64_t>();
      for (const auto& [k, v] : sp.at("ring_thresholds").items()) {
        thresholds[std::stoll(k)] = v.get<std::int64_t>();
        radii.push_back(std::stoll(k));
      }
      const auto& payload = sp.at("rule").at("payload");
      const auto again = rederive_sparse(payload);
      const auto stored = FiniteSubset([&] {
        std::vector<Element> v;
        for (const auto& e : sp.at("rule").at("points")) v.push_back(g->spec().element_from_json(e));
        return v;
      }());
      extra["rederived_matches"] = again == stored;
      if (!(again == stored)) oc = {2, json{{"check", "rederive"}, {"stored", stored.size()}, {"rederived", again.size()}}.dump()};
    } else {
      g.emplace(parse_group(cfg.at("group")));
      rule = parse_set(g->spec(), cfg.at("set"));
    }
    std::sort(radii.begin(), radii.end());
    if (cfg.has("radii")) radii = cfg.at("radii").get<std::vector<std::int64_t>>();
    if (cfg.has("window")) window = cfg.integer("window");
    if (cfg.has("threshold"))
      for (auto r : radii) thresholds[r] = cfg.integer("threshold");
    if (window <= 0) throw InvalidArgument("sparse-verify needs a positive window");
    ctx.window = window;
    const auto cert = ufh::sparse_verify(*g, *rule, radii, Window{window}, static_cast<int>(cfg.integer("C", 2)),
                                         thresholds);
    auto out = header(*g);
    out["certificate"] = cert.to_json();
    out["checks"] = extra;
    emit(canonical_dump(out));
    if (!cert.valid() && oc.code == 0) {
      json bad = json::array();
      for (const auto& r : cert.rows)
        if (!r.ok) bad.push_back({{"r", r.r}, {"C_obs", r.c_obs}, {"C_all", r.c_all}});
      oc = {2, json{{"check", "sparse"}, {"failing", bad}}.dump()};
    }
    return oc;
  }

  Outcome thick_build() {
    const auto g = group();
    const auto h = parse_subgroup(g.spec(), cfg.at("subgroup"));
    const auto tf = thick_construct(g, h, static_cast<int>(cfg.integer("n")), static_cast<int>(cfg.integer("L")),
                                    cfg.integer("budget", 256));
    emit(canonical_dump(tf.to_json()));
    return {};
  }

  Outcome thick_verify() {
    const auto tf = ThickFamily::from_json(json::parse(read_file(cfg.str("input"))));
    std::int64_t extent = 0;
    for (const auto& t : tf.tiles) extent = std::max(extent, max_length(tf.group, tf.tile_set(t)));
    ctx.window = cfg.integer("window", extent + 2);
    const auto rep = ufh::thick_verify(tf, Window{ctx.window}, cfg.integer("hradius", 10));
    auto out = header(tf.group);
    out["report"] = rep.to_json(tf.group.spec());
    emit(canonical_dump(out));
    if (!rep.ok()) return {2, rep.failure ? rep.failure->dump() : "{}"};
    return {};
  }

  Outcome whyte() {
    const auto g = group();
    const auto fam = family(g);
    const auto res = whyte_witness(parse_function(g.spec(), cfg.at("function")), fam,
                                   static_cast<int>(cfg.integer("level")), static_cast<int>(cfg.integer("budget", 200)));
    auto out = header(g);
    out["found"] = res.found;
    out["examined"] = res.examined;
    if (res.found) {
      out["j"] = res.j;
      out["source"] = res.source;
      out["size"] = res.set.size();
      out["sum"] = rational_to_json(res.sum);
      out["boundary"] = res.boundary;
    } else {
      out["note"] = "not found within budget; this is not a triviality proof";
    }
    emit(canonical_dump(out));
    save_cache(g);
    return {};
  }

  Outcome indep() {
    const auto g = group();
    const auto fam = family(g);
    const int jmax = static_cast<int>(cfg.integer("jmax"));
    const int samples = static_cast<int>(cfg.integer("samples", 0));
    std::vector<int> idx = samples > 0 ? log_spaced_indices(1, jmax, samples) : std::vector<int>{};
    if (samples <= 0)
      for (int j = 1; j <= jmax; ++j) idx.push_back(j);
    std::vector<BoundedFunction> fs;
    std::vector<std::string> names;
    for (const auto& id : cfg.at("functions")) {
      fs.push_back(parse_function(g.spec(), id));
      names.push_back(id.is_string() ? id.get<std::string>() : id.dump());
    }
    const auto rep = independence_matrix(fs, names, fam, idx);
    auto out = header(g);
    json m = json::array();
    for (const auto& row : rep.matrix) {
      json r = json::array();
      for (const auto& q : row) r.push_back(rational_to_json(q));
      m.push_back(r);
    }
    json chain = json::array();
    for (const auto& v : rep.chain) chain.push_back(v.to_json());
    out["names"] = rep.names;
    out["indices"] = rep.indices;
    out["matrix_at_last_index"] = m;
    out["chain"] = chain;
    out["ordered"] = rep.ordered;
    out["label"] = rep.label;
    emit(canonical_dump(out));
    return {};
  }

  Outcome cycle() {
    std::optional<Group> g;
    std::optional<SubgroupSpec> h;
    std::optional<BoundedFunction> phi;
    if (cfg.has("input")) {
      const auto tf = ThickFamily::from_json(json::parse(read_file(cfg.str("input"))));
      g.emplace(tf.group);
      h.emplace(tf.subgroup);
      phi = BoundedFunction::indicator(tf.union_rule(static_cast<int>(cfg.integer("k", 1))));
    } else {
      g.emplace(parse_group(cfg.at("group")));
      h.emplace(parse_subgroup(g->spec(), cfg.at("subgroup")));
      phi = parse_function(g->spec(), cfg.at("function"));
    }
    // Fundamental 1-cycle of H: (e, s) for the first generator s of H.
    Element s;
    if (h->kind() == SubgroupSpec::Kind::HeisenbergCenter) {
      s = g->make({0, 0, 1});
    } else {
      for (const auto& x : g->spec().generators())
        if (h->contains(x)) {
          s = x;
          break;
        }
    }
    UfChain templ(1, 0);
    templ.add({g->identity(), s}, 1);
    ctx.window = cfg.integer("window");
    const auto cyc = invariant_cycle(*g, *h, templ, *phi, Window{ctx.window});
    const auto defects = boundary_defects(*g, cyc.chain, cyc.interior);
    auto out = header(*g);
    out["interior"] = cyc.interior;
    out["terms"] = cyc.chain.entries().size();
    out["defects_on_interior"] = defects.size();
    out["chain"] = cyc.chain.to_json(g->spec());
    emit(canonical_dump(out));
    if (!defects.empty())
      return {2, json{{"check", "cycle"}, {"point", g->spec().element_to_json(defects.front())}}.dump()};
    return {};
  }

  Outcome coset_avg() {
    const auto g = group();
    const auto h = parse_subgroup(g.spec(), cfg.at("subgroup"));
    const auto phi = parse_function(g.spec(), cfg.at("function"));
    const auto j = cfg.integer("j");
    ctx.window = cfg.integer("window");
    const auto tau = coset_average(h, phi, j);
    std::set<Element> reps;
    for (const auto& x : g.metric().ball_bfs(ctx.window)) reps.insert(h.rep(x));
    json rows = json::array();
    for (const auto& r : reps) rows.push_back({{"rep", g.spec().element_to_json(r)}, {"value", rational_to_json(tau(g, r))}});
    auto out = header(g);
    out["j"] = j;
    out["values"] = rows;
    emit(canonical_dump(out));
    save_cache(g);
    return {};
  }
};

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"ufh: uniformly finite homology toolkit at window scale"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ufh ") + kVersion);

  struct Slot {
    std::string value;
    CLI::Option* opt = nullptr;
    Kind kind;
  };
  std::map<std::string, std::map<std::string, Slot>> slots;
  std::map<std::string, std::string> config_path;
  std::map<std::string, bool> rational;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, keys] : kCommands) {
    auto* sub = app.add_subcommand(name, kSummaries.at(name));
    subs[name] = sub;
    auto& mine = slots[name];
    std::vector<Key> all = kCommon;
    all.insert(all.end(), keys.begin(), keys.end());
    for (const auto& k : all) {
      auto& slot = mine[k.name];
      slot.kind = k.kind;
      slot.opt = sub->add_option(std::string("--") + k.name, slot.value, k.help);
    }
    sub->add_option("--config", config_path[name], "JSON config file");
    sub->add_flag("--rational", rational[name], "print exact p/q values");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::string name;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) name = n;

  try {
    json cfg = json::object();
    if (!config_path[name].empty()) {
      cfg = json::parse(read_file(config_path[name]));
      if (!cfg.is_object()) throw InvalidArgument("config must be a JSON object");
    }
    for (auto it = cfg.begin(); it != cfg.end();) {
      if (it.key() == "command") {
        if (it.value() != name) throw InvalidArgument("config is for '" + it.value().get<std::string>() + "'");
        it = cfg.erase(it);
        continue;
      }
      if (it.key() == "rational") {
        rational[name] = rational[name] || it.value().get<bool>();
        it = cfg.erase(it);
        continue;
      }
      if (!slots[name].contains(it.key())) throw InvalidArgument("unknown config key '" + it.key() + "' for " + name);
      ++it;
    }
    for (const auto& [key, slot] : slots[name])
      if (slot.opt->count() > 0) cfg[key] = convert_flag(slot.value, slot.kind);

    json hashed = cfg;
    hashed.erase("out");
    hashed.erase("cloud");
    hashed.erase("table");
    hashed["command"] = name;
    Runner runner{Config(cfg), EmitContext{fnv1a_hex(hashed.dump()), 0, rational[name]}};

    Outcome oc;
    if (name == "ball") oc = runner.ball();
    else if (name == "folner") oc = runner.folner();
    else if (name == "growth") oc = runner.growth();
    else if (name == "tile") oc = runner.tile();
    else if (name == "sparse-build") oc = runner.sparse_build();
    else if (name == "sparse-verify") oc = runner.sparse_verify();
    else if (name == "thick-build") oc = runner.thick_build();
    else if (name == "thick-verify") oc = runner.thick_verify();
    else if (name == "whyte") oc = runner.whyte();
    else if (name == "indep") oc = runner.indep();
    else if (name == "cycle") oc = runner.cycle();
    else oc = runner.coset_avg();
    if (oc.code == 2) std::cerr << "verification failed; witness: " << oc.witness << '\n';
    return oc.code;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\nwitness: " << e.witness() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> copy = args;
  copy.insert(copy.begin(), "ufh");
  std::vector<char*> argv;
  for (auto& s : copy) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ufh
