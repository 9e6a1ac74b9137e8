#include "ufh/functions.hpp"

#include <algorithm>
#include <set>

#include "ufh/errors.hpp"

namespace ufh {

json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return make_rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw InvalidArgument("rational values serialize as integers or \"p/q\" strings");
}

namespace detail {

struct SetNode {
  virtual ~SetNode() = default;
  virtual bool contains(const Group& g, const Element& x) const = 0;
  virtual std::string describe() const = 0;
  virtual json to_json(const GroupSpec& spec) const = 0;
};

struct FunctionNode {
  virtual ~FunctionNode() = default;
  virtual Rational eval(const Group& g, const Element& x) const = 0;
  virtual Rational sup_bound() const = 0;
  virtual std::optional<std::vector<Element>> support(const Group&) const { return std::nullopt; }
  virtual std::string describe() const = 0;
  virtual json to_json(const GroupSpec& spec) const = 0;
};

}  // namespace detail

namespace {

using detail::FunctionNode;
using detail::SetNode;

json points_to_json(const GroupSpec& spec, const FiniteSubset& s) {
  json out = json::array();
  for (const auto& p : s) out.push_back(spec.element_to_json(p));
  return out;
}

FiniteSubset points_from_json(const GroupSpec& spec, const json& j) {
  std::vector<Element> v;
  for (const auto& e : j) v.push_back(spec.element_from_json(e));
  return FiniteSubset(std::move(v));
}

struct AllSet final : SetNode {
  bool contains(const Group&, const Element&) const override { return true; }
  std::string describe() const override { return "G"; }
  json to_json(const GroupSpec&) const override { return {{"kind", "all"}}; }
};

struct FiniteSet final : SetNode {
  FiniteSubset points;
  explicit FiniteSet(FiniteSubset p) : points(std::move(p)) {}
  bool contains(const Group&, const Element& x) const override { return points.contains(x); }
  std::string describe() const override { return "finite(" + std::to_string(points.size()) + ")"; }
  json to_json(const GroupSpec& spec) const override {
    return {{"kind", "finite"}, {"points", points_to_json(spec, points)}};
  }
};

struct PowersSet final : SetNode {
  int k;
  explicit PowersSet(int k_) : k(k_) {}
  bool contains(const Group& g, const Element& x) const override {
    if (g.spec().family() != Family::IntLattice || g.spec().rank() != 1)
      throw ModelMismatch("power patterns live in Z");
    const std::int64_t v = x[0];
    if (v < 0) return false;
    // Integer k-th root by bisection.
    std::int64_t lo = 0, hi = 1;
    auto pow_le = [&](std::int64_t n) {
      __int128 acc = 1;
      for (int i = 0; i < k; ++i) {
        acc *= n;
        if (acc > v) return false;
      }
      return true;
    };
    while (pow_le(hi)) hi *= 2;
    while (hi - lo > 1) {
      const auto mid = lo + (hi - lo) / 2;
      (pow_le(mid) ? lo : hi) = mid;
    }
    __int128 acc = 1;
    for (int i = 0; i < k; ++i) acc *= lo;
    return acc == v;
  }
  std::string describe() const override { return "{n^" + std::to_string(k) + "}"; }
  json to_json(const GroupSpec&) const override { return {{"kind", "powers"}, {"k", k}}; }
};

struct CongruenceSet final : SetNode {
  int axis;
  std::int64_t modulus, residue;
  CongruenceSet(int a, std::int64_t m, std::int64_t r) : axis(a), modulus(m), residue(r) {}
  bool contains(const Group&, const Element& x) const override {
    const auto v = x[static_cast<std::size_t>(axis - 1)];
    return ((v - residue) % modulus + modulus) % modulus == 0;
  }
  std::string describe() const override {
    return "x" + std::to_string(axis) + "≡" + std::to_string(residue) + " mod " + std::to_string(modulus);
  }
  json to_json(const GroupSpec&) const override {
    return {{"kind", "congruence"}, {"axis", axis}, {"modulus", modulus}, {"residue", residue}};
  }
};

struct HalfSpaceSet final : SetNode {
  int axis;
  std::int64_t min;
  HalfSpaceSet(int a, std::int64_t m) : axis(a), min(m) {}
  bool contains(const Group&, const Element& x) const override {
    return x[static_cast<std::size_t>(axis - 1)] >= min;
  }
  std::string describe() const override { return "x" + std::to_string(axis) + ">=" + std::to_string(min); }
  json to_json(const GroupSpec&) const override {
    return {{"kind", "half_space"}, {"axis", axis}, {"min", min}};
  }
};

struct CosetUnionSet final : SetNode {
  SubgroupSpec h;
  FiniteSubset tiles;
  FiniteSubset reps;
  CosetUnionSet(SubgroupSpec sub, FiniteSubset t) : h(std::move(sub)), tiles(std::move(t)) {
    std::vector<Element> r;
    for (const auto& p : tiles) r.push_back(h.rep(p));
    reps = FiniteSubset(std::move(r));
  }
  bool contains(const Group&, const Element& x) const override { return reps.contains(h.rep(x)); }
  std::string describe() const override { return "H(" + h.name() + ")·tiles(" + std::to_string(tiles.size()) + ")"; }
  json to_json(const GroupSpec& spec) const override {
    return {{"kind", "coset_union"}, {"subgroup", h.to_json()}, {"tiles", points_to_json(spec, tiles)}};
  }
};

struct MaterializedSet final : SetNode {
  std::string kind;
  FiniteSubset points;
  std::int64_t radius;
  json payload;
  MaterializedSet(std::string k, FiniteSubset p, std::int64_t r, json pl)
      : kind(std::move(k)), points(std::move(p)), radius(r), payload(std::move(pl)) {}
  bool contains(const Group& g, const Element& x) const override {
    if (points.contains(x)) return true;
    if (g.word_length(x) > radius)
      throw BeyondWindow(kind + " set is only known on B_" + std::to_string(radius) + "(e)");
    return false;
  }
  std::string describe() const override { return kind + "(" + std::to_string(points.size()) + " pts)"; }
  json to_json(const GroupSpec& spec) const override {
    return {{"kind", "materialized"}, {"label", kind}, {"radius", radius},
            {"points", points_to_json(spec, points)}, {"payload", payload}};
  }
};

struct BinarySet final : SetNode {
  char op;
  SetRule a, b;
  BinarySet(char o, SetRule x, SetRule y) : op(o), a(std::move(x)), b(std::move(y)) {}
  bool contains(const Group& g, const Element& x) const override {
    switch (op) {
      case '|': return a.contains(g, x) || b.contains(g, x);
      case '&': return a.contains(g, x) && b.contains(g, x);
      default: return a.contains(g, x) && !b.contains(g, x);
    }
  }
  std::string describe() const override {
    return "(" + a.describe() + " " + std::string(1, op == '|' ? '|' : op == '&' ? '&' : '\\') + " " +
           b.describe() + ")";
  }
  json to_json(const GroupSpec& spec) const override {
    const char* k = op == '|' ? "union" : op == '&' ? "intersection" : "difference";
    return {{"kind", k}, {"args", json::array({a.to_json(spec), b.to_json(spec)})}};
  }
};

struct ComplementSet final : SetNode {
  SetRule a;
  explicit ComplementSet(SetRule x) : a(std::move(x)) {}
  bool contains(const Group& g, const Element& x) const override { return !a.contains(g, x); }
  std::string describe() const override { return "G\\" + a.describe(); }
  json to_json(const GroupSpec& spec) const override {
    return {{"kind", "complement"}, {"args", json::array({a.to_json(spec)})}};
  }
};

}  // namespace

SetRule SetRule::all() { return SetRule(std::make_shared<AllSet>()); }
SetRule SetRule::finite(FiniteSubset points) { return SetRule(std::make_shared<FiniteSet>(std::move(points))); }
SetRule SetRule::powers(int k) {
  if (k < 1) throw InvalidArgument("power pattern exponent must be positive");
  return SetRule(std::make_shared<PowersSet>(k));
}
SetRule SetRule::congruence(int axis, std::int64_t modulus, std::int64_t residue) {
  if (axis < 1 || modulus < 1) throw InvalidArgument("bad congruence pattern");
  return SetRule(std::make_shared<CongruenceSet>(axis, modulus, residue));
}
SetRule SetRule::half_space(int axis, std::int64_t min) {
  if (axis < 1) throw InvalidArgument("bad half-space axis");
  return SetRule(std::make_shared<HalfSpaceSet>(axis, min));
}
SetRule SetRule::coset_union(SubgroupSpec h, const FiniteSubset& tiles) {
  return SetRule(std::make_shared<CosetUnionSet>(std::move(h), tiles));
}
SetRule SetRule::materialized(std::string kind, FiniteSubset points, std::int64_t radius, json payload) {
  return SetRule(std::make_shared<MaterializedSet>(std::move(kind), std::move(points), radius, std::move(payload)));
}
SetRule operator|(const SetRule& a, const SetRule& b) { return SetRule(std::make_shared<BinarySet>('|', a, b)); }
SetRule operator&(const SetRule& a, const SetRule& b) { return SetRule(std::make_shared<BinarySet>('&', a, b)); }
SetRule operator-(const SetRule& a, const SetRule& b) { return SetRule(std::make_shared<BinarySet>('-', a, b)); }
SetRule SetRule::complement() const { return SetRule(std::make_shared<ComplementSet>(*this)); }

bool SetRule::contains(const Group& group, const Element& g) const { return node_->contains(group, g); }

FiniteSubset SetRule::members_in_ball(const Group& group, std::int64_t r) const {
  if (auto m = dynamic_cast<const MaterializedSet*>(node_.get()); m && r <= m->radius) {
    std::vector<Element> v;
    for (const auto& p : m->points)
      if (group.word_length(p) <= r) v.push_back(p);
    return FiniteSubset(std::move(v));
  }
  if (auto pts = finite_points()) {
    std::vector<Element> v;
    for (const auto& p : *pts)
      if (group.word_length(p) <= r) v.push_back(p);
    return FiniteSubset(std::move(v));
  }
  std::vector<Element> v;
  for (const auto& p : group.metric().ball_bfs(r))
    if (contains(group, p)) v.push_back(p);
  return FiniteSubset(std::move(v));
}

std::optional<FiniteSubset> SetRule::finite_points() const {
  if (auto f = dynamic_cast<const FiniteSet*>(node_.get())) return f->points;
  return std::nullopt;
}

std::string SetRule::describe() const { return node_->describe(); }
json SetRule::to_json(const GroupSpec& spec) const { return node_->to_json(spec); }

SetRule SetRule::from_json(const GroupSpec& spec, const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "all") return all();
  if (kind == "finite") return finite(points_from_json(spec, j.at("points")));
  if (kind == "powers") return powers(j.at("k").get<int>());
  if (kind == "congruence")
    return congruence(j.at("axis").get<int>(), j.at("modulus").get<std::int64_t>(), j.at("residue").get<std::int64_t>());
  if (kind == "half_space") return half_space(j.at("axis").get<int>(), j.at("min").get<std::int64_t>());
  if (kind == "coset_union")
    return coset_union(SubgroupSpec::from_json(spec, j.at("subgroup")), points_from_json(spec, j.at("tiles")));
  if (kind == "materialized")
    return materialized(j.at("label").get<std::string>(), points_from_json(spec, j.at("points")),
                        j.at("radius").get<std::int64_t>(), j.value("payload", json::object()));
  if (kind == "union") return from_json(spec, j.at("args").at(0)) | from_json(spec, j.at("args").at(1));
  if (kind == "intersection") return from_json(spec, j.at("args").at(0)) & from_json(spec, j.at("args").at(1));
  if (kind == "difference") return from_json(spec, j.at("args").at(0)) - from_json(spec, j.at("args").at(1));
  if (kind == "complement") return from_json(spec, j.at("args").at(0)).complement();
  throw InvalidArgument("unknown set rule kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Bounded functions

namespace {

struct ConstantFn final : FunctionNode {
  Rational value;
  explicit ConstantFn(Rational v) : value(std::move(v)) {}
  Rational eval(const Group&, const Element&) const override { return value; }
  Rational sup_bound() const override { return rabs(value); }
  std::optional<std::vector<Element>> support(const Group&) const override {
    if (value == 0) return std::vector<Element>{};
    return std::nullopt;
  }
  std::string describe() const override { return to_string(value); }
  json to_json(const GroupSpec&) const override { return {{"kind", "constant"}, {"value", rational_to_json(value)}}; }
};

struct IndicatorFn final : FunctionNode {
  SetRule set;
  explicit IndicatorFn(SetRule s) : set(std::move(s)) {}
  Rational eval(const Group& g, const Element& x) const override { return set.contains(g, x) ? 1 : 0; }
  Rational sup_bound() const override { return 1; }
  std::optional<std::vector<Element>> support(const Group&) const override {
    if (auto p = set.finite_points()) return p->elements();
    return std::nullopt;
  }
  std::string describe() const override { return "chi[" + set.describe() + "]"; }
  json to_json(const GroupSpec& spec) const override { return {{"kind", "indicator"}, {"set", set.to_json(spec)}}; }
};

struct TableFn final : FunctionNode {
  std::map<Element, Rational> values;
  explicit TableFn(std::map<Element, Rational> v) : values(std::move(v)) {
    std::erase_if(values, [](const auto& kv) { return kv.second == 0; });
  }
  Rational eval(const Group&, const Element& x) const override {
    auto it = values.find(x);
    return it == values.end() ? Rational(0) : it->second;
  }
  Rational sup_bound() const override {
    Rational m = 0;
    for (const auto& [k, v] : values) m = std::max(m, rabs(v));
    return m;
  }
  std::optional<std::vector<Element>> support(const Group&) const override {
    std::vector<Element> out;
    for (const auto& [k, v] : values) out.push_back(k);
    return out;
  }
  std::string describe() const override { return "table(" + std::to_string(values.size()) + ")"; }
  json to_json(const GroupSpec& spec) const override {
    json entries = json::array();
    for (const auto& [k, v] : values)
      entries.push_back({{"at", spec.element_to_json(k)}, {"value", rational_to_json(v)}});
    return {{"kind", "table"}, {"entries", entries}};
  }
};

struct LinearFn final : FunctionNode {
  std::vector<std::pair<Rational, BoundedFunction>> terms;
  explicit LinearFn(std::vector<std::pair<Rational, BoundedFunction>> t) : terms(std::move(t)) {}
  Rational eval(const Group& g, const Element& x) const override {
    Rational acc = 0;
    for (const auto& [q, f] : terms) acc += q * f(g, x);
    return acc;
  }
  Rational sup_bound() const override {
    Rational acc = 0;
    for (const auto& [q, f] : terms) acc += rabs(q) * f.sup_bound();
    return acc;
  }
  std::optional<std::vector<Element>> support(const Group& g) const override {
    std::set<Element> out;
    for (const auto& [q, f] : terms) {
      if (q == 0) continue;
      auto s = f.finite_support(g);
      if (!s) return std::nullopt;
      out.insert(s->begin(), s->end());
    }
    return std::vector<Element>(out.begin(), out.end());
  }
  std::string describe() const override {
    std::string s;
    for (const auto& [q, f] : terms) s += (s.empty() ? "" : " + ") + to_string(q) + "*" + f.describe();
    return s.empty() ? "0" : s;
  }
  json to_json(const GroupSpec& spec) const override {
    json t = json::array();
    for (const auto& [q, f] : terms) t.push_back({{"coeff", rational_to_json(q)}, {"fn", f.to_json(spec)}});
    return {{"kind", "linear"}, {"terms", t}};
  }
};

enum class Action { Left, Right, Inverse };

struct ActionFn final : FunctionNode {
  Action action;
  Element by;
  BoundedFunction inner;
  ActionFn(Action a, Element g, BoundedFunction f) : action(a), by(g), inner(std::move(f)) {}
  Element pull(const Group& g, const Element& x) const {
    switch (action) {
      case Action::Left: return g.compose(g.invert(by), x);
      case Action::Right: return g.compose(x, by);
      default: return g.invert(x);
    }
  }
  Rational eval(const Group& g, const Element& x) const override { return inner(g, pull(g, x)); }
  Rational sup_bound() const override { return inner.sup_bound(); }
  std::optional<std::vector<Element>> support(const Group& g) const override {
    auto s = inner.finite_support(g);
    if (!s) return std::nullopt;
    // Push the support forward along the inverse of pull().
    for (auto& p : *s) {
      switch (action) {
        case Action::Left: p = g.compose(by, p); break;
        case Action::Right: p = g.compose(p, g.invert(by)); break;
        default: p = g.invert(p); break;
      }
    }
    std::sort(s->begin(), s->end());
    return s;
  }
  std::string describe() const override {
    switch (action) {
      case Action::Left: return to_string(by) + "·" + inner.describe();
      case Action::Right: return inner.describe() + "∘R" + to_string(by);
      default: return inner.describe() + "∘inv";
    }
  }
  json to_json(const GroupSpec& spec) const override {
    const char* k = action == Action::Left ? "left_translate" : action == Action::Right ? "right_translate" : "inversion";
    json out{{"kind", k}, {"fn", inner.to_json(spec)}};
    if (action != Action::Inverse) out["by"] = spec.element_to_json(by);
    return out;
  }
};

struct CosetPullbackFn final : FunctionNode {
  SubgroupSpec h;
  BoundedFunction psi;
  CosetPullbackFn(SubgroupSpec s, BoundedFunction f) : h(std::move(s)), psi(std::move(f)) {}
  Rational eval(const Group& g, const Element& x) const override { return psi(g, h.rep(x)); }
  Rational sup_bound() const override { return psi.sup_bound(); }
  std::string describe() const override { return "pi*(" + psi.describe() + ")"; }
  json to_json(const GroupSpec& spec) const override {
    return {{"kind", "coset_pullback"}, {"subgroup", h.to_json()}, {"fn", psi.to_json(spec)}};
  }
};

struct CosetAverageFn final : FunctionNode {
  SubgroupSpec h;
  std::int64_t j;
  BoundedFunction phi;
  std::vector<Element> box;
  CosetAverageFn(SubgroupSpec s, std::int64_t jj, BoundedFunction f)
      : h(std::move(s)), j(jj), phi(std::move(f)), box(h.folner_set(jj)) {}
  Rational eval(const Group& g, const Element& x) const override {
    const auto base = h.rep(x);
    Rational acc = 0;
    for (const auto& k : box) acc += phi(g, g.compose(k, base));
    return acc / static_cast<long>(box.size());
  }
  Rational sup_bound() const override { return phi.sup_bound(); }
  std::string describe() const override { return "tau_" + std::to_string(j) + "(" + phi.describe() + ")"; }
  json to_json(const GroupSpec& spec) const override {
    return {{"kind", "coset_average"}, {"subgroup", h.to_json()}, {"j", j}, {"fn", phi.to_json(spec)}};
  }
};

}  // namespace

BoundedFunction BoundedFunction::constant(Rational value) {
  return BoundedFunction(std::make_shared<ConstantFn>(std::move(value)));
}
BoundedFunction BoundedFunction::indicator(SetRule set) {
  return BoundedFunction(std::make_shared<IndicatorFn>(std::move(set)));
}
BoundedFunction BoundedFunction::delta(const Element& g) {
  return table({{g, Rational(1)}});
}
BoundedFunction BoundedFunction::table(std::map<Element, Rational> values) {
  return BoundedFunction(std::make_shared<TableFn>(std::move(values)));
}
BoundedFunction BoundedFunction::linear(std::vector<std::pair<Rational, BoundedFunction>> terms) {
  return BoundedFunction(std::make_shared<LinearFn>(std::move(terms)));
}
BoundedFunction BoundedFunction::coset_pullback(SubgroupSpec h, BoundedFunction psi) {
  return BoundedFunction(std::make_shared<CosetPullbackFn>(std::move(h), std::move(psi)));
}
BoundedFunction BoundedFunction::coset_average(SubgroupSpec h, std::int64_t j, BoundedFunction phi) {
  return BoundedFunction(std::make_shared<CosetAverageFn>(std::move(h), j, std::move(phi)));
}
BoundedFunction BoundedFunction::left_translate(const Element& g) const {
  return BoundedFunction(std::make_shared<ActionFn>(Action::Left, g, *this));
}
BoundedFunction BoundedFunction::right_translate(const Element& g) const {
  return BoundedFunction(std::make_shared<ActionFn>(Action::Right, g, *this));
}
BoundedFunction BoundedFunction::inverted() const {
  return BoundedFunction(std::make_shared<ActionFn>(Action::Inverse, Element{}, *this));
}
BoundedFunction operator+(const BoundedFunction& a, const BoundedFunction& b) {
  return BoundedFunction::linear({{Rational(1), a}, {Rational(1), b}});
}
BoundedFunction operator*(const Rational& q, const BoundedFunction& f) {
  return BoundedFunction::linear({{q, f}});
}

Rational BoundedFunction::operator()(const Group& group, const Element& x) const { return node_->eval(group, x); }
Rational BoundedFunction::sup_bound() const { return node_->sup_bound(); }
std::optional<std::vector<Element>> BoundedFunction::finite_support(const Group& group) const {
  return node_->support(group);
}

std::optional<std::map<Element, Rational>> BoundedFunction::materialize(const Group& group) const {
  auto s = finite_support(group);
  if (!s) return std::nullopt;
  std::map<Element, Rational> out;
  for (const auto& p : *s) {
    auto v = (*this)(group, p);
    if (v != 0) out.emplace(p, std::move(v));
  }
  return out;
}

std::string BoundedFunction::describe() const { return node_->describe(); }
json BoundedFunction::to_json(const GroupSpec& spec) const { return node_->to_json(spec); }

BoundedFunction BoundedFunction::from_json(const GroupSpec& spec, const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return constant(rational_from_json(j.at("value")));
  if (kind == "indicator") return indicator(SetRule::from_json(spec, j.at("set")));
  if (kind == "table") {
    std::map<Element, Rational> v;
    for (const auto& e : j.at("entries")) v.emplace(spec.element_from_json(e.at("at")), rational_from_json(e.at("value")));
    return table(std::move(v));
  }
  if (kind == "linear") {
    std::vector<std::pair<Rational, BoundedFunction>> t;
    for (const auto& e : j.at("terms")) t.emplace_back(rational_from_json(e.at("coeff")), from_json(spec, e.at("fn")));
    return linear(std::move(t));
  }
  if (kind == "left_translate") return from_json(spec, j.at("fn")).left_translate(spec.element_from_json(j.at("by")));
  if (kind == "right_translate") return from_json(spec, j.at("fn")).right_translate(spec.element_from_json(j.at("by")));
  if (kind == "inversion") return from_json(spec, j.at("fn")).inverted();
  if (kind == "coset_pullback")
    return coset_pullback(SubgroupSpec::from_json(spec, j.at("subgroup")), from_json(spec, j.at("fn")));
  if (kind == "coset_average")
    return coset_average(SubgroupSpec::from_json(spec, j.at("subgroup")), j.at("j").get<std::int64_t>(),
                         from_json(spec, j.at("fn")));
  throw InvalidArgument("unknown function kind '" + kind + "'");
}

Rational sum_over(const Group& group, const BoundedFunction& f, const FiniteSubset& s) {
  Rational acc = 0;
  for (const auto& p : s) acc += f(group, p);
  return acc;
}

}  // namespace ufh
