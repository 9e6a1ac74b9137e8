#include "ufh/chains.hpp"

#include <algorithm>
#include <set>

#include "ufh/errors.hpp"

namespace ufh {

void UfChain::add(const Tuple& x, const Rational& q) {
  if (static_cast<int>(x.size()) != degree_ + 1)
    throw InvalidArgument("tuple of length " + std::to_string(x.size()) + " in a degree-" +
                          std::to_string(degree_) + " chain");
  if (q == 0) return;
  auto [it, fresh] = entries_.try_emplace(x, q);
  if (!fresh) {
    it->second += q;
    if (it->second == 0) entries_.erase(it);
  }
}

Rational UfChain::coefficient(const Tuple& x) const {
  auto it = entries_.find(x);
  return it == entries_.end() ? Rational(0) : it->second;
}

Rational UfChain::sup_norm() const {
  Rational m = 0;
  for (const auto& [x, q] : entries_) m = std::max(m, rabs(q));
  return m;
}

std::int64_t UfChain::measured_span(const Group& group) const {
  std::int64_t m = 0;
  for (const auto& [x, q] : entries_)
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = i + 1; k < x.size(); ++k) m = std::max(m, group.distance(x[i], x[k]));
  return m;
}

json UfChain::to_json(const GroupSpec& spec) const {
  json entries = json::array();
  for (const auto& [x, q] : entries_) {
    json t = json::array();
    for (const auto& g : x) t.push_back(spec.element_to_json(g));
    entries.push_back({{"tuple", t}, {"coeff", rational_to_json(q)}});
  }
  return {{"degree", degree_}, {"span", span_}, {"entries", entries}};
}

UfChain UfChain::from_json(const GroupSpec& spec, const json& j) {
  UfChain c(j.at("degree").get<int>(), j.value("span", std::int64_t{0}));
  for (const auto& e : j.at("entries")) {
    Tuple x;
    for (const auto& g : e.at("tuple")) x.push_back(spec.element_from_json(g));
    c.add(x, rational_from_json(e.at("coeff")));
  }
  return c;
}

UfChain boundary(const UfChain& c) {
  if (c.degree() < 1) throw InvalidArgument("boundary of a degree-0 chain");
  UfChain out(c.degree() - 1, c.span());
  for (const auto& [x, q] : c.entries()) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      Tuple face;
      face.reserve(x.size() - 1);
      for (std::size_t k = 0; k < x.size(); ++k)
        if (k != i) face.push_back(x[k]);
      out.add(face, i % 2 == 0 ? q : Rational(-q));
    }
  }
  return out;
}

namespace {

Tuple normalized_tail(const Group& group, const Tuple& x) {
  const auto inv = group.invert(x.front());
  Tuple t;
  t.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) t.push_back(group.compose(inv, x[i]));
  return t;
}

}  // namespace

UfChain normalize(const Group& group, const UfChain& c) {
  UfChain out(c.degree(), c.span());
  for (const auto& [x, q] : c.entries()) {
    Tuple y{group.identity()};
    for (auto& g : normalized_tail(group, x)) y.push_back(g);
    out.add(y, q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ℓ∞ form

void LInftyChain::add(const Tuple& t, const BoundedFunction& f) {
  if (static_cast<int>(t.size()) != degree_)
    throw InvalidArgument("ℓ∞ tuple length must equal the degree");
  auto it = terms_.find(t);
  if (it == terms_.end())
    terms_.emplace(t, f);
  else
    it->second = it->second + f;
}

json LInftyChain::to_json(const GroupSpec& spec) const {
  json terms = json::array();
  for (const auto& [t, f] : terms_) {
    json tj = json::array();
    for (const auto& g : t) tj.push_back(spec.element_to_json(g));
    terms.push_back({{"tuple", tj}, {"fn", f.to_json(spec)}});
  }
  return {{"degree", degree_}, {"terms", terms}};
}

LInftyChain rho(const Group& group, const UfChain& c) {
  std::map<Tuple, std::map<Element, Rational>> tables;
  for (const auto& [x, q] : c.entries()) {
    auto& tab = tables[normalized_tail(group, x)];
    tab[group.invert(x.front())] += q;
  }
  LInftyChain out(c.degree());
  for (auto& [t, tab] : tables) out.add(t, BoundedFunction::table(std::move(tab)));
  return out;
}

UfChain rho_inv(const Group& group, const LInftyChain& c, std::int64_t span) {
  UfChain out(c.degree(), span);
  for (const auto& [t, f] : c.terms()) {
    auto tab = f.materialize(group);
    if (!tab) throw InvalidArgument("rho_inv needs finitely supported coefficients, got " + f.describe());
    for (const auto& [g, q] : *tab) {
      const auto gi = group.invert(g);
      Tuple x{gi};
      for (const auto& ti : t) x.push_back(group.compose(gi, ti));
      out.add(x, q);
    }
  }
  return out;
}

LInftyChain boundary(const Group& group, const LInftyChain& c) {
  if (c.degree() < 1) throw InvalidArgument("boundary of a degree-0 chain");
  LInftyChain out(c.degree() - 1);
  for (const auto& [t, f] : c.terms()) {
    // Face 0 re-bases at t_1: (t_1⁻¹t_2, ..., t_1⁻¹t_n) ⊗ t_1⁻¹·φ.
    const auto t1i = group.invert(t.front());
    Tuple face0;
    for (std::size_t i = 1; i < t.size(); ++i) face0.push_back(group.compose(t1i, t[i]));
    out.add(face0, f.left_translate(t1i));
    for (std::size_t i = 0; i < t.size(); ++i) {
      Tuple face;
      for (std::size_t k = 0; k < t.size(); ++k)
        if (k != i) face.push_back(t[k]);
      out.add(face, (i % 2 == 0 ? Rational(-1) : Rational(1)) * f);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Means and transfer

ApproxMean::ApproxMean(FolnerFamily family, int j)
    : family_(std::move(family)), j_(j), set_(family_.set(j)) {}

Rational ApproxMean::operator()(const BoundedFunction& f) const {
  return sum_over(family_.group(), f, set_) / static_cast<long>(set_.size());
}

UfChain transfer(const Group& group, const LInftyChain& c, const ApproxMean& mean) {
  UfChain out(c.degree());
  std::int64_t span = 0;
  for (const auto& [t, f] : c.terms()) {
    Tuple x{group.identity()};
    x.insert(x.end(), t.begin(), t.end());
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = i + 1; k < x.size(); ++k) span = std::max(span, group.distance(x[i], x[k]));
    out.add(x, mean(f));
  }
  out.set_span(span);
  return out;
}

LInftyChain i_star(const Group& group, const UfChain& c) {
  std::map<Tuple, Rational> sums;
  for (const auto& [x, q] : c.entries()) sums[normalized_tail(group, x)] += q;
  LInftyChain out(c.degree());
  for (const auto& [t, q] : sums)
    if (q != 0) out.add(t, BoundedFunction::constant(q));
  return out;
}

InvarianceCheck right_translation_check(const BoundedFunction& f, const Element& g,
                                        const ApproxMean& mean) {
  const auto& group = mean.family().group();
  const auto shift = group.word_length(g);
  InvarianceCheck out;
  out.deviation = rabs(mean(f.right_translate(g)) - mean(f));
  if (shift == 0) {
    out.bound = 0;
    return out;
  }
  const auto rim = r_boundary(group, mean.set(), shift);
  out.bound = 2 * f.sup_bound() * make_rational(static_cast<std::int64_t>(rim.size()),
                                                static_cast<std::int64_t>(mean.set().size()));
  return out;
}

// ---------------------------------------------------------------------------
// Pushforward and invariant cycles

UfChain qi_push(const UfChain& c, const QiMap& f) {
  Rational s = f.lambda * static_cast<long>(c.span()) + f.epsilon;
  mpz_class ceil_s;
  mpz_cdiv_q(ceil_s.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  UfChain out(c.degree(), ceil_s.get_si());
  for (const auto& [x, q] : c.entries()) {
    Tuple y;
    y.reserve(x.size());
    for (const auto& g : x) y.push_back(f.map(g));
    out.add(y, q);
  }
  return out;
}

std::vector<Element> boundary_defects(const Group& group, const UfChain& c, std::int64_t r) {
  std::vector<Element> out;
  if (c.degree() < 1) return out;
  const auto b = boundary(c);
  for (const auto& [x, q] : b.entries())
    if (group.word_length(x.front()) <= r) out.push_back(x.front());
  return out;
}

InvariantCycle invariant_cycle(const Group& group, const SubgroupSpec& h, const UfChain& templ,
                               const BoundedFunction& phi, Window window) {
  if (templ.degree() < 1) throw InvalidArgument("invariant cycles need a template of degree ≥ 1");
  for (const auto& [x, q] : templ.entries()) {
    if (x.front() != group.identity())
      throw InvalidArgument("template tuples must begin with the identity");
    for (const auto& g : x)
      if (!h.contains(g))
        throw VerificationFailure("template leaves the subgroup " + h.name(),
                                  json{{"point", group.spec().element_to_json(g)}}.dump());
  }
  const auto defect = normalize(group, boundary(templ));
  if (!defect.empty()) {
    const auto& [x, q] = *defect.entries().begin();
    json t = json::array();
    for (const auto& g : x) t.push_back(group.spec().element_to_json(g));
    throw VerificationFailure("template is not a cycle over " + h.name(),
                              json{{"tuple", t}, {"coeff", rational_to_json(q)}}.dump());
  }
  std::vector<Element> hgens;
  for (const auto& s : group.spec().symmetric_generators())
    if (h.contains(s)) hgens.push_back(s);
  if (h.kind() == SubgroupSpec::Kind::HeisenbergCenter) {
    const auto z = group.make({0, 0, 1});
    hgens = {z, group.invert(z)};
  }
  for (const auto& g : group.metric().ball_bfs(std::max<std::int64_t>(window.radius - 1, 0))) {
    const auto base = phi(group, g);
    for (const auto& s : hgens) {
      if (phi(group, group.compose(s, g)) != base)
        throw VerificationFailure(
            "coefficient function is not left-invariant under " + h.name(),
            json{{"point", group.spec().element_to_json(g)}, {"by", group.spec().element_to_json(s)}}.dump());
    }
  }
  const auto span = templ.measured_span(group);
  InvariantCycle out{UfChain(templ.degree(), span), window, window.radius - span};
  for (const auto& g : group.metric().ball_bfs(window.radius)) {
    const auto v = phi(group, g);
    if (v == 0) continue;
    for (const auto& [x, q] : templ.entries()) {
      Tuple y;
      for (const auto& t : x) y.push_back(group.compose(g, t));
      out.chain.add(y, v * q);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coset maps

BoundedFunction pi_star(const SubgroupSpec& h, const BoundedFunction& psi) {
  return BoundedFunction::coset_pullback(h, psi);
}

BoundedFunction coset_average(const SubgroupSpec& h, const BoundedFunction& phi, std::int64_t j) {
  if (!h.normal()) throw InvalidArgument("coset averaging needs a normal subgroup");
  if (j < 0) throw InvalidArgument("H-Følner index must be non-negative");
  return BoundedFunction::coset_average(h, j, phi);
}

}  // namespace ufh
