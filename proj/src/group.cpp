#include "ufh/group.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw BeyondWindow("coordinate overflow");
  return out;
}

std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw BeyondWindow("coordinate overflow");
  return out;
}

Matrix2 matmul(const Matrix2& x, const Matrix2& y) {
  Matrix2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = add(mul(x[i][0], y[0][j]), mul(x[i][1], y[1][j]));
  return out;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::IntLattice: return "IntLattice";
    case Family::Heisenberg3: return "Heisenberg3";
    case Family::LatticeSemidirect: return "LatticeSemidirect";
  }
  return "?";
}

Element::Element(Family family, std::span<const std::int64_t> coords) : family_(family) {
  if (coords.size() > kMaxCoords) throw InvalidArgument("too many coordinates");
  size_ = static_cast<std::uint8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

std::size_t ElementHash::operator()(const Element& g) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(g.family());
  for (auto c : g.coords()) {
    std::uint64_t z = h + static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    h = z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

std::string to_string(const Element& g) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::int_lattice(int d) {
  if (d < 1 || d > static_cast<int>(kMaxCoords))
    throw InvalidArgument("IntLattice rank must be in 1.." + std::to_string(kMaxCoords));
  GroupSpec s;
  s.family_ = Family::IntLattice;
  s.rank_ = d;
  return s;
}

GroupSpec GroupSpec::heisenberg3() {
  GroupSpec s;
  s.family_ = Family::Heisenberg3;
  s.rank_ = 3;
  return s;
}

GroupSpec GroupSpec::lattice_semidirect(const Matrix2& a) {
  const std::int64_t det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  if (det != 1 && det != -1) throw InvalidArgument("semidirect matrix must have determinant ±1");
  GroupSpec s;
  s.family_ = Family::LatticeSemidirect;
  s.rank_ = 3;
  s.a_ = a;
  return s;
}

std::size_t GroupSpec::coord_count() const noexcept {
  return family_ == Family::IntLattice ? static_cast<std::size_t>(rank_) : 3;
}

Element GroupSpec::identity() const {
  std::array<std::int64_t, kMaxCoords> zero{};
  return Element(family_, std::span<const std::int64_t>(zero.data(), coord_count()));
}

Element GroupSpec::make(std::initializer_list<std::int64_t> coords) const {
  return make(std::span<const std::int64_t>(coords.begin(), coords.size()));
}

Element GroupSpec::make(std::span<const std::int64_t> coords) const {
  if (coords.size() != coord_count())
    throw ModelMismatch(name() + " expects " + std::to_string(coord_count()) + " coordinates");
  return Element(family_, coords);
}

std::vector<Element> GroupSpec::generators() const {
  std::vector<Element> out;
  const auto n = coord_count();
  const auto basis = [&](std::size_t i) {
    std::array<std::int64_t, kMaxCoords> c{};
    c[i] = 1;
    return Element(family_, std::span<const std::int64_t>(c.data(), n));
  };
  switch (family_) {
    case Family::IntLattice:
      for (std::size_t i = 0; i < n; ++i) out.push_back(basis(i));
      break;
    case Family::Heisenberg3:
      out = {basis(0), basis(1)};
      break;
    case Family::LatticeSemidirect:
      out = {basis(0), basis(1), basis(2)};
      break;
  }
  return out;
}

std::vector<Element> GroupSpec::symmetric_generators() const {
  std::vector<Element> out;
  for (const auto& s : generators()) {
    for (const auto& t : {s, invert(s)}) {
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  }
  return out;
}

bool GroupSpec::belongs(const Element& g) const noexcept {
  return g.family() == family_ && g.size() == coord_count();
}

void GroupSpec::check(const Element& g) const {
  if (!belongs(g)) throw ModelMismatch("element " + to_string(g) + " does not belong to " + name());
}

Matrix2 GroupSpec::matrix_power(std::int64_t k) const {
  Matrix2 base = a_;
  if (k < 0) {
    const std::int64_t det = a_[0][0] * a_[1][1] - a_[0][1] * a_[1][0];
    base = {{{a_[1][1] * det, -a_[0][1] * det}, {-a_[1][0] * det, a_[0][0] * det}}};
    k = -k;
  }
  Matrix2 out{{{1, 0}, {0, 1}}};
  while (k > 0) {
    if (k & 1) out = matmul(out, base);
    k >>= 1;
    if (k > 0) base = matmul(base, base);
  }
  return out;
}

Element GroupSpec::compose(const Element& a, const Element& b) const {
  check(a);
  check(b);
  std::array<std::int64_t, kMaxCoords> c{};
  switch (family_) {
    case Family::IntLattice:
      for (std::size_t i = 0; i < a.size(); ++i) c[i] = add(a[i], b[i]);
      break;
    case Family::Heisenberg3:
      c[0] = add(a[0], b[0]);
      c[1] = add(a[1], b[1]);
      c[2] = add(add(a[2], b[2]), mul(a[0], b[1]));
      break;
    case Family::LatticeSemidirect: {
      const auto m = matrix_power(a[2]);
      c[0] = add(a[0], add(mul(m[0][0], b[0]), mul(m[0][1], b[1])));
      c[1] = add(a[1], add(mul(m[1][0], b[0]), mul(m[1][1], b[1])));
      c[2] = add(a[2], b[2]);
      break;
    }
  }
  return Element(family_, std::span<const std::int64_t>(c.data(), coord_count()));
}

Element GroupSpec::invert(const Element& a) const {
  check(a);
  std::array<std::int64_t, kMaxCoords> c{};
  switch (family_) {
    case Family::IntLattice:
      for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
      break;
    case Family::Heisenberg3:
      c[0] = -a[0];
      c[1] = -a[1];
      c[2] = add(-a[2], mul(a[0], a[1]));
      break;
    case Family::LatticeSemidirect: {
      const auto m = matrix_power(-a[2]);
      c[0] = -add(mul(m[0][0], a[0]), mul(m[0][1], a[1]));
      c[1] = -add(mul(m[1][0], a[0]), mul(m[1][1], a[1]));
      c[2] = -a[2];
      break;
    }
  }
  return Element(family_, std::span<const std::int64_t>(c.data(), coord_count()));
}

std::string GroupSpec::name() const {
  switch (family_) {
    case Family::IntLattice: return rank_ == 1 ? "Z" : "Z" + std::to_string(rank_);
    case Family::Heisenberg3: return "Heis3";
    case Family::LatticeSemidirect: {
      std::ostringstream os;
      os << "Z2xA[[" << a_[0][0] << ',' << a_[0][1] << "],[" << a_[1][0] << ',' << a_[1][1]
         << "]]";
      return os.str();
    }
  }
  return "?";
}

json GroupSpec::to_json() const {
  json params = json::object();
  if (family_ == Family::IntLattice) params["d"] = rank_;
  if (family_ == Family::LatticeSemidirect)
    params["A"] = json::array({json::array({a_[0][0], a_[0][1]}), json::array({a_[1][0], a_[1][1]})});
  return json{{"family", to_string(family_)}, {"params", params}};
}

GroupSpec GroupSpec::from_json(const json& j) {
  const auto family = j.at("family").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (family == "IntLattice") return int_lattice(params.at("d").get<int>());
  if (family == "Heisenberg3") return heisenberg3();
  if (family == "LatticeSemidirect") {
    const auto& m = params.at("A");
    Matrix2 a{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) a[r][c] = m.at(r).at(c).get<std::int64_t>();
    return lattice_semidirect(a);
  }
  throw InvalidArgument("unknown group family '" + family + "'");
}

json GroupSpec::element_to_json(const Element& g) const {
  check(g);
  if (family_ == Family::LatticeSemidirect) return json::array({json::array({g[0], g[1]}), g[2]});
  json out = json::array();
  for (auto c : g.coords()) out.push_back(c);
  return out;
}

Element GroupSpec::element_from_json(const json& j) const {
  if (!j.is_array()) throw InvalidArgument("element must be a JSON array");
  if (family_ == Family::LatticeSemidirect) {
    if (j.size() != 2 || !j.at(0).is_array() || j.at(0).size() != 2)
      throw ModelMismatch("semidirect elements serialize as [[v1,v2],k]");
    return make({j[0][0].get<std::int64_t>(), j[0][1].get<std::int64_t>(), j[1].get<std::int64_t>()});
  }
  std::vector<std::int64_t> c;
  for (const auto& v : j) c.push_back(v.get<std::int64_t>());
  return make(std::span<const std::int64_t>(c));
}

// ---------------------------------------------------------------------------
// WordMetric

WordMetric::WordMetric(GroupSpec spec, std::size_t cap)
    : spec_(std::move(spec)), cap_(cap), generators_(spec_.symmetric_generators()) {
  const auto e = spec_.identity();
  spheres_.push_back({e});
  dist_.emplace(e, 0);
  total_ = 1;
}

void WordMetric::expand_one_layer() {
  const auto r = static_cast<std::int32_t>(spheres_.size());
  std::vector<Element> next;
  std::unordered_set<Element, ElementHash> seen;
  for (const auto& g : spheres_.back()) {
    for (const auto& s : generators_) {
      auto h = spec_.compose(g, s);
      if (dist_.contains(h) || seen.contains(h)) continue;
      if (total_ + next.size() + 1 > cap_)
        throw BeyondWindow("word-metric enumeration cap of " + std::to_string(cap_) +
                           " elements exceeded at radius " + std::to_string(r));
      seen.insert(h);
      next.push_back(h);
    }
  }
  for (const auto& h : next) dist_.emplace(h, r);
  total_ += next.size();
  spheres_.push_back(std::move(next));
}

void WordMetric::ensure_radius(std::int64_t r) {
  {
    std::shared_lock lock(mutex_);
    if (static_cast<std::int64_t>(spheres_.size()) > r) return;
  }
  std::unique_lock lock(mutex_);
  while (static_cast<std::int64_t>(spheres_.size()) <= r) expand_one_layer();
}

std::int64_t WordMetric::explored_radius() const {
  std::shared_lock lock(mutex_);
  return static_cast<std::int64_t>(spheres_.size()) - 1;
}

std::optional<std::int64_t> WordMetric::known_length(const Element& g) const {
  std::shared_lock lock(mutex_);
  auto it = dist_.find(g);
  if (it == dist_.end()) return std::nullopt;
  return it->second;
}

std::int64_t WordMetric::length(const Element& g) {
  spec_.check(g);
  if (auto d = known_length(g)) return *d;
  std::unique_lock lock(mutex_);
  for (;;) {
    if (auto it = dist_.find(g); it != dist_.end()) return it->second;
    try {
      expand_one_layer();
    } catch (const BeyondWindow&) {
      throw BeyondWindow("element " + to_string(g) + " is beyond the enumeration window");
    }
  }
}

std::size_t WordMetric::ball_size(std::int64_t r) {
  if (r < 0) return 0;
  ensure_radius(r);
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (std::int64_t i = 0; i <= r; ++i) n += spheres_[static_cast<std::size_t>(i)].size();
  return n;
}

std::size_t WordMetric::sphere_size(std::int64_t r) {
  if (r < 0) return 0;
  ensure_radius(r);
  std::shared_lock lock(mutex_);
  return spheres_[static_cast<std::size_t>(r)].size();
}

std::span<const Element> WordMetric::sphere(std::int64_t r) {
  ensure_radius(r);
  std::shared_lock lock(mutex_);
  const auto& s = spheres_[static_cast<std::size_t>(r)];
  return {s.data(), s.size()};
}

std::vector<Element> WordMetric::ball_bfs(std::int64_t r) {
  std::vector<Element> out;
  if (r < 0) return out;
  out.reserve(ball_size(r));
  std::shared_lock lock(mutex_);
  for (std::int64_t i = 0; i <= r; ++i) {
    const auto& s = spheres_[static_cast<std::size_t>(i)];
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

void WordMetric::save(const std::string& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const auto header = spec_.to_json().dump();
  const std::uint64_t hlen = header.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
  out.write(header.data(), static_cast<std::streamsize>(hlen));
  const std::uint64_t layers = spheres_.size();
  out.write(reinterpret_cast<const char*>(&layers), sizeof layers);
  const auto n = spec_.coord_count();
  for (const auto& s : spheres_) {
    const std::uint64_t len = s.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    for (const auto& g : s) out.write(reinterpret_cast<const char*>(g.coords().data()),
                                      static_cast<std::streamsize>(n * sizeof(std::int64_t)));
  }
}

bool WordMetric::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::uint64_t hlen = 0;
  if (!in.read(reinterpret_cast<char*>(&hlen), sizeof hlen) || hlen > (1u << 20)) return false;
  std::string header(hlen, '\0');
  in.read(header.data(), static_cast<std::streamsize>(hlen));
  if (!in || header != spec_.to_json().dump()) return false;
  std::uint64_t layers = 0;
  in.read(reinterpret_cast<char*>(&layers), sizeof layers);
  const auto n = spec_.coord_count();
  std::vector<std::vector<Element>> spheres;
  std::size_t total = 0;
  for (std::uint64_t l = 0; in && l < layers; ++l) {
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || total + len > cap_) return false;
    std::vector<Element> s;
    s.reserve(len);
    std::array<std::int64_t, kMaxCoords> c{};
    for (std::uint64_t i = 0; i < len; ++i) {
      in.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(n * sizeof(std::int64_t)));
      s.emplace_back(spec_.family(), std::span<const std::int64_t>(c.data(), n));
    }
    total += len;
    spheres.push_back(std::move(s));
  }
  if (!in || spheres.empty()) return false;
  std::unique_lock lock(mutex_);
  if (spheres.size() <= spheres_.size()) return true;
  spheres_ = std::move(spheres);
  dist_.clear();
  dist_.reserve(total);
  for (std::size_t r = 0; r < spheres_.size(); ++r)
    for (const auto& g : spheres_[r]) dist_.emplace(g, static_cast<std::int32_t>(r));
  total_ = total;
  return true;
}

// ---------------------------------------------------------------------------
// Group

Group::Group(GroupSpec spec, std::size_t cap)
    : spec_(spec), metric_(std::make_shared<WordMetric>(std::move(spec), cap)) {}

std::int64_t Group::word_length(const Element& g) const { return metric_->length(g); }

std::int64_t Group::distance(const Element& g, const Element& h) const {
  return metric_->length(spec_.compose(spec_.invert(g), h));
}

// ---------------------------------------------------------------------------
// SubgroupSpec

SubgroupSpec SubgroupSpec::coordinate(const GroupSpec& g, std::vector<int> axes) {
  if (g.family() != Family::IntLattice)
    throw InvalidArgument("coordinate subgroups are defined for IntLattice only");
  std::sort(axes.begin(), axes.end());
  axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
  for (int a : axes)
    if (a < 1 || a > g.rank()) throw InvalidArgument("subgroup axis out of range");
  if (static_cast<int>(axes.size()) == g.rank())
    throw InvalidArgument("subgroup must have infinite index (drop at least one axis)");
  SubgroupSpec s;
  s.kind_ = Kind::Coordinate;
  s.ambient_ = g;
  s.axes_ = std::move(axes);
  return s;
}

SubgroupSpec SubgroupSpec::heisenberg_center() {
  SubgroupSpec s;
  s.kind_ = Kind::HeisenbergCenter;
  s.ambient_ = GroupSpec::heisenberg3();
  return s;
}

bool SubgroupSpec::contains(const Element& g) const {
  ambient_.check(g);
  return rep(g) == ambient_.identity();
}

Element SubgroupSpec::rep(const Element& g) const {
  ambient_.check(g);
  std::array<std::int64_t, kMaxCoords> c{};
  std::copy(g.coords().begin(), g.coords().end(), c.begin());
  if (kind_ == Kind::Coordinate) {
    for (int a : axes_) c[static_cast<std::size_t>(a - 1)] = 0;
  } else {
    c[2] = 0;
  }
  return Element(g.family(), std::span<const std::int64_t>(c.data(), g.size()));
}

std::vector<Element> SubgroupSpec::folner_set(std::int64_t j) const {
  if (j < 0) throw InvalidArgument("Følner index must be non-negative");
  std::vector<Element> out;
  if (kind_ == Kind::HeisenbergCenter) {
    for (std::int64_t c = -j; c <= j; ++c) out.push_back(ambient_.make({0, 0, c}));
    return out;
  }
  const auto n = ambient_.coord_count();
  std::array<std::int64_t, kMaxCoords> c{};
  for (int a : axes_) c[static_cast<std::size_t>(a - 1)] = -j;
  for (;;) {
    out.emplace_back(ambient_.family(), std::span<const std::int64_t>(c.data(), n));
    std::size_t i = 0;
    for (; i < axes_.size(); ++i) {
      auto& x = c[static_cast<std::size_t>(axes_[i] - 1)];
      if (x < j) {
        ++x;
        break;
      }
      x = -j;
    }
    if (i == axes_.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> SubgroupSpec::elements_in_ball(const Group& g, std::int64_t r) const {
  std::vector<Element> out;
  for (const auto& x : g.metric().ball_bfs(r))
    if (contains(x)) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

std::string SubgroupSpec::name() const {
  if (kind_ == Kind::HeisenbergCenter) return "center";
  std::string s = "axes:";
  for (std::size_t i = 0; i < axes_.size(); ++i) s += (i ? "," : "") + std::to_string(axes_[i]);
  return s;
}

json SubgroupSpec::to_json() const {
  if (kind_ == Kind::HeisenbergCenter) return json{{"kind", "HeisCenter"}};
  return json{{"kind", "Coordinate"}, {"axes", axes_}};
}

SubgroupSpec SubgroupSpec::from_json(const GroupSpec& ambient, const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "HeisCenter") {
    if (ambient.family() != Family::Heisenberg3) throw ModelMismatch("center subgroup needs Heis3");
    return heisenberg_center();
  }
  if (kind == "Coordinate") return coordinate(ambient, j.at("axes").get<std::vector<int>>());
  throw InvalidArgument("unknown subgroup kind '" + kind + "'");
}

}  // namespace ufh
