#include "ufh/io.hpp"

#include <fstream>
#include <sstream>

#include "ufh/errors.hpp"

namespace ufh {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_value(const Rational& q, bool rational) { return rational ? to_string(q) : to_decimal(q); }

std::string csv_preamble(const EmitContext& ctx) {
  return std::string("# ufh ") + kVersion + " config=" + ctx.config_hash + " window=" + std::to_string(ctx.window) + "\n";
}

std::string growth_csv(const GrowthTable& t, const EmitContext& ctx) {
  std::ostringstream os;
  os << csv_preamble(ctx);
  os << "j,size,boundary,sigma,chain_sum,beta,beta_over_sigma\n";
  const auto opt = [&](const std::optional<Rational>& q) { return q ? format_value(*q, ctx.rational) : std::string(); };
  for (const auto& r : t.rows)
    os << r.j << ',' << r.size << ',' << r.boundary << ',' << format_value(r.sigma, ctx.rational) << ','
       << opt(r.chain_sum) << ',' << opt(r.beta) << ',' << opt(r.beta_over_sigma) << '\n';
  if (t.truncated) os << "# truncated at j=" << t.truncated_at << '\n';
  return os.str();
}

std::string density_csv(const TilingIndex& idx, const EmitContext& ctx) {
  std::ostringstream os;
  os << csv_preamble(ctx);
  os << "j,tiles,size,density,lower,upper\n";
  for (const auto& r : idx.rows)
    os << r.j << ',' << r.tiles << ',' << r.size << ',' << format_value(r.density, ctx.rational) << ','
       << format_value(r.lower, ctx.rational) << ',' << format_value(r.upper, ctx.rational) << '\n';
  if (idx.truncated) os << "# truncated\n";
  return os.str();
}

std::string cloud_csv(const GroupSpec& spec, const SparseSet& s, const EmitContext& ctx) {
  static const char* names[] = {"x", "y", "z", "w"};
  std::ostringstream os;
  os << csv_preamble(ctx);
  const auto n = spec.coord_count();
  for (std::size_t i = 0; i < n; ++i) os << names[i] << ',';
  os << "ring\n";
  for (const auto& p : s.points) {
    for (std::size_t i = 0; i < n; ++i) os << p[i] << ',';
    os << s.ring.at(p) << '\n';
  }
  if (s.truncated) os << "# truncated at j=" << s.j_max << '\n';
  return os.str();
}

json growth_json(const GrowthTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row{{"j", r.j}, {"size", r.size}, {"boundary", r.boundary}, {"sigma", rational_to_json(r.sigma)}};
    if (r.chain_sum) row["chain_sum"] = rational_to_json(*r.chain_sum);
    if (r.beta) row["beta"] = rational_to_json(*r.beta);
    if (r.beta_over_sigma) row["beta_over_sigma"] = rational_to_json(*r.beta_over_sigma);
    rows.push_back(row);
  }
  json out{{"group", t.group}, {"family", t.family}, {"chain", t.chain}, {"rows", rows},
           {"truncated", t.truncated}, {"non_monotone", t.non_monotone}};
  if (t.truncated) out["truncated_at"] = t.truncated_at;
  return out;
}

json sparse_json(const SparseSet& s) {
  const auto& spec = s.group.spec();
  json rows = json::array();
  for (const auto& r : s.rows) {
    json row{{"j", r.j},
             {"r", r.r},
             {"fallback", r.fallback},
             {"binding", r.binding},
             {"ratio_ok", r.ratio_ok},
             {"sqrt_c_ok", r.sqrt_c_ok},
             {"index_ok", r.index_ok},
             {"c", rational_to_json(r.c)},
             {"set_size", r.set_size},
             {"ring_points", r.ring_points},
             {"tiles_now", r.tiles_now},
             {"tiles_before", r.tiles_before},
             {"density", rational_to_json(r.density)},
             {"ring_bound", rational_to_json(r.ring_bound)}};
    row["tiling_index"] = r.tiling_index ? json(*r.tiling_index) : json(nullptr);
    rows.push_back(row);
  }
  json thresholds = json::object();
  for (std::int64_t r = 1; 2 * r < s.max_r(); ++r)
    if (auto t = s.ring_threshold(r)) thresholds[std::to_string(r)] = *t;
  return {{"group", spec.to_json()},   {"rule", s.rule.to_json(spec)}, {"rows", rows},
          {"j_max", s.j_max},          {"truncated", s.truncated},     {"known_radius", s.known_radius},
          {"tiling_window", s.tiling_window}, {"ring_thresholds", thresholds}, {"log", s.log},
          {"size", s.points.size()}};
}

json subset_json(const GroupSpec& spec, const FiniteSubset& s) {
  json out = json::array();
  for (const auto& p : s) out.push_back(spec.element_to_json(p));
  return out;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << data;
  if (!f) throw Error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace ufh
