#pragma once

// Output formats: CSV with a provenance comment line, canonical JSON.

#include <cstdint>
#include <string>
#include <vector>

#include "ufh/classes.hpp"

namespace ufh {

inline constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

struct EmitContext {
  std::string config_hash = "0000000000000000";
  std::int64_t window = 0;
  bool rational = false;
};

std::string format_value(const Rational& q, bool rational);

/// "# ufh <version> config=<hash> window=<W>\n"
std::string csv_preamble(const EmitContext& ctx);

std::string growth_csv(const GrowthTable& t, const EmitContext& ctx);
std::string density_csv(const TilingIndex& idx, const EmitContext& ctx);
/// x,y[,z],ring rows in canonical element order.
std::string cloud_csv(const GroupSpec& spec, const SparseSet& s, const EmitContext& ctx);

json growth_json(const GrowthTable& t);
json sparse_json(const SparseSet& s);
json subset_json(const GroupSpec& spec, const FiniteSubset& s);

/// Sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const json& j);

void write_file(const std::string& path, const std::string& data);
std::string read_file(const std::string& path);

}  // namespace ufh
