#pragma once

// Command-line front end and the named presets it shares with the bindings.

#include <string>
#include <vector>

#include "ufh/classes.hpp"

namespace ufh {

/// "Z", "Z2".."Z4", "Heis3", "Z2xA[[a,b],[c,d]]", or a GroupSpec JSON object.
GroupSpec parse_group(const std::string& text);
GroupSpec parse_group(const json& j);

/// "center", "axes:1,2" or a SubgroupSpec JSON object.
SubgroupSpec parse_subgroup(const GroupSpec& spec, const json& j);

/// Named subsets: all, even_x, halfplane_x, powers:k, congruence:axis:mod:res.
SetRule parse_set(const GroupSpec& spec, const json& j);

/// Named functions: chi_G, delta_e, chi_even_x, halfplane_x, powers:k,
/// chi:<set id>, or a rule-tree JSON object.
BoundedFunction parse_function(const GroupSpec& spec, const json& j);

/// Runs one subcommand.  0 on success, 1 on usage or configuration errors,
/// 2 when a verification fails (a witness is printed to stderr).
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace ufh
