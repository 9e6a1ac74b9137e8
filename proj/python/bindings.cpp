#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ufh/cli.hpp"
#include "ufh/errors.hpp"
#include "ufh/io.hpp"

namespace py = pybind11;

// Structured results cross the boundary as canonical JSON text.

namespace {

ufh::Group make_group(const std::string& spec) { return ufh::Group(ufh::parse_group(spec)); }

ufh::FolnerFamily make_family(const std::string& group, const std::string& kind) {
  return ufh::FolnerFamily(make_group(group), ufh::folner_kind_from_string(kind));
}

std::vector<std::size_t> ball_sizes(const std::string& group, std::int64_t r_max) {
  auto g = make_group(group);
  std::vector<std::size_t> out;
  for (std::int64_t r = 0; r <= r_max; ++r) out.push_back(g.metric().ball_size(r));
  return out;
}

std::string growth(const std::string& group, const std::string& family, int j_max,
                   const std::string& chain) {
  const auto fam = make_family(group, family);
  if (chain.empty()) return ufh::growth_json(ufh::sigma_profile(fam, j_max)).dump();
  const auto c = ufh::parse_function(fam.group().spec(), ufh::json(chain));
  return ufh::growth_json(ufh::beta_profile(c, fam, j_max, chain)).dump();
}

std::string compare(const std::vector<std::int64_t>& n, const std::vector<std::string>& alpha,
                    const std::vector<std::string>& beta, double tolerance) {
  std::vector<ufh::Rational> a, b;
  for (const auto& s : alpha) a.push_back(ufh::parse_rational(s));
  for (const auto& s : beta) b.push_back(ufh::parse_rational(s));
  ufh::ComparisonOptions opt;
  opt.tolerance = tolerance;
  return ufh::compare(n, a, b, opt).to_json().dump();
}

std::string sparse_build(const std::string& group, const std::string& family, int j_max) {
  const auto fam = make_family(group, family);
  return ufh::sparse_json(ufh::sparse_construct(fam, ufh::c_sigma_squared(fam, j_max), j_max)).dump();
}

std::string thick_build(const std::string& group, const std::string& subgroup, int n, int depth) {
  const auto g = make_group(group);
  const auto h = ufh::parse_subgroup(g.spec(), ufh::json(subgroup));
  return ufh::thick_construct(g, h, n, depth).to_json().dump();
}

std::string thick_check(const std::string& family_json, std::int64_t window, std::int64_t h_radius) {
  const auto tf = ufh::ThickFamily::from_json(ufh::json::parse(family_json));
  return ufh::thick_verify(tf, ufh::Window{window}, h_radius).to_json(tf.group.spec()).dump();
}

}  // namespace

PYBIND11_MODULE(_ufhom, m) {
  m.doc() = "Uniformly finite homology toolkit (native core)";
  m.attr("__version__") = ufh::kVersion;

  py::register_exception<ufh::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ufh::BeyondWindow>(m, "BeyondWindow", PyExc_RuntimeError);
  py::register_exception<ufh::VerificationFailure>(m, "VerificationFailure", PyExc_RuntimeError);
  py::register_exception<ufh::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("ball_sizes", &ball_sizes, py::arg("group"), py::arg("r_max"));
  m.def("growth_json", &growth, py::arg("group"), py::arg("family"), py::arg("j_max"),
        py::arg("chain") = "");
  m.def("compare_json", &compare, py::arg("n"), py::arg("alpha"), py::arg("beta"),
        py::arg("tolerance") = 0.05);
  m.def("sparse_build_json", &sparse_build, py::arg("group"), py::arg("family"), py::arg("j_max"));
  m.def("thick_build_json", &thick_build, py::arg("group"), py::arg("subgroup"), py::arg("n"),
        py::arg("depth"));
  m.def("thick_verify_json", &thick_check, py::arg("family"), py::arg("window"),
        py::arg("h_radius") = 10);
  m.def("run", [](const std::vector<std::string>& args) { return ufh::run(args); }, py::arg("args"));
}
