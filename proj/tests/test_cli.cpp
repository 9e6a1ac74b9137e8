#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ufh/cli.hpp"
#include "ufh/io.hpp"

using namespace ufh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ufh_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

}  // namespace

TEST_CASE("growth CSV has the fixed header and a provenance line") {
  const auto out = scratch("growth.csv");
  REQUIRE(run({"growth", "--group", "Z2", "--family", "cubes", "--jmax", "50", "--chain", "chi_even_x", "--out",
               out.string()}) == 0);
  std::istringstream in(slurp(out));
  std::string first, header, line, last;
  std::getline(in, first);
  std::getline(in, header);
  CHECK(first.rfind("# ufh 0.1.0 config=", 0) == 0);
  CHECK(first.find("window=") != std::string::npos);
  CHECK(header == "j,size,boundary,sigma,chain_sum,beta,beta_over_sigma");
  while (std::getline(in, line)) last = line;
  CHECK(last.rfind("50,2500,200,", 0) == 0);
  CHECK(last.find(",0.5,") != std::string::npos);
}

TEST_CASE("rational mode prints exact values") {
  const auto out = scratch("growth_q.csv");
  REQUIRE(run({"growth", "--group", "Z", "--family", "balls", "--jmax", "3", "--rational", "--out", out.string()}) == 0);
  CHECK(slurp(out).find("3,7,2,2/7") != std::string::npos);
}

TEST_CASE("sparse-build is byte-identical across runs") {
  const auto a = scratch("a.json"), b = scratch("b.json"), ca = scratch("a.csv"), cb = scratch("b.csv");
  for (const auto& [o, c] : {std::pair{a, ca}, std::pair{b, cb}})
    REQUIRE(run({"sparse-build", "--group", "Z", "--family", "supergeo", "--jmax", "3", "--c", "sigma_squared",
                 "--out", o.string(), "--cloud", c.string()}) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(ca) == slurp(cb));
  CHECK(slurp(ca).find("\nx,ring\n") != std::string::npos);
  CHECK(run({"sparse-verify", "--input", a.string(), "--out", scratch("cert.json").string()}) == 0);
}

TEST_CASE("config files drive runs and unknown keys are rejected") {
  const auto cfg = scratch("cfg.json"), out1 = scratch("c1.json"), out2 = scratch("c2.json");
  write_file(cfg.string(), R"({"group": "Heis3", "radius": 2})");
  REQUIRE(run({"ball", "--config", cfg.string(), "--out", out1.string()}) == 0);
  REQUIRE(run({"ball", "--group", "Heis3", "--radius", "2", "--out", out2.string()}) == 0);
  CHECK(json::parse(slurp(out1)).at("size") == 17);
  CHECK(slurp(out1) == slurp(out2));
  write_file(cfg.string(), R"({"group": "Z", "radius": 2, "colour": "red"})");
  CHECK(run({"ball", "--config", cfg.string()}) == 1);
  write_file(cfg.string(), R"({"group": "Z", "radius": 2})");
  CHECK(run({"ball", "--config", cfg.string(), "--radius", "5", "--out", out1.string()}) == 0);
  CHECK(json::parse(slurp(out1)).at("size") == 11);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run({"nonsense"}) == 1);
  CHECK(run({"ball", "--group", "Q8", "--radius", "1"}) == 1);
  CHECK(run({"growth", "--group", "Z"}) == 1);
}

TEST_CASE("tampered thick family exits with 2") {
  const auto good = scratch("thick.json"), bad = scratch("thick_bad.json");
  REQUIRE(run({"thick-build", "--group", "Z2", "--subgroup", "axes:1", "--n", "2", "--L", "2", "--out",
               good.string()}) == 0);
  CHECK(run({"thick-verify", "--input", good.string(), "--out", scratch("r.json").string()}) == 0);
  auto doc = json::parse(slurp(good));
  doc["tiles"][1]["translator"] = doc["tiles"][0]["translator"];
  doc["tiles"][1]["translator"][0] = doc["tiles"][1]["translator"][0].get<int>() + 3;
  write_file(bad.string(), doc.dump());
  CHECK(run({"thick-verify", "--input", bad.string(), "--out", scratch("r2.json").string()}) == 2);
}

TEST_CASE("invariant cycles and coset averages from the command line") {
  const auto tf = scratch("thick_c.json");
  REQUIRE(run({"thick-build", "--group", "Z2", "--subgroup", "axes:1", "--n", "2", "--L", "2", "--out",
               tf.string()}) == 0);
  const auto out = scratch("cycle.json");
  REQUIRE(run({"cycle", "--input", tf.string(), "--k", "2", "--window", "15", "--out", out.string()}) == 0);
  CHECK(json::parse(slurp(out)).at("defects_on_interior") == 0);
  CHECK(run({"cycle", "--group", "Z2", "--subgroup", "axes:1", "--function", "delta_e", "--window", "5", "--out",
             out.string()}) == 2);
  const auto avg = scratch("avg.json");
  REQUIRE(run({"coset-avg", "--group", "Z2", "--subgroup", "axes:1", "--function", "chi_G", "--j", "4", "--window",
               "3", "--out", avg.string()}) == 0);
  for (const auto& v : json::parse(slurp(avg)).at("values")) CHECK(v.at("value") == "1");
}

TEST_CASE("whyte and indep subcommands") {
  const auto w = scratch("w.json"), i = scratch("i.json");
  REQUIRE(run({"whyte", "--group", "Z", "--family", "balls", "--function", "chi_G", "--level", "3", "--out",
               w.string()}) == 0);
  CHECK(json::parse(slurp(w)).at("found") == true);
  REQUIRE(run({"indep", "--group", "Z", "--family", "balls", "--functions", "powers:2,powers:1", "--jmax", "10000",
               "--samples", "20", "--out", i.string()}) == 0);
  CHECK(json::parse(slurp(i)).at("ordered") == true);
}

TEST_CASE("cache directory round trip") {
  const auto dir = scratch("cache");
  fs::remove_all(dir);
  setenv("UFH_CACHE_DIR", dir.string().c_str(), 1);
  const auto out = scratch("cached.json");
  REQUIRE(run({"ball", "--group", "Heis3", "--radius", "4", "--out", out.string()}) == 0);
  const auto first = slurp(out);
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
  REQUIRE(run({"ball", "--group", "Heis3", "--radius", "4", "--out", out.string()}) == 0);
  CHECK(slurp(out) == first);
  unsetenv("UFH_CACHE_DIR");
}
