#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "semiheat/experiment.hpp"

using namespace semiheat;
namespace fs = std::filesystem;

namespace {

Json small_solve(double amplitude) {
  Json doc = default_config(ExperimentKind::solve);
  doc["grid"]["r_max"] = 20.0;
  doc["grid"]["M"] = 100;
  doc["solver"]["t_end"] = 2.0;
  doc["data"] = {{"profile", "gaussian"}, {"amplitude", amplitude}, {"width", 2.0}};
  return doc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string field_of(const Json& doc) {
  try {
    ExperimentConfig::parse(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (auto k : all_experiment_kinds()) CHECK(experiment_kind_from_string(to_string(k)) == k);
  CHECK(all_experiment_kinds().size() == 8);
  CHECK_THROWS_AS(experiment_kind_from_string("nope"), ConfigError);
}

TEST_CASE("default configs parse") {
  for (auto k : all_experiment_kinds()) CHECK_NOTHROW(ExperimentConfig::parse(default_config(k)));
}

TEST_CASE("config errors name the field") {
  Json doc = small_solve(1.0);
  doc["params"].erase("p");
  CHECK(field_of(doc) == "params.p");

  doc = small_solve(1.0);
  doc["params"]["p"] = 0.5;
  CHECK(field_of(doc) == "params.p");

  doc = small_solve(1.0);
  doc["grid"]["boundary"] = "periodic";
  CHECK(field_of(doc).rfind("grid.boundary", 0) == 0);

  doc = small_solve(1.0);
  doc["kind"] = "nope";
  CHECK(field_of(doc) == "kind");

  doc = small_solve(1.0);
  doc["data"]["profile"] = "triangle";
  CHECK(field_of(doc).rfind("data", 0) == 0);
}

TEST_CASE("csv formatting") {
  CsvTable t{{"a", "b"}, {{1.0, std::string("x")}, {0.1, 2.5e-300}}};
  CHECK(format_csv(t) == "a,b\n1,x\n0.10000000000000001,2.5e-300\n");
  const Bundle empty;
  CHECK(format_csv(emit_plot_data(empty)) == "series,x,y\n");
}

TEST_CASE("zero data solve bundle passes") {
  const auto cfg = ExperimentConfig::parse(small_solve(0.0));
  const Bundle b = run_experiment(cfg);
  CHECK(b.passed());
  for (const auto& r : b.invariants)
    if (r.asserted) CHECK_MESSAGE(r.passed, r.name);
  const Json m = make_manifest(b, cfg, 0.0);
  CHECK(m["all_passed"] == true);
  CHECK(m["kind"] == "solve");
}

TEST_CASE("bundles are reproducible") {
  const fs::path base = fs::temp_directory_path() / "semiheat_repro";
  fs::remove_all(base);
  std::vector<fs::path> dirs{base / "a", base / "b"};
  Json manifests[2];
  for (int k = 0; k < 2; ++k) {
    Json doc = small_solve(1.0);
    doc["output"] = (base / "same").string();
    const auto cfg = ExperimentConfig::parse(doc);
    manifests[k] = write_bundle(run_experiment(cfg), cfg, dirs[k].string(), 0.0);
  }
  CHECK(manifests[0] == manifests[1]);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dirs[0])) {
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(dirs[1] / e.path().filename()), e.path().filename().string());
  }
  CHECK(files >= 4);
  CHECK(fs::exists(dirs[0] / "manifest.json"));
  CHECK(fs::exists(dirs[0] / "plot_data.csv"));
  fs::remove_all(base);
}

TEST_CASE("config hash depends on content") {
  CHECK(config_hash(small_solve(1.0)) == config_hash(small_solve(1.0)));
  CHECK(config_hash(small_solve(1.0)) != config_hash(small_solve(2.0)));
}
