// Command-line runner: one subcommand per experiment kind.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <omp.h>

#include "CLI11.hpp"
#include "semiheat/experiment.hpp"

using namespace semiheat;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  int jobs = 0;
  std::optional<int> n;
  std::optional<double> p;
  std::optional<double> rmax;
  std::optional<int> nodes;
  std::optional<double> tend;
};

Json load_document(ExperimentKind kind, const Overrides& o) {
  Json doc;
  if (o.config.empty()) {
    doc = default_config(kind);
  } else {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("--config", "cannot open " + o.config);
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("--config", e.what());
    }
    if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
    if (doc.contains("kind") && doc["kind"].is_string() && doc["kind"].get<std::string>() != to_string(kind))
      throw ConfigError("kind", "config is for '" + doc["kind"].get<std::string>() + "', not '" + to_string(kind) + "'");
    doc["kind"] = to_string(kind);
  }
  auto block = [&](const char* name) -> Json& {
    if (!doc.contains(name) || !doc[name].is_object()) doc[name] = Json::object();
    return doc[name];
  };
  if (o.n) block("params")["n"] = *o.n;
  if (o.p) block("params")["p"] = *o.p;
  if (o.rmax) block("grid")["r_max"] = *o.rmax;
  if (o.nodes) block("grid")["M"] = *o.nodes;
  if (o.tend) block("solver")["t_end"] = *o.tend;
  if (!o.out.empty()) doc["output"] = o.out;
  return doc;
}

int run(ExperimentKind kind, const Overrides& o) {
  if (o.jobs > 0) omp_set_num_threads(o.jobs);
  try {
    const ExperimentConfig cfg = ExperimentConfig::parse(load_document(kind, o));
    const auto start = std::chrono::steady_clock::now();
    const Bundle bundle = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Json manifest = write_bundle(bundle, cfg, cfg.output_dir, wall);
    for (const auto& r : bundle.invariants)
      std::printf("%-4s %-40s %.6g%s\n", r.passed ? "ok" : "FAIL", r.name.c_str(), r.value,
                  r.asserted ? "" : "  (report)");
    std::printf("%s: %zu artifacts in %s, %.2fs\n", to_string(kind).c_str(), bundle.artifacts.size() + 1,
                cfg.output_dir.c_str(), wall);
    return bundle.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error at %s: %s\n", e.field().c_str(), e.what());
    return 2;
  } catch (const PipelineError& e) {
    std::fprintf(stderr, "pipeline error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiheat: radial semilinear heat experiments"};
  app.require_subcommand(1);
  Overrides o;
  std::optional<ExperimentKind> chosen;
  for (ExperimentKind kind : all_experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(to_string(kind), "run the " + to_string(kind) + " experiment");
    sub->add_option("--config", o.config, "JSON experiment config (defaults to the built-in recipe)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--jobs", o.jobs, "OpenMP threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--n", o.n, "space dimension");
    sub->add_option("--p", o.p, "nonlinearity exponent");
    sub->add_option("--rmax", o.rmax, "outer radius R_max");
    sub->add_option("--nodes", o.nodes, "grid intervals M");
    sub->add_option("--tend", o.tend, "time horizon");
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  CLI11_PARSE(app, argc, argv);
  return run(*chosen, o);
}
