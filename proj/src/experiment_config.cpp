#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "experiment_detail.hpp"
#include "semiheat/experiment.hpp"

namespace semiheat {

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

namespace {
const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::solve, "solve"},           {ExperimentKind::morrey, "morrey"},
      {ExperimentKind::smoothing, "smoothing"},   {ExperimentKind::energy, "energy"},
      {ExperimentKind::picard, "picard"},         {ExperimentKind::threshold, "threshold"},
      {ExperimentKind::dependence, "dependence"}, {ExperimentKind::hypotheses, "hypotheses"}};
  return names;
}
}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "solve";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& [k, s] : kind_names())
    if (s == name) return k;
  throw ConfigError("kind", "unknown experiment kind '" + name + "'");
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& [k, s] : kind_names()) v.push_back(k);
    return v;
  }();
  return kinds;
}

namespace detail {

Reader::Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
}

std::string Reader::path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void Reader::fail(const std::string& key, const std::string& message) const { throw ConfigError(path(key), message); }

bool Reader::has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

const Json& Reader::raw(const std::string& key) const {
  if (!has(key)) fail(key, "missing required field");
  return node_.at(key);
}

Reader Reader::child(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_object()) fail(key, "expected an object");
  return Reader(v, path(key));
}

double Reader::number(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "expected a finite number");
  return x;
}

double Reader::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

int Reader::integer(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<int>();
}

int Reader::integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

bool Reader::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Json& v = node_.at(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string Reader::text(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string Reader::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::vector<double> Reader::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const Json& v = node_.at(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

namespace {
void require(bool ok, const Reader& r, const std::string& key, const std::string& message) {
  if (!ok) r.fail(key, message);
}

Exponent exponent_field(const Reader& r, const std::string& key, double fallback) {
  if (!r.has(key)) return std::isinf(fallback) ? Exponent::infinity() : Exponent(fallback);
  const Json& v = r.raw(key);
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
    return Exponent::infinity();
  const double q = r.number(key);
  require(q >= 1.0, r, key, "must be >= 1 or \"inf\"");
  return Exponent(q);
}

void require_positive_increasing(const std::vector<double>& v, const Reader& r, const std::string& key) {
  require(!v.empty(), r, key, "must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] > 0.0, r, key, "entries must be positive");
    if (i > 0) require(v[i] > v[i - 1], r, key, "entries must be increasing");
  }
}
}  // namespace

SolveOptions solve_options(const Reader& r) {
  SolveOptions o;
  o.checkpoint_fields = r.flag("checkpoint_fields", o.checkpoint_fields);
  return o;
}

MorreyRunOptions morrey_options(const Reader& r, const ModelParams& params) {
  MorreyRunOptions o;
  o.q = r.number("q", o.q);
  require(o.q >= 1.0, r, "q", "must be >= 1");
  o.lambda = r.number("lambda", params.critical_lambda(o.q));
  require(o.lambda >= 0.0 && o.lambda <= params.n, r, "lambda", "must lie in [0, n]");
  o.polish = r.flag("polish", o.polish);
  o.random_probes = r.integer("random_probes", o.random_probes);
  require(o.random_probes >= 0, r, "random_probes", "must be >= 0");
  return o;
}

SmoothingRunOptions smoothing_options(const Reader& r, const ModelParams& params) {
  SmoothingRunOptions o;
  o.from_q = exponent_field(r, "from_q", 2.0);
  o.to_q = exponent_field(r, "to_q", INFINITY);
  require(o.from_q.reciprocal() >= o.to_q.reciprocal(), r, "to_q", "must be >= from_q");
  o.lambda = r.number("lambda", params.mu);
  require(o.lambda >= 0.0 && o.lambda <= params.n, r, "lambda", "must lie in [0, n]");
  o.t_first = r.number("t_first", o.t_first);
  o.t_last = r.number("t_last", o.t_last);
  o.t_count = r.integer("t_count", o.t_count);
  require(o.t_first > 0.0, r, "t_first", "must be positive");
  require(o.t_last > o.t_first, r, "t_last", "must exceed t_first");
  require(o.t_count >= 2, r, "t_count", "must be >= 2");
  return o;
}

EnergyRunOptions energy_options(const Reader& r, double t_end) {
  EnergyRunOptions o;
  o.T = r.numbers("T", o.T);
  require_positive_increasing(o.T, r, "T");
  o.ds = r.number("ds", o.ds);
  require(o.ds > 0.0, r, "ds", "must be positive");
  o.s_span = r.number("s_span", o.s_span);
  require(o.s_span >= 4.0 * o.ds, r, "s_span", "must cover at least 5 samples");
  for (double T : o.T)
    require(T * (1.0 - std::exp(-o.s_span)) <= t_end * (1.0 + 1e-12), r, "T", "similarity window exceeds solver.t_end");
  o.chain_times = r.numbers("chain_times", o.chain_times);
  require_positive_increasing(o.chain_times, r, "chain_times");
  require(o.chain_times.back() <= t_end * (1.0 + 1e-12), r, "chain_times", "must not exceed solver.t_end");
  return o;
}

PicardRunOptions picard_options(const Reader& r, double t_end) {
  PicardRunOptions o;
  o.K = r.integer("K", o.K);
  require(o.K >= 2, r, "K", "must be >= 2");
  o.dt = r.number("dt", o.dt);
  require(o.dt > 0.0 && o.dt <= t_end, r, "dt", "must lie in (0, t_end]");
  o.sample_times = r.numbers("sample_times", o.sample_times);
  require_positive_increasing(o.sample_times, r, "sample_times");
  require(o.sample_times.back() <= t_end * (1.0 + 1e-12), r, "sample_times", "must not exceed solver.t_end");
  o.q = r.number("q", o.q);
  require(o.q >= 1.0, r, "q", "must be >= 1");
  o.r_aux = r.number("r_aux", o.r_aux);
  require(o.r_aux >= 0.0, r, "r_aux", "must be >= 0 (0 selects the default)");
  o.compare_solver = r.flag("compare_solver", o.compare_solver);
  o.agreement_tol = r.number("agreement_tol", o.agreement_tol);
  require(o.agreement_tol > 0.0, r, "agreement_tol", "must be positive");
  return o;
}

ThresholdRunOptions threshold_options(const Reader& r) {
  ThresholdRunOptions o;
  o.rel_tol = r.number("rel_tol", o.rel_tol);
  require(o.rel_tol > 0.0, r, "rel_tol", "must be positive");
  o.initial_lo = r.number("initial_lo", o.initial_lo);
  o.initial_hi = r.number("initial_hi", o.initial_hi);
  require(o.initial_lo > 0.0, r, "initial_lo", "must be positive");
  require(o.initial_hi > o.initial_lo, r, "initial_hi", "must exceed initial_lo");
  o.deltas = r.numbers("deltas", o.deltas);
  for (double d : o.deltas) require(d < 1.0 && d != 0.0, r, "deltas", "entries must be nonzero and below 1");
  o.terminal_factor = r.number("terminal_factor", o.terminal_factor);
  require(o.terminal_factor > 0.0 && o.terminal_factor < 1.0, r, "terminal_factor", "must lie in (0, 1)");
  return o;
}

DependenceRunOptions dependence_options(const Reader& r, double t_end) {
  DependenceRunOptions o;
  o.perturbations = r.numbers("perturbations", o.perturbations);
  require(o.perturbations.size() >= 2, r, "perturbations", "need at least two sizes");
  for (double e : o.perturbations) require(e > 0.0, r, "perturbations", "entries must be positive");
  o.T0 = r.number("T0", std::min(o.T0, t_end));
  require(o.T0 > 0.0 && o.T0 <= t_end * (1.0 + 1e-12), r, "T0", "must lie in (0, solver.t_end]");
  o.q = r.number("q", o.q);
  require(o.q >= 1.0, r, "q", "must be >= 1");
  o.max_variation = r.number("max_variation", o.max_variation);
  require(o.max_variation > 0.0, r, "max_variation", "must be positive");
  return o;
}

HypothesesRunOptions hypotheses_options(const Reader& r) {
  HypothesesRunOptions o;
  auto& c = o.checks;
  c.tail_margin = r.number("tail_margin", c.tail_margin);
  c.trend_threshold = r.number("trend_threshold", c.trend_threshold);
  c.t_min = r.number("t_min", c.t_min);
  c.t_max = r.number("t_max", c.t_max);
  c.t_per_decade = r.integer("t_per_decade", c.t_per_decade);
  require(c.tail_margin >= 0.0, r, "tail_margin", "must be >= 0");
  require(c.t_min > 0.0, r, "t_min", "must be positive");
  require(c.t_max > c.t_min, r, "t_max", "must exceed t_min");
  require(c.t_per_decade >= 1, r, "t_per_decade", "must be >= 1");
  return o;
}

void validate_options(ExperimentKind kind, const Json& options, const ModelParams& params, double t_end) {
  const Reader r(options, "options");
  switch (kind) {
    case ExperimentKind::solve: solve_options(r); break;
    case ExperimentKind::morrey: morrey_options(r, params); break;
    case ExperimentKind::smoothing: smoothing_options(r, params); break;
    case ExperimentKind::energy: energy_options(r, t_end); break;
    case ExperimentKind::picard: picard_options(r, t_end); break;
    case ExperimentKind::threshold: threshold_options(r); break;
    case ExperimentKind::dependence: dependence_options(r, t_end); break;
    case ExperimentKind::hypotheses: hypotheses_options(r); break;
  }
}

}  // namespace detail

namespace {

Profile parse_profile(const detail::Reader& d) {
  const std::string name = d.text("profile");
  Profile::Kind kind;
  try {
    kind = profile_kind_from_string(name);
  } catch (const std::exception&) {
    d.fail("profile", "unknown profile '" + name + "'");
  }
  try {
    switch (kind) {
      case Profile::Kind::gaussian: return Profile::gaussian(d.number("amplitude", 1.0), d.number("width", 1.0));
      case Profile::Kind::plateau:
        return Profile::plateau(d.number("amplitude", 1.0), d.number("radius", 1.0), d.number("ramp", 1.0));
      case Profile::Kind::power_tail:
        return Profile::power_tail(d.number("amplitude", 1.0), d.number("exponent", 2.0), d.number("core_radius", 1.0));
      case Profile::Kind::indicator: return Profile::indicator(d.number("radius", 1.0));
      case Profile::Kind::singular_steady_state: return Profile::singular_steady_state().scaled(d.number("amplitude", 1.0));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(d.path("profile"), e.what());
  }
  return Profile{};
}

std::vector<double> checkpoint_schedule(const detail::Reader& s, double t_end) {
  std::vector<double> cps{0.0};
  if (s.has("checkpoints")) {
    const Json& v = s.raw("checkpoints");
    if (v.is_array()) {
      for (double t : s.numbers("checkpoints", {})) {
        if (!(t >= 0.0) || t > t_end) s.fail("checkpoints", "entries must lie in [0, t_end]");
        cps.push_back(t);
      }
    } else {
      const detail::Reader c = s.child("checkpoints");
      const double first = c.number("first");
      const int per = c.integer("per_decade", 4);
      if (!(first > 0.0) || first >= t_end) c.fail("first", "must lie in (0, t_end)");
      if (per < 1) c.fail("per_decade", "must be >= 1");
      for (double t : log_spaced_times(first, t_end, per)) cps.push_back(t);
      for (double t : s.child("checkpoints").numbers("extra", {})) {
        if (!(t >= 0.0) || t > t_end) c.fail("extra", "entries must lie in [0, t_end]");
        cps.push_back(t);
      }
    }
  }
  cps.push_back(t_end);
  std::sort(cps.begin(), cps.end());
  std::vector<double> out;
  for (double t : cps)
    if (out.empty() || t > out.back() * (1.0 + 1e-12) + 1e-300) out.push_back(t);
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const Json& doc) {
  const detail::Reader root(doc, "");
  ExperimentConfig cfg;
  cfg.document = doc;
  cfg.kind = experiment_kind_from_string(root.text("kind"));

  const detail::Reader pb = root.child("params");
  const int n = pb.integer("n");
  const double p = pb.number("p");
  try {
    cfg.params = make_params(n, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(n < 3 ? "params.n" : "params.p", e.what());
  }

  const detail::Reader gb = root.child("grid");
  cfg.r_max = gb.number("r_max");
  if (!(cfg.r_max > 0.0)) gb.fail("r_max", "must be positive");
  cfg.intervals = gb.integer("M");
  if (cfg.intervals < 8) gb.fail("M", "must be >= 8");
  try {
    cfg.boundary = boundary_from_string(gb.text("boundary", "dirichlet_at_Rmax"));
  } catch (const std::invalid_argument& e) {
    gb.fail("boundary", "expected dirichlet_at_Rmax or even_at_origin_only");
  }

  const detail::Reader sb = root.child("solver");
  SolverConfig& s = cfg.solver;
  s.t_end = sb.number("t_end");
  if (!(s.t_end > 0.0)) sb.fail("t_end", "must be positive");
  s.dt_init = sb.number("dt_init", s.dt_init);
  s.dt_min = sb.number("dt_min", s.dt_min);
  s.safety = sb.number("safety", s.safety);
  s.nonlinear_cap = sb.number("nonlinear_cap", s.nonlinear_cap);
  s.blowup_threshold = sb.number("blowup_threshold", s.blowup_threshold);
  s.contamination_tol = sb.number("contamination_tol", s.contamination_tol);
  s.nonlinear = sb.flag("nonlinear", s.nonlinear);
  s.checkpoints = checkpoint_schedule(sb, s.t_end);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver", e.what());
  }

  cfg.data = parse_profile(root.child("data"));
  if (root.has("options")) {
    if (!root.raw("options").is_object()) root.fail("options", "expected an object");
    cfg.options = root.raw("options");
  }
  detail::validate_options(cfg.kind, cfg.options, cfg.params, s.t_end);
  cfg.output_dir = root.text("output", "runs/" + to_string(cfg.kind));
  if (root.has("seed")) {
    const Json& v = root.raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      root.fail("seed", "expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  return cfg;
}

Json default_config(ExperimentKind kind) {
  Json doc = {{"kind", to_string(kind)},
              {"params", {{"n", 5}, {"p", 3}}},
              {"grid", {{"r_max", 20.0}, {"M", 400}, {"boundary", "dirichlet_at_Rmax"}}},
              {"solver", {{"t_end", 1.0}, {"checkpoints", {{"first", 0.01}, {"per_decade", 4}}}}},
              {"data", {{"profile", "gaussian"}, {"amplitude", 0.5}, {"width", 2.0}}},
              {"options", Json::object()},
              {"output", "runs/" + to_string(kind)},
              {"seed", 1}};
  switch (kind) {
    case ExperimentKind::solve:
      doc["grid"] = {{"r_max", 80.0}, {"M", 800}, {"boundary", "dirichlet_at_Rmax"}};
      doc["solver"] = {{"t_end", 100.0}, {"checkpoints", {{"first", 0.01}, {"per_decade", 2}}}};
      doc["data"] = {{"profile", "power_tail"}, {"amplitude", 0.05}, {"exponent", 2.0}, {"core_radius", 1.0}};
      break;
    case ExperimentKind::morrey:
      doc["grid"] = {{"r_max", 4.0}, {"M", 800}, {"boundary", "even_at_origin_only"}};
      doc["data"] = {{"profile", "indicator"}, {"radius", 1.0}};
      doc["options"] = {{"q", 2.0}, {"lambda", 1.0}, {"polish", true}};
      break;
    case ExperimentKind::smoothing:
      doc["data"] = {{"profile", "gaussian"}, {"amplitude", 1.0}, {"width", 1.0}};
      doc["options"] = {{"from_q", 2.0}, {"to_q", "inf"}, {"t_first", 0.01}, {"t_last", 100.0}, {"t_count", 20}};
      break;
    case ExperimentKind::energy:
      doc["grid"] = {{"r_max", 40.0}, {"M", 2000}, {"boundary", "dirichlet_at_Rmax"}};
      doc["solver"] = {{"t_end", 10.0}, {"checkpoints", {{"first", 0.01}, {"per_decade", 4}}}};
      doc["data"] = {{"profile", "gaussian"}, {"amplitude", 0.1}, {"width", 3.0}};
      doc["options"] = {{"T", {2.0, 5.0, 10.0}}, {"ds", 0.01}};
      break;
    case ExperimentKind::picard:
      doc["options"] = {{"K", 50}, {"dt", 0.025}, {"sample_times", {0.1, 0.5, 1.0}}};
      break;
    case ExperimentKind::threshold:
      doc["grid"] = {{"r_max", 40.0}, {"M", 400}, {"boundary", "dirichlet_at_Rmax"}};
      doc["solver"] = {{"t_end", 200.0}, {"checkpoints", {{"first", 0.1}, {"per_decade", 4}, {"extra", {1.0}}}}};
      doc["data"] = {{"profile", "gaussian"}, {"amplitude", 1.0}, {"width", 2.0}};
      doc["options"] = {{"rel_tol", 1e-3}, {"deltas", {0.1, 0.01, 0.001, -0.001}}};
      break;
    case ExperimentKind::dependence:
      doc["solver"] = {{"t_end", 5.0}, {"checkpoints", {{"first", 0.01}, {"per_decade", 4}}}};
      doc["options"] = {{"perturbations", {1e-2, 1e-3, 1e-4}}, {"T0", 5.0}};
      break;
    case ExperimentKind::hypotheses:
      doc["data"] = {{"profile", "gaussian"}, {"amplitude", 1.0}, {"width", 2.0}};
      break;
  }
  return doc;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* v = std::get_if<double>(&row[i])) {
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        out += buf;
      } else {
        out += std::get<std::string>(row[i]);
      }
    }
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const Json& doc) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool Bundle::passed() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const InvariantRecord& r) { return !r.asserted || r.passed; });
}

CsvTable emit_plot_data(const Bundle& bundle) {
  CsvTable t{{"series", "x", "y"}, {}};
  for (const auto& pt : bundle.plot) t.rows.push_back({pt.series, pt.x, pt.y});
  return t;
}

Json make_manifest(const Bundle& bundle, const ExperimentConfig& config, double wall_time) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config.document)));
  Json inv = Json::array();
  std::set<std::string> seen;
  for (const auto& r : bundle.invariants) {
    if (!seen.insert(r.name).second) throw PipelineError("duplicate invariant name: " + r.name);
    inv.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"asserted", r.asserted}});
  }
  Json files = Json::array();
  for (const auto& a : bundle.artifacts) files.push_back(a.name);
  files.push_back("plot_data.csv");
  return {{"kind", to_string(bundle.kind)}, {"config_hash", hash},       {"seed", config.seed},
          {"wall_time", wall_time},         {"invariants", inv},         {"artifacts", files},
          {"all_passed", bundle.passed()}};
}

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + path.string());
  out << text;
}
}  // namespace

Json write_bundle(const Bundle& bundle, const ExperimentConfig& config, const std::string& dir, double wall_time) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  const Json manifest = make_manifest(bundle, config, wall_time);
  for (const auto& a : bundle.artifacts) {
    if (const CsvTable* t = std::get_if<CsvTable>(&a.content)) write_text(root / a.name, format_csv(*t));
    else write_text(root / a.name, std::get<Json>(a.content).dump(2) + "\n");
  }
  write_text(root / "plot_data.csv", format_csv(emit_plot_data(bundle)));
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace semiheat
