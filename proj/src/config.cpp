#include "coxgp/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coxgp/error.hpp"

namespace coxgp {

using nlohmann::json;

namespace {

template <typename E>
struct EnumNames {
  std::vector<std::pair<E, const char*>> names;
  const char* what;

  std::string to(E value) const {
    for (const auto& [e, n] : names) {
      if (e == value) return n;
    }
    throw Error(std::string(what) + ": unknown value");
  }
  E from(const std::string& text) const {
    for (const auto& [e, n] : names) {
      if (text == n) return e;
    }
    throw Error(std::string(what) + ": unknown name '" + text + "'");
  }
};

const EnumNames<Preprocess> kPreprocess{{{Preprocess::NormalCdf, "normal_cdf"},
                                         {Preprocess::StandardizedNormalCdf, "standardized_normal_cdf"},
                                         {Preprocess::EmpiricalCdf, "empirical_cdf"},
                                         {Preprocess::None, "none"}},
                                        "preprocess"};
const EnumNames<KernelVariant> kVariant{
    {{KernelVariant::PlainAverage, "plain"}, {KernelVariant::WeightedSupport, "weighted_support"}}, "baseline variant"};
const EnumNames<BandwidthSource> kBandwidth{
    {{BandwidthSource::Occupation, "occupation"}, {BandwidthSource::Events, "events"}}, "baseline bandwidth"};
const EnumNames<Scenario> kScenario{{{Scenario::Simulate, "simulate"}, {Scenario::External, "external"}}, "scenario"};
const EnumNames<WFormat> kWFormat{{{WFormat::Csv, "csv"}, {WFormat::Binary, "binary"}, {WFormat::None, "none"}},
                                  "w_format"};
const EnumNames<StartMode> kStart{{{StartMode::Prior, "prior"}, {StartMode::Deterministic, "deterministic"}},
                                  "start"};
const EnumNames<EllUpdate> kEllUpdate{{{EllUpdate::Sequential, "sequential"}, {EllUpdate::Joint, "joint"}},
                                      "ell_update"};

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error("config: '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw Error("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  const SamplerConfig& s = c.sampler;
  json out = {
      {"scenario", kScenario.to(c.scenario)},
      {"truth", c.truth.name()},
      {"fields", {{"resolution", c.fields.resolution}, {"lengthscales", c.fields.lengthscales}}},
      {"window",
       {{"lower", std::vector<double>(c.window.lower().begin(), c.window.lower().end())},
        {"upper", std::vector<double>(c.window.upper().begin(), c.window.upper().end())}}},
      {"n", c.sample_sizes},
      {"replications", c.replications},
      {"basis", {{"nodes_per_axis", c.basis.nodes_per_axis}, {"max_element_area", c.basis.max_element_area}}},
      {"quadrature", {{"cells_per_axis", c.quadrature_cells}}},
      {"hyper",
       {{"a_rho", c.hyper.a_rho},
        {"b_rho", c.hyper.b_rho},
        {"a_theta", c.hyper.a_theta},
        {"b_theta", c.hyper.b_theta},
        {"a_gamma", c.hyper.a_gamma},
        {"b_gamma", c.hyper.b_gamma}}},
      {"sampler",
       {{"iterations", s.iterations},
        {"burn_in", s.burn_in},
        {"zeta", s.zeta},
        {"tune_zeta", s.tune_zeta},
        {"tune_window", s.tune_window},
        {"pcn_steps", s.pcn_steps},
        {"thin", s.thin},
        {"start", kStart.to(s.start)},
        {"ell_update", kEllUpdate.to(s.ell_update)},
        {"arwm",
         {{"initial_log_sd", s.arwm.initial_log_sd},
          {"target_acceptance", s.arwm.target_acceptance},
          {"rate_exponent", s.arwm.rate_exponent}}}}},
      {"summary", {{"level", c.level}, {"grid_points", c.grid_points}}},
      {"baseline",
       {{"enabled", c.baseline},
        {"variant", kVariant.to(c.baseline_variant)},
        {"bandwidth", kBandwidth.to(c.baseline_bandwidth)}}},
      {"external",
       {{"points", c.external.points},
        {"raster", c.external.raster},
        {"preprocess", kPreprocess.to(c.external.preprocess)}}},
      {"output", {{"dir", c.output.dir}, {"w_format", kWFormat.to(c.output.w_format)}, {"plots", c.output.plots}}},
      {"seed", c.seed},
      {"threads", c.threads},
  };
  return out;
}

ExperimentConfig from_json(const json& j) {
  check_keys(j, "",
             {"preset", "scenario", "truth", "fields", "window", "n", "replications", "basis", "quadrature", "hyper",
              "sampler", "summary", "baseline", "external", "output", "seed", "threads"});
  ExperimentConfig c;
  std::string text;
  if (j.contains("scenario")) {
    read(j, "scenario", text);
    c.scenario = kScenario.from(text);
  }
  if (j.contains("truth")) {
    read(j, "truth", text);
    c.truth = TruthSpec::from_name(text);
  }
  if (j.contains("fields")) {
    const json& f = j["fields"];
    check_keys(f, "fields", {"resolution", "lengthscales"});
    read(f, "resolution", c.fields.resolution);
    read(f, "lengthscales", c.fields.lengthscales);
  }
  if (j.contains("window")) {
    const json& w = j["window"];
    check_keys(w, "window", {"lower", "upper"});
    std::vector<double> lo(c.window.lower().begin(), c.window.lower().end());
    std::vector<double> hi(c.window.upper().begin(), c.window.upper().end());
    read(w, "lower", lo);
    read(w, "upper", hi);
    c.window = Window(lo, hi);
  }
  read(j, "n", c.sample_sizes);
  read(j, "replications", c.replications);
  if (j.contains("basis")) {
    const json& b = j["basis"];
    check_keys(b, "basis", {"nodes_per_axis", "max_element_area"});
    read(b, "nodes_per_axis", c.basis.nodes_per_axis);
    read(b, "max_element_area", c.basis.max_element_area);
  }
  if (j.contains("quadrature")) {
    check_keys(j["quadrature"], "quadrature", {"cells_per_axis"});
    read(j["quadrature"], "cells_per_axis", c.quadrature_cells);
  }
  if (j.contains("hyper")) {
    const json& h = j["hyper"];
    check_keys(h, "hyper", {"a_rho", "b_rho", "a_theta", "b_theta", "a_gamma", "b_gamma"});
    read(h, "a_rho", c.hyper.a_rho);
    read(h, "b_rho", c.hyper.b_rho);
    read(h, "a_theta", c.hyper.a_theta);
    read(h, "b_theta", c.hyper.b_theta);
    read(h, "a_gamma", c.hyper.a_gamma);
    read(h, "b_gamma", c.hyper.b_gamma);
  }
  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    check_keys(s, "sampler",
               {"iterations", "burn_in", "zeta", "tune_zeta", "tune_window", "pcn_steps", "thin", "start",
                "ell_update", "arwm"});
    SamplerConfig& sc = c.sampler;
    read(s, "iterations", sc.iterations);
    read(s, "burn_in", sc.burn_in);
    read(s, "zeta", sc.zeta);
    read(s, "tune_zeta", sc.tune_zeta);
    read(s, "tune_window", sc.tune_window);
    read(s, "pcn_steps", sc.pcn_steps);
    read(s, "thin", sc.thin);
    if (s.contains("start")) {
      read(s, "start", text);
      sc.start = kStart.from(text);
    }
    if (s.contains("ell_update")) {
      read(s, "ell_update", text);
      sc.ell_update = kEllUpdate.from(text);
    }
    if (s.contains("arwm")) {
      const json& a = s["arwm"];
      check_keys(a, "sampler.arwm", {"initial_log_sd", "target_acceptance", "rate_exponent"});
      read(a, "initial_log_sd", sc.arwm.initial_log_sd);
      read(a, "target_acceptance", sc.arwm.target_acceptance);
      read(a, "rate_exponent", sc.arwm.rate_exponent);
    }
  }
  if (j.contains("summary")) {
    check_keys(j["summary"], "summary", {"level", "grid_points"});
    read(j["summary"], "level", c.level);
    read(j["summary"], "grid_points", c.grid_points);
  }
  if (j.contains("baseline")) {
    const json& b = j["baseline"];
    check_keys(b, "baseline", {"enabled", "variant", "bandwidth"});
    read(b, "enabled", c.baseline);
    if (b.contains("bandwidth")) {
      read(b, "bandwidth", text);
      c.baseline_bandwidth = kBandwidth.from(text);
    }
    if (b.contains("variant")) {
      read(b, "variant", text);
      c.baseline_variant = kVariant.from(text);
    }
  }
  if (j.contains("external")) {
    const json& e = j["external"];
    check_keys(e, "external", {"points", "raster", "preprocess"});
    read(e, "points", c.external.points);
    read(e, "raster", c.external.raster);
    if (e.contains("preprocess")) {
      read(e, "preprocess", text);
      c.external.preprocess = kPreprocess.from(text);
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"dir", "w_format", "plots"});
    read(o, "dir", c.output.dir);
    if (o.contains("w_format")) {
      read(o, "w_format", text);
      c.output.w_format = kWFormat.from(text);
    }
    read(o, "plots", c.output.plots);
  }
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  c.basis.dim = c.covariate_dim();
  c.validate();
  return c;
}

ExperimentConfig paper_1d() {
  ExperimentConfig c;
  c.truth = TruthSpec::from_name("skew_normal_1d");
  c.fields.lengthscales = {kFineFieldLengthscale};
  c.sample_sizes = {50, 250, 500, 1000};
  c.replications = 100;
  c.basis = BasisSpec{1, 200, 0.0};
  c.quadrature_cells = 50;
  c.sampler.iterations = 20000;
  c.sampler.burn_in = 5000;
  c.sampler.tune_zeta = true;
  return c;
}

ExperimentConfig paper_2d() {
  ExperimentConfig c = paper_1d();
  c.truth = TruthSpec::from_name("anisotropic_2d");
  c.fields.lengthscales = {kFineFieldLengthscale, kCoarseFieldLengthscale};
  c.sample_sizes = {10, 50, 250, 1000};
  c.basis = BasisSpec{2, 0, 0.0014};
  c.sampler.thin = 5;
  return c;
}

}  // namespace

std::size_t ExperimentConfig::covariate_dim() const { return fields.dim(); }

EvalGrid ExperimentConfig::eval_grid() const {
  const std::size_t d = covariate_dim();
  return grid_points == 0 ? EvalGrid::defaults(d) : EvalGrid(d, grid_points);
}

void ExperimentConfig::validate() const {
  const std::size_t d = covariate_dim();
  require(d >= 1 && d <= 3, "config: covariate dimension must be 1, 2 or 3");
  require(basis.dim == d, "config: basis dimension differs from the covariate dimension");
  if (scenario == Scenario::Simulate) {
    require(truth.dim() == d, "config: truth dimension differs from the number of field length-scales");
    require(!sample_sizes.empty(), "config: 'n' must list at least one sample size");
    for (auto n : sample_sizes) require(n >= 1, "config: sample sizes must be >= 1");
  } else {
    require(!external.points.empty() && !external.raster.empty(), "config: external scenario needs points and raster");
  }
  for (double l : fields.lengthscales) require(l > 0.0, "config: field length-scales must be positive");
  require(fields.resolution >= 2, "config: field resolution must be >= 2");
  require(replications >= 1, "config: replications must be >= 1");
  require(quadrature_cells >= 1, "config: quadrature cells must be >= 1");
  require(level >= 0.0 && level < 1.0, "config: summary level must lie in [0,1)");
  require(grid_points == 0 || grid_points >= 2, "config: grid_points must be 0 or >= 2");
  require(threads >= 1, "config: threads must be >= 1");
  require(basis.nodes_per_axis >= 2 || (d == 2 && basis.max_element_area > 0.0),
          "config: basis needs nodes_per_axis >= 2 (or max_element_area in 2-d)");
  hyper.validate();
  sampler.validate();
}

std::vector<std::string> preset_names() {
  return {"paper-1d", "paper-2d", "desk-1d", "desk-2d", "smoke", "wildfire-like"};
}

ExperimentConfig preset(const std::string& name) {
  if (name == "paper-1d") return paper_1d();
  if (name == "paper-2d") return paper_2d();
  if (name == "desk-1d") {
    ExperimentConfig c = paper_1d();
    c.sample_sizes = {50, 250};
    c.replications = 5;
    c.basis.nodes_per_axis = 100;
    c.sampler.iterations = 5000;
    c.sampler.burn_in = 1500;
    return c;
  }
  if (name == "desk-2d") {
    ExperimentConfig c = paper_2d();
    c.sample_sizes = {250};
    c.replications = 1;
    c.basis = BasisSpec{2, 15, 0.0};
    c.sampler.iterations = 4000;
    c.sampler.burn_in = 1500;
    c.baseline = false;
    return c;
  }
  if (name == "smoke") {
    ExperimentConfig c = paper_1d();
    c.sample_sizes = {50};
    c.replications = 1;
    c.basis.nodes_per_axis = 50;
    c.sampler.iterations = 500;
    c.sampler.burn_in = 100;
    return c;
  }
  if (name == "wildfire-like") {
    ExperimentConfig c = paper_1d();
    c.truth = TruthSpec::constant(2.0, 3);
    c.fields.lengthscales = {kFineFieldLengthscale, kCoarseFieldLengthscale, kCoarseFieldLengthscale};
    c.fields.resolution = 21;
    c.sample_sizes = {19};
    c.replications = 1;
    c.basis = BasisSpec{3, 6, 0.0};
    c.sampler.iterations = 1000;
    c.sampler.burn_in = 300;
    c.baseline = false;
    return c;
  }
  throw Error("config: unknown preset '" + name + "'");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config: top level must be an object");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw Error("config: 'preset' must be a string");
    json base = to_json(preset(j["preset"].get<std::string>()));
    json patch = j;
    patch.erase("preset");
    check_keys(patch, "",
               {"scenario", "truth", "fields", "window", "n", "replications", "basis", "quadrature", "hyper",
                "sampler", "summary", "baseline", "external", "output", "seed", "threads"});
    base.merge_patch(patch);
    return from_json(base);
  }
  return from_json(j);
}

std::string config_to_json(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return config_from_json(s.str());
}

std::string to_string(Preprocess mode) { return kPreprocess.to(mode); }
Preprocess preprocess_from_string(const std::string& name) { return kPreprocess.from(name); }
std::string to_string(KernelVariant variant) { return kVariant.to(variant); }
KernelVariant kernel_variant_from_string(const std::string& name) { return kVariant.from(name); }
std::string to_string(BandwidthSource source) { return kBandwidth.to(source); }
BandwidthSource bandwidth_source_from_string(const std::string& name) { return kBandwidth.from(name); }

}  // namespace coxgp
