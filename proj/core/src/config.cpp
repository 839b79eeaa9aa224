#include "latrev/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "latrev/error.hpp"

namespace latrev::config {
namespace {

using nlohmann::json;
using constants::kPi;
using constants::kTwoPi;

class Reader {
 public:
  Reader(const json& node, std::string pointer) : node_(node), pointer_(std::move(pointer)) {
    if (!node_.is_object()) bad("", "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : node_.items()) {
      if (!ok.count(k)) bad("/" + k, "unknown key");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  Reader child(const char* key) const { return Reader(node_.at(key), pointer_ + "/" + key); }

  std::optional<double> number(const char* key) const {
    if (!has(key)) return std::nullopt;
    const json& v = node_.at(key);
    if (!v.is_number()) bad(std::string("/") + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(std::string("/") + key, "expected a finite number");
    return d;
  }

  double number(const char* key, double fallback) const { return number(key).value_or(fallback); }

  double required(const char* key) const {
    if (!has(key)) bad(std::string("/") + key, "required value missing");
    return *number(key);
  }

  std::optional<long> integer(const char* key) const {
    if (!has(key)) return std::nullopt;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) bad(std::string("/") + key, "expected an integer");
    return v.get<long>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) bad(std::string("/") + key, "expected true or false");
    return v.get<bool>();
  }

  std::optional<std::string> string(const char* key) const {
    if (!has(key)) return std::nullopt;
    const json& v = node_.at(key);
    if (!v.is_string()) bad(std::string("/") + key, "expected a string");
    return v.get<std::string>();
  }

  [[noreturn]] void bad(const std::string& suffix, const std::string& what) const {
    const std::string where = pointer_ + suffix;
    fail(ErrorKind::Validation, (where.empty() ? std::string("/") : where) + ": " + what);
  }

  std::string pointer(const char* key) const { return pointer_ + "/" + key; }

 private:
  const json& node_;
  std::string pointer_;
};

void require(bool ok, const std::string& invariant) {
  if (!ok) fail(ErrorKind::Validation, "invariant violated: " + invariant);
}

PhysicalSetup read_physical(const Reader& r) {
  r.allow({"atom_mass", "lattice_wavelength", "lattice_depth", "drive_frequency", "drive_amplitude",
           "interaction_G", "interaction_source"});
  PhysicalSetup s;
  s.atom_mass = r.number("atom_mass", s.atom_mass);
  s.lattice_wavelength = r.number("lattice_wavelength", s.lattice_wavelength);
  s.lattice_depth = r.required("lattice_depth");
  s.drive_frequency = r.required("drive_frequency");
  s.drive_amplitude = r.number("drive_amplitude", 0.0);
  s.interaction_G = r.number("interaction_G", 0.0);
  if (r.has("interaction_source")) {
    const Reader src = r.child("interaction_source");
    src.allow({"transverse_frequency", "scattering_length", "mean_density"});
    s.interaction_source = InteractionSource{src.required("transverse_frequency"), src.required("scattering_length"),
                                             src.required("mean_density")};
  }
  require(s.atom_mass > 0.0, "atom_mass > 0");
  require(s.lattice_wavelength > 0.0, "lattice_wavelength > 0");
  require(s.drive_frequency > 0.0, "drive_frequency > 0");
  require(s.lattice_depth >= 0.0, "lattice_depth >= 0");
  require(s.drive_amplitude >= 0.0, "drive_amplitude >= 0");
  require(s.interaction_G >= 0.0, "interaction_G >= 0");
  return s;
}

ScaledParams read_scaled(const Reader& r) {
  r.allow({"kbar", "Vprime", "V0", "G", "lambda"});
  const double kbar = r.required("kbar");
  const double G = r.number("G", 0.0);
  const double lambda = r.number("lambda", 0.0);
  require(kbar > 0.0, "kbar > 0");
  require(G >= 0.0, "G >= 0");
  require(lambda >= 0.0, "lambda >= 0");
  if (r.has("Vprime") && r.has("V0")) r.bad("", "give either Vprime or V0, not both");
  double v0 = 0.0;
  if (r.has("V0")) {
    v0 = r.required("V0");
  } else if (r.has("Vprime")) {
    v0 = r.required("Vprime") * (1.0 + 4.0 * G);
  } else {
    r.bad("/Vprime", "required value missing (or give V0)");
  }
  require(v0 >= 0.0, "lattice depth >= 0");
  return ScaledParams::from_depth(kbar, v0, G, lambda);
}

void read_grid(const Reader& r, quantum::Grid& g) {
  r.allow({"length", "cells", "points"});
  if (r.has("length") && r.has("cells")) r.bad("", "give either length or cells");
  if (auto cells = r.integer("cells")) g.length = static_cast<double>(*cells) * kPi;
  g.length = r.number("length", g.length);
  if (auto n = r.integer("points")) g.points = static_cast<int>(*n);
}

void read_run(const Reader& r, RunBlock& run) {
  r.allow({"tau_end", "periods", "dt", "steps_per_period", "snapshot_stride", "snapshots_per_period",
           "with_interaction"});
  if (r.has("tau_end") && r.has("periods")) r.bad("", "give either tau_end or periods");
  if (r.has("dt") && r.has("steps_per_period")) r.bad("", "give either dt or steps_per_period");
  if (r.has("snapshot_stride") && r.has("snapshots_per_period")) {
    r.bad("", "give either snapshot_stride or snapshots_per_period");
  }
  run.tau_end = r.number("tau_end", run.tau_end);
  if (auto p = r.number("periods")) run.tau_end = *p * kTwoPi;
  run.dt = r.number("dt", run.dt);
  long steps = std::lround(kTwoPi / run.dt);
  if (auto s = r.integer("steps_per_period")) {
    if (*s < 1) r.bad("/steps_per_period", "must be positive");
    steps = *s;
    run.dt = kTwoPi / static_cast<double>(*s);
  }
  run.snapshot_stride = static_cast<int>(std::max(1L, steps / 16));
  if (auto s = r.integer("snapshot_stride")) run.snapshot_stride = static_cast<int>(*s);
  if (auto s = r.integer("snapshots_per_period")) {
    if (*s < 1) r.bad("/snapshots_per_period", "must be positive");
    run.snapshot_stride = static_cast<int>(std::max(1L, steps / *s));
  }
  run.with_interaction = r.boolean("with_interaction", false);
}

void read_initial(const Reader& r, InitialState& s) {
  r.allow({"z0", "p0", "delta_p"});
  s.z0 = r.number("z0", s.z0);
  s.p0 = r.number("p0", s.p0);
  s.delta_p = r.number("delta_p", s.delta_p);
  require(s.delta_p > 0.0, "delta_p > 0");
}

void read_analysis(const Reader& r, AnalysisBlock& a) {
  r.allow({"t_cl_hint", "t_rev_hint", "peaks", "prominence", "max_gap_ratio", "window_factor", "collapse_fraction",
           "envelope_prominence"});
  a.t_cl_hint = r.number("t_cl_hint");
  a.t_rev_hint = r.number("t_rev_hint");
  if (auto k = r.integer("peaks")) a.classical.peaks = static_cast<int>(*k);
  a.classical.relative_prominence = r.number("prominence", a.classical.relative_prominence);
  a.classical.max_gap_ratio = r.number("max_gap_ratio", a.classical.max_gap_ratio);
  a.envelope.window_factor = r.number("window_factor", a.envelope.window_factor);
  a.envelope.collapse_fraction = r.number("collapse_fraction", a.envelope.collapse_fraction);
  a.envelope.relative_prominence = r.number("envelope_prominence", a.envelope.relative_prominence);
  require(a.classical.peaks >= 3, "analysis.peaks >= 3");
  require(a.classical.max_gap_ratio > 1.0, "analysis.max_gap_ratio > 1");
  require(a.envelope.window_factor > 0.0, "analysis.window_factor > 0");
}

void read_classical(const Reader& r, ClassicalBlock& c, double default_lambda) {
  r.allow({"kappa", "lambda", "dt", "steps_per_period", "order", "periods", "seeds"});
  c.kappa = r.number("kappa");
  c.params.lambda = r.number("lambda", default_lambda);
  if (r.has("dt") && r.has("steps_per_period")) r.bad("", "give either dt or steps_per_period");
  if (auto dt = r.number("dt")) {
    try {
      c.params.steps_per_period = steps_per_period_from_dt(*dt);
    } catch (const Error& e) {
      fail(ErrorKind::Validation, r.pointer("dt") + ": " + e.what());
    }
  }
  if (auto s = r.integer("steps_per_period")) c.params.steps_per_period = static_cast<int>(*s);
  if (auto o = r.integer("order")) c.params.order = static_cast<int>(*o);
  if (auto p = r.integer("periods")) c.periods = static_cast<int>(*p);
  if (r.has("seeds")) {
    const Reader s = r.child("seeds");
    s.allow({"nz", "np"});
    if (auto v = s.integer("nz")) c.seeds_z = static_cast<int>(*v);
    if (auto v = s.integer("np")) c.seeds_p = static_cast<int>(*v);
  }
  require(c.periods >= 1, "classical.periods >= 1");
  require(c.seeds_z >= 1 && c.seeds_p >= 1, "classical seed grid non-empty");
}

void read_resonance(const Reader& r, resonance::ContextOptions& o) {
  r.allow({"N", "nbar", "l", "method", "regime"});
  if (auto v = r.integer("N")) o.N = static_cast<int>(*v);
  if (auto v = r.integer("nbar")) o.nbar = static_cast<int>(*v);
  if (auto v = r.integer("l")) o.l = static_cast<int>(*v);
  if (auto m = r.string("method")) {
    if (*m == "harmonic") o.method = resonance::ElementMethod::Harmonic;
    else if (*m == "numeric") o.method = resonance::ElementMethod::Numeric;
    else r.bad("/method", "expected 'harmonic' or 'numeric'");
  }
  if (auto g = r.string("regime")) {
    if (*g == "shallow") o.regime = resonance::Regime::Shallow;
    else if (*g == "deep") o.regime = resonance::Regime::Deep;
    else if (*g != "auto") r.bad("/regime", "expected 'auto', 'shallow' or 'deep'");
  }
  require(o.N >= 1, "resonance.N >= 1");
  require(o.nbar >= 0, "resonance.nbar >= 0");
}

}  // namespace

int steps_per_period_from_dt(double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::Validation, "dt must be positive");
  const double ratio = kTwoPi / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "dt = " << dt << " does not divide 2*pi (2*pi/dt = " << ratio << ")";
    fail(ErrorKind::Validation, os.str());
  }
  return static_cast<int>(rounded);
}

RunConfig parse_config(const json& doc) {
  const Reader root(doc, "");
  root.allow({"physical", "scaled", "grid", "run", "initial", "analysis", "classical", "resonance", "lambda_grid",
              "kbar", "Vprime", "V0", "G", "lambda"});
  RunConfig cfg;

  const bool flat = root.has("kbar") || root.has("Vprime") || root.has("V0") || root.has("G") || root.has("lambda");
  if (flat && root.has("scaled")) root.bad("", "scaled parameters given both flat and in a 'scaled' block");

  if (root.has("physical")) {
    cfg.physical = read_physical(root.child("physical"));
    cfg.scaled = scale_setup(*cfg.physical);
    if (root.has("scaled") || flat) cfg.warnings.emplace_back("scaled block ignored: physical block takes precedence");
  } else if (root.has("scaled")) {
    cfg.scaled = read_scaled(root.child("scaled"));
  } else if (flat) {
    json sub = json::object();
    for (const char* k : {"kbar", "Vprime", "V0", "G", "lambda"}) {
      if (doc.contains(k)) sub[k] = doc.at(k);
    }
    cfg.scaled = read_scaled(Reader(sub, ""));
  } else {
    root.bad("", "exactly one of 'physical' or 'scaled' is required");
  }

  if (root.has("grid")) read_grid(root.child("grid"), cfg.grid);
  if (root.has("run")) read_run(root.child("run"), cfg.run);
  if (root.has("initial")) read_initial(root.child("initial"), cfg.initial);
  if (root.has("analysis")) read_analysis(root.child("analysis"), cfg.analysis);
  cfg.classical.params.lambda = cfg.scaled.lambda;
  cfg.classical.params.kappa = cfg.scaled.effective_depth;
  if (root.has("classical")) read_classical(root.child("classical"), cfg.classical, cfg.scaled.lambda);
  if (cfg.classical.kappa) cfg.classical.params.kappa = *cfg.classical.kappa;
  if (root.has("resonance")) read_resonance(root.child("resonance"), cfg.resonance);
  if (auto g = root.string("lambda_grid")) {
    analysis::parse_grid(*g);
    cfg.lambda_grid = *g;
  }

  // Cross-module invariants.
  quantum::validate(cfg.grid);
  classical::validate(cfg.classical.params);
  require(cfg.run.dt > 0.0 && cfg.run.dt <= kTwoPi / 200.0 * (1.0 + 1e-12), "run.dt <= 2*pi/200");
  require(cfg.run.tau_end >= 0.0, "run.tau_end >= 0");
  require(cfg.run.snapshot_stride >= 0, "run.snapshot_stride >= 0");
  const double width = cfg.scaled.kbar / (2.0 * cfg.initial.delta_p);
  require(width <= cfg.grid.length / 8.0, "packet width kbar/(2 delta_p) <= L/8");
  if (cfg.run.with_interaction) {
    const ValidityReport v = effective_potential_validity(cfg.scaled);
    if (v.status != Validity::Valid) cfg.warnings.push_back(v.message);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Validation, path.string() + ": malformed JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ScaledParams& p) {
  return {{"kbar", p.kbar},
          {"V0", p.lattice_depth_recoil},
          {"G", p.interaction_G},
          {"Vprime", p.effective_depth},
          {"q0", p.q0},
          {"lambda", p.lambda}};
}

json to_json(const PhysicalSetup& s) {
  json j = {{"atom_mass", s.atom_mass},
            {"lattice_wavelength", s.lattice_wavelength},
            {"lattice_depth", s.lattice_depth},
            {"drive_frequency", s.drive_frequency},
            {"drive_amplitude", s.drive_amplitude},
            {"interaction_G", s.interaction_G},
            {"recoil_energy", s.recoil_energy()}};
  if (s.interaction_source) {
    j["interaction_source"] = {{"transverse_frequency", s.interaction_source->transverse_frequency},
                               {"scattering_length", s.interaction_source->scattering_length},
                               {"mean_density", s.interaction_source->mean_density}};
  }
  return j;
}

json to_json(const RunConfig& c) {
  json j;
  if (c.physical) j["physical"] = to_json(*c.physical);
  j["scaled"] = to_json(c.scaled);
  j["grid"] = {{"length", c.grid.length}, {"points", c.grid.points}, {"dz", c.grid.dz()}};
  j["run"] = {{"tau_end", c.run.tau_end},
              {"dt", c.run.dt},
              {"snapshot_stride", c.run.snapshot_stride},
              {"with_interaction", c.run.with_interaction}};
  j["initial"] = {{"z0", c.initial.z0},
                  {"p0", c.initial.p0},
                  {"delta_p", c.initial.delta_p},
                  {"delta_z", c.scaled.kbar / (2.0 * c.initial.delta_p)}};
  json a = {{"peaks", c.analysis.classical.peaks},
            {"prominence", c.analysis.classical.relative_prominence},
            {"max_gap_ratio", c.analysis.classical.max_gap_ratio},
            {"window_factor", c.analysis.envelope.window_factor},
            {"collapse_fraction", c.analysis.envelope.collapse_fraction},
            {"envelope_prominence", c.analysis.envelope.relative_prominence}};
  if (c.analysis.t_cl_hint) a["t_cl_hint"] = *c.analysis.t_cl_hint;
  if (c.analysis.t_rev_hint) a["t_rev_hint"] = *c.analysis.t_rev_hint;
  j["analysis"] = a;
  j["classical"] = {{"kappa", c.classical.params.kappa},
                    {"lambda", c.classical.params.lambda},
                    {"steps_per_period", c.classical.params.steps_per_period},
                    {"dt", c.classical.params.dt()},
                    {"order", c.classical.params.order},
                    {"periods", c.classical.periods},
                    {"seeds", {{"nz", c.classical.seeds_z}, {"np", c.classical.seeds_p}}}};
  json r = {{"N", c.resonance.N},
            {"nbar", c.resonance.nbar},
            {"l", c.resonance.l},
            {"method", resonance::to_string(c.resonance.method)},
            {"regime", c.resonance.regime ? resonance::to_string(*c.resonance.regime) : "auto"}};
  j["resonance"] = r;
  if (c.lambda_grid) j["lambda_grid"] = *c.lambda_grid;
  j["warnings"] = c.warnings;
  return j;
}

json to_input_json(const RunConfig& c) {
  json j;
  if (c.physical) {
    j["physical"] = to_json(*c.physical);
    j["physical"].erase("recoil_energy");
  } else {
    j["scaled"] = {{"kbar", c.scaled.kbar},
                   {"V0", c.scaled.lattice_depth_recoil},
                   {"G", c.scaled.interaction_G},
                   {"lambda", c.scaled.lambda}};
  }
  j["grid"] = {{"length", c.grid.length}, {"points", c.grid.points}};
  j["run"] = {{"tau_end", c.run.tau_end},
              {"dt", c.run.dt},
              {"snapshot_stride", c.run.snapshot_stride},
              {"with_interaction", c.run.with_interaction}};
  j["initial"] = {{"z0", c.initial.z0}, {"p0", c.initial.p0}, {"delta_p", c.initial.delta_p}};
  json a = {{"peaks", c.analysis.classical.peaks},
            {"prominence", c.analysis.classical.relative_prominence},
            {"max_gap_ratio", c.analysis.classical.max_gap_ratio},
            {"window_factor", c.analysis.envelope.window_factor},
            {"collapse_fraction", c.analysis.envelope.collapse_fraction},
            {"envelope_prominence", c.analysis.envelope.relative_prominence}};
  if (c.analysis.t_cl_hint) a["t_cl_hint"] = *c.analysis.t_cl_hint;
  if (c.analysis.t_rev_hint) a["t_rev_hint"] = *c.analysis.t_rev_hint;
  j["analysis"] = a;
  j["classical"] = {{"kappa", c.classical.params.kappa},
                    {"lambda", c.classical.params.lambda},
                    {"steps_per_period", c.classical.params.steps_per_period},
                    {"order", c.classical.params.order},
                    {"periods", c.classical.periods},
                    {"seeds", {{"nz", c.classical.seeds_z}, {"np", c.classical.seeds_p}}}};
  json r = {{"N", c.resonance.N},
            {"nbar", c.resonance.nbar},
            {"l", c.resonance.l},
            {"method", resonance::to_string(c.resonance.method)},
            {"regime", c.resonance.regime ? resonance::to_string(*c.resonance.regime) : "auto"}};
  j["resonance"] = r;
  if (c.lambda_grid) j["lambda_grid"] = *c.lambda_grid;
  return j;
}

}  // namespace latrev::config
