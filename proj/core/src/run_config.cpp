#include "planecell/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace planecell::cfg {

using json = nlohmann::ordered_json;

namespace {

json defaults() {
  return json{
      {"potential",
       {{"kind", "product_cos"}, {"k", {2, 3}}, {"amplitude", 1.0}, {"terms", json::array()}}},
      {"omega", {2.0, 3.0}},
      {"torus", {{"d", 2}, {"N", 16}, {"m", 256}}},
      {"epsilon", 0.01},
      {"descent",
       {{"beta", 0.9},
        {"gamma", 1.0},
        {"dt", 0.5},
        {"delta", 1.0},
        {"max_iters", 200000},
        {"tol_residual", 1e-9},
        {"tol_step", 1e-12}}},
      {"sweep",
       {{"epsilons", {0.003, 0.006, 0.0125, 0.025, 0.05, 0.1}},
        {"direction", 0},
        {"warm_start", true}}},
      {"series", {{"order", 3}, {"probe_depth", 4}, {"alpha_grid", 256}}},
      {"heteroclinic",
       {{"L", 10.0},
        {"n_s", 4096},
        {"strip_factor", 10.0},
        {"panels", 64},
        {"gl_order", 10},
        {"n_transverse", 64}}},
      {"birkhoff_range", 2},
      {"trace", "residual"},
      {"seed", 12345},
      {"output_dir", "out"}};
}

void merge_into(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object())
    throw ConfigError("config: expected an object at " + (where.empty() ? "top level" : where));
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (!base.contains(it.key()))
      throw ConfigError("config: unknown key '" +
                        (where.empty() ? it.key() : where + "." + it.key()) + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object()) {
      merge_into(slot, it.value(), where.empty() ? it.key() : where + "." + it.key());
    } else {
      slot = it.value();
    }
  }
}

void apply_override(json& base, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like path.to.field=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const std::string value_text = spec.substr(eq + 1);

  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;  // bare word: treat as string
  }

  json* slot = &base;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("override has empty path: " + spec);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!slot->is_object() || !slot->contains(parts[i]))
      throw ConfigError("override addresses unknown field '" + path + "'");
    slot = &(*slot)[parts[i]];
    if (i + 1 == parts.size()) *slot = value;
  }
}

potential::PotentialSpec parse_potential(const json& j) {
  potential::PotentialSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "product_cos") {
    spec.kind = potential::Kind::product_cos;
  } else if (kind == "separable") {
    spec.kind = potential::Kind::separable;
  } else if (kind == "mixed") {
    spec.kind = potential::Kind::mixed;
  } else if (kind == "custom_trig") {
    spec.kind = potential::Kind::custom_trig;
  } else {
    throw ConfigError("config: unknown potential kind '" + kind + "'");
  }
  spec.k = j.at("k").get<std::vector<int>>();
  spec.amplitude = j.at("amplitude").get<double>();
  for (const json& t : j.at("terms")) {
    potential::TrigTerm term;
    term.amplitude = t.at("amplitude").get<double>();
    term.p = t.at("p").get<std::vector<int>>();
    term.phase_x = t.value("phase_x", 0.0);
    term.q = t.at("q").get<int>();
    term.phase_y = t.value("phase_y", 0.0);
    spec.terms.push_back(std::move(term));
  }
  if (spec.kind == potential::Kind::custom_trig && spec.terms.empty())
    throw ConfigError("config: custom_trig potential needs at least one term");
  return spec;
}

}  // namespace

std::string default_config_json() { return defaults().dump(2); }

RunConfig parse_run_config(const std::string& json_text,
                           std::span<const std::string> overrides) {
  json doc = defaults();
  json user;
  try {
    user = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  merge_into(doc, user, "");
  for (const std::string& o : overrides) apply_override(doc, o);

  RunConfig rc;
  try {
    rc.potential = parse_potential(doc.at("potential"));
    rc.omega = doc.at("omega").get<std::vector<double>>();
    rc.torus.d = doc.at("torus").at("d").get<int>();
    rc.torus.N = doc.at("torus").at("N").get<int>();
    rc.torus.m = doc.at("torus").at("m").get<int>();
    const json& de = doc.at("descent");
    rc.descent.beta = de.at("beta").get<double>();
    rc.descent.gamma = de.at("gamma").get<double>();
    rc.descent.dt = de.at("dt").get<double>();
    rc.descent.delta = de.at("delta").get<double>();
    rc.descent.max_iters = de.at("max_iters").get<long>();
    rc.descent.tol_residual = de.at("tol_residual").get<double>();
    rc.descent.tol_step = de.at("tol_step").get<double>();
    rc.epsilon = doc.at("epsilon").get<double>();
    const json& sw = doc.at("sweep");
    rc.sweep_epsilons = sw.at("epsilons").get<std::vector<double>>();
    rc.direction = sw.at("direction").get<int>();
    rc.warm_start = sw.at("warm_start").get<bool>();
    const json& se = doc.at("series");
    rc.series_order = se.at("order").get<int>();
    rc.probe_depth = se.at("probe_depth").get<int>();
    rc.alpha_grid = se.at("alpha_grid").get<int>();
    const json& he = doc.at("heteroclinic");
    rc.het_L = he.at("L").get<double>();
    rc.het_n_s = he.at("n_s").get<int>();
    rc.dae.strip_factor = he.at("strip_factor").get<double>();
    rc.dae.panels = he.at("panels").get<int>();
    rc.dae.gl_order = he.at("gl_order").get<int>();
    rc.dae.n_transverse = he.at("n_transverse").get<int>();
    rc.birkhoff_range = doc.at("birkhoff_range").get<int>();
    const std::string trace = doc.at("trace").get<std::string>();
    if (trace == "none") {
      rc.trace = descent::TraceLevel::none;
    } else if (trace == "residual") {
      rc.trace = descent::TraceLevel::residual;
    } else if (trace == "full") {
      rc.trace = descent::TraceLevel::full;
    } else {
      throw ConfigError("config: trace must be none, residual or full");
    }
    rc.seed = doc.at("seed").get<long>();
    rc.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  rc.torus.validate();
  rc.descent.validate();
  if (int(rc.omega.size()) != rc.torus.d)
    throw ConfigError("config: omega dimension does not match torus");
  potential::require_commensurate(rc.omega, rc.torus.N);
  if (rc.direction < 0 || rc.direction >= rc.torus.d)
    throw ConfigError("config: sweep direction out of range");
  if (rc.series_order < 1) throw ConfigError("config: series order must be >= 1");
  for (std::size_t i = 0; i + 1 < rc.sweep_epsilons.size(); ++i)
    if (rc.sweep_epsilons[i] > rc.sweep_epsilons[i + 1])
      throw ConfigError("config: sweep epsilons must be sorted ascending");
  for (double e : rc.sweep_epsilons)
    if (!(e >= 0.0)) throw ConfigError("config: sweep epsilons must be nonnegative");

  rc.echo = doc.dump();
  return rc;
}

RunConfig load_run_config(const std::string& path,
                          std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), overrides);
}

}  // namespace planecell::cfg
