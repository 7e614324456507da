#pragma once

// Canonical JSON run configuration. One document drives every subcommand;
// command-line overrides address fields by flat dotted paths. The effective
// config is echoed verbatim into every output for provenance.

#include <string>
#include <vector>

#include "planecell/descent.hpp"
#include "planecell/grid.hpp"
#include "planecell/heteroclinic.hpp"
#include "planecell/potential.hpp"

namespace planecell::cfg {

struct RunConfig {
  potential::PotentialSpec potential;
  std::vector<double> omega;
  TorusSpec torus;
  descent::DescentParams descent;

  double epsilon = 0.01;  // used by single-solve commands
  std::vector<double> sweep_epsilons;
  int direction = 0;
  bool warm_start = true;

  int series_order = 3;
  int probe_depth = 4;
  int alpha_grid = 256;

  double het_L = 10.0;
  int het_n_s = 4096;
  heteroclinic::DaeOptions dae;

  int birkhoff_range = 2;
  descent::TraceLevel trace = descent::TraceLevel::residual;
  long seed = 12345;
  std::string output_dir = "out";

  std::string echo;  // canonical single-line JSON of the effective config
};

/// Parses a config document, applying "path.to.field=value" overrides on top
/// (values are JSON literals; bare words fall back to strings). Throws
/// ConfigError on unknown kinds, invalid ranges, or incommensurate omega.
RunConfig parse_run_config(const std::string& json_text,
                           std::span<const std::string> overrides = {});

RunConfig load_run_config(const std::string& path,
                          std::span<const std::string> overrides = {});

/// The built-in defaults as a JSON document (the schema reference).
std::string default_config_json();

}  // namespace planecell::cfg
