// planecell: spectral cell-problem solver suite.
//
// Subcommands:
//   solve         one minimization, field dump + residual trace + Birkhoff report
//   jump-sweep    A_eps corners over an epsilon list, CSV + power-law fit
//   lindstedt     resonance analysis, series coefficients, order check
//   heteroclinic  transition profile, kinetic integral, strip quadrature
//   compare       numeric vs quadrature vs closed-form jump, side by side
//
// Exit codes: 0 success, 1 numerical failure, 2 config error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "planecell/descent.hpp"
#include "planecell/energy.hpp"
#include "planecell/heteroclinic.hpp"
#include "planecell/io.hpp"
#include "planecell/lindstedt.hpp"
#include "planecell/run_config.hpp"
#include "planecell/version.hpp"

namespace pc = planecell;
using json = nlohmann::ordered_json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir_override;
};

pc::cfg::RunConfig load(const CommonArgs& args) {
  pc::cfg::RunConfig rc = pc::cfg::load_run_config(args.config_path, args.overrides);
  if (!args.output_dir_override.empty()) rc.output_dir = args.output_dir_override;
  std::filesystem::create_directories(rc.output_dir);
  return rc;
}

std::string path_in(const pc::cfg::RunConfig& rc, const std::string& name) {
  return (std::filesystem::path(rc.output_dir) / name).string();
}

json json_header(const pc::cfg::RunConfig& rc) {
  json j;
  j["schema"] = pc::kSchemaVersion;
  j["config"] = json::parse(rc.echo);
  return j;
}

void write_json(const std::string& path, const json& j) {
  pc::io::write_text_file(path, j.dump(2) + "\n");
}

void write_error_json(const pc::cfg::RunConfig& rc, const std::string& kind,
                      const std::string& message, const json& extra = json::object()) {
  json j = json_header(rc);
  j["error"] = kind;
  j["message"] = message;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  write_json(path_in(rc, "error.json"), j);
}

pc::energy::SolveSetup setup_from(const pc::cfg::RunConfig& rc) {
  pc::energy::SolveSetup setup;
  setup.torus = rc.torus;
  setup.potential = rc.potential;
  setup.params = rc.descent;
  setup.probe_depth = 1;  // side constants only need the first-order probe
  setup.alpha_grid = rc.alpha_grid;
  return setup;
}

const char* birkhoff_class_name(pc::descent::BirkhoffClass c) {
  switch (c) {
    case pc::descent::BirkhoffClass::positive: return "positive";
    case pc::descent::BirkhoffClass::negative: return "negative";
    case pc::descent::BirkhoffClass::zero: return "zero";
    case pc::descent::BirkhoffClass::mixed: return "MIXED";
  }
  return "?";
}

int cmd_solve(const pc::cfg::RunConfig& rc) {
  // At eps = 0 every constant is a minimizer; start from the bare plane.
  pc::lindstedt::InitialConstant pick;
  if (rc.epsilon != 0.0)
    pick = pc::lindstedt::select_initial_constant(rc.potential, rc.omega, rc.torus,
                                                  1, rc.alpha_grid);

  pc::descent::MinimizerSolution sol;
  try {
    sol = pc::descent::solve(rc.torus, rc.omega, rc.epsilon, rc.potential,
                             rc.descent, pick.alpha, rc.trace);
  } catch (const pc::descent::NonConvergenceError& e) {
    write_error_json(rc, "NonConvergence", e.what(),
                     {{"residual", e.last_iterate.residual_linf},
                      {"iterations", e.last_iterate.iterations}});
    std::cerr << "planecell solve: " << e.what() << "\n";
    return 1;
  }

  pc::io::write_field_dump(path_in(rc, "solution.field"), sol.z, sol.omega,
                           sol.epsilon, rc.echo);

  if (rc.trace != pc::descent::TraceLevel::none) {
    const bool with_energy = rc.trace == pc::descent::TraceLevel::full;
    std::vector<std::string> cols{"iteration", "residual"};
    if (with_energy) cols.push_back("energy");
    pc::io::CsvWriter trace(path_in(rc, "trace.csv"), rc.echo, cols);
    for (std::size_t i = 0; i < sol.residual_trace.size(); ++i) {
      if (with_energy)
        trace.row(std::array<double, 3>{double(i), sol.residual_trace[i],
                                        sol.energy_trace[i]});
      else
        trace.row(std::array<double, 2>{double(i), sol.residual_trace[i]});
    }
  }

  const auto report = pc::descent::check_birkhoff(sol, rc.birkhoff_range);
  {
    pc::io::CsvWriter birkhoff(path_in(rc, "birkhoff.csv"), rc.echo,
                               {"k", "l", "class", "min", "max"});
    for (const auto& e : report.entries) {
      std::string kstr = "\"(";
      for (std::size_t i = 0; i < e.k.size(); ++i)
        kstr += (i ? " " : "") + std::to_string(e.k[i]);
      kstr += ")\"";
      birkhoff.raw_row(kstr + "," + std::to_string(e.l) + "," +
                       birkhoff_class_name(e.cls) + "," + pc::format_double(e.min) +
                       "," + pc::format_double(e.max));
    }
  }

  // Seeded minimality spot check: the converged energy should not beat the
  // energies of small random perturbations.
  bool minimal = true;
  {
    std::mt19937 rng(static_cast<unsigned>(rc.seed));
    std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
    for (int trial = 0; trial < 20 && minimal; ++trial) {
      pc::Field z = sol.z;
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += dist(rng);
      if (pc::energy::reduced_average_energy(z, sol.omega, sol.epsilon,
                                             rc.potential) < sol.energy - 1e-12)
        minimal = false;
    }
  }

  json j = json_header(rc);
  j["alpha0"] = pick.alpha;
  j["energy"] = sol.energy;
  j["residual_linf"] = sol.residual_linf;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["stop_reason"] = pc::descent::to_string(sol.stop_reason);
  j["birkhoff_mixed"] = report.any_mixed;
  j["minimality_spot_check"] = minimal;
  write_json(path_in(rc, "solve.json"), j);
  std::cout << "solve: energy " << pc::format_double(sol.energy) << ", residual "
            << pc::format_double(sol.residual_linf) << " after " << sol.iterations
            << " iterations\n";
  return 0;
}

int write_sweep_outputs(const pc::cfg::RunConfig& rc,
                        const std::vector<pc::energy::JumpRecord>& records,
                        const std::string& csv_name, const std::string& fit_name,
                        const std::string& loglog_name) {
  {
    pc::io::CsvWriter csv(path_in(rc, csv_name), rc.echo,
                          {"epsilon", "A_center", "A_plus", "A_minus", "dplus",
                           "dminus", "jump", "residual_max", "iters_total"});
    for (const auto& r : records)
      csv.row(std::array<double, 9>{r.epsilon, r.A_center, r.A_plus, r.A_minus,
                                    r.dplus, r.dminus, r.jump, r.residual_max,
                                    double(r.iters_total)});
  }
  {
    pc::io::CsvWriter loglog(path_in(rc, loglog_name), rc.echo,
                             {"log_epsilon", "log_jump"});
    for (const auto& r : records)
      if (r.converged && r.jump > 0.0)
        loglog.row(std::array<double, 2>{std::log(r.epsilon), std::log(r.jump)});
  }

  json j = json_header(rc);
  int failures = 0;
  json failed = json::array();
  for (const auto& r : records)
    if (!r.converged) {
      ++failures;
      failed.push_back({{"epsilon", r.epsilon}, {"failure", r.failure}});
    }
  j["failed_points"] = failed;
  try {
    const pc::energy::PowerLawFit fit = pc::energy::fit_power_law(records);
    j["C"] = fit.C;
    j["p"] = fit.p;
    j["rms_log_residual"] = fit.rms_log_residual;
    j["points_used"] = fit.points_used;
    write_json(path_in(rc, fit_name), j);
    std::cout << "fit: C = " << pc::format_double(fit.C)
              << ", p = " << pc::format_double(fit.p) << " over "
              << fit.points_used << " points\n";
  } catch (const pc::Error& e) {
    j["fit_error"] = e.what();
    write_json(path_in(rc, fit_name), j);
    std::cerr << "planecell: fit failed: " << e.what() << "\n";
    return 1;
  }
  return failures == 0 ? 0 : 1;
}

int cmd_jump_sweep(const pc::cfg::RunConfig& rc) {
  if (rc.sweep_epsilons.empty()) throw pc::ConfigError("jump-sweep: empty epsilon list");
  for (double e : rc.sweep_epsilons)
    if (!(e > 0.0)) throw pc::ConfigError("jump-sweep: epsilons must be positive");
  pc::energy::SweepOptions opts;
  opts.warm_start = rc.warm_start;
  const auto records = pc::energy::sweep(rc.omega, rc.sweep_epsilons, rc.direction,
                                         setup_from(rc), opts);
  return write_sweep_outputs(rc, records, "sweep.csv", "fit.json", "loglog.dat");
}

int cmd_lindstedt(const pc::cfg::RunConfig& rc) {
  if (rc.sweep_epsilons.empty())
    throw pc::ConfigError("lindstedt: empty epsilon list (needed for the order check)");

  pc::lindstedt::ResonanceAnalysis analysis;
  try {
    analysis = pc::lindstedt::analyze_resonance(rc.potential, rc.omega, rc.torus,
                                                rc.probe_depth, rc.alpha_grid);
  } catch (const pc::Error& e) {
    write_error_json(rc, "ResonanceAnalysis", e.what());
    std::cerr << "planecell lindstedt: " << e.what() << "\n";
    return 1;
  }

  json j = json_header(rc);
  if (analysis.resonance_order)
    j["resonance_order"] = *analysis.resonance_order;
  else
    j["resonance_order"] = nullptr;
  j["roots"] = analysis.roots;
  j["twist_values"] = analysis.twist_values;
  j["phi_max_by_order"] = analysis.phi_max_by_order;
  write_json(path_in(rc, "resonance.json"), j);

  if (!analysis.resonance_order) {
    std::cout << "lindstedt: no resonance within probe depth " << rc.probe_depth
              << "\n";
    return 0;
  }

  // Build the series at the minimizing root and check the truncation order.
  double alpha = analysis.roots.front();
  double best = 0.0;
  bool have = false;
  for (double r : analysis.roots) {
    const double e = pc::potential::mean_deriv_y(rc.potential, 0,
                                                 {rc.omega, r, std::nullopt}, rc.torus);
    if (!have || e < best) {
      best = e;
      alpha = r;
      have = true;
    }
  }
  const auto series = pc::lindstedt::build_series(rc.potential, rc.omega, rc.torus,
                                                  alpha, rc.series_order);
  {
    pc::io::CsvWriter csv(path_in(rc, "series_norms.csv"), rc.echo,
                          {"order", "linf_u_star", "lambda"});
    for (int jorder = 1; jorder < series.order(); ++jorder)
      csv.row(std::array<double, 3>{double(jorder),
                                    series.u_star[std::size_t(jorder - 1)].linf(),
                                    series.lambda[std::size_t(jorder - 1)]});
  }

  std::vector<double> log_eps, log_res, residuals;
  for (double e : rc.sweep_epsilons) {
    if (!(e > 0.0)) continue;
    const double r = pc::lindstedt::series_residual(series, e, rc.potential);
    residuals.push_back(r);
    log_eps.push_back(std::log(e));
    log_res.push_back(std::log(r));
  }
  json oc = json_header(rc);
  oc["alpha"] = alpha;
  oc["order"] = series.order();
  oc["final_lambda_fixed"] = series.final_lambda_fixed;
  oc["epsilons"] = rc.sweep_epsilons;
  oc["residuals"] = residuals;
  if (log_eps.size() >= 2) {
    const pc::LineFit fit = pc::fit_line(log_eps, log_res);
    oc["slope"] = fit.slope;
    std::cout << "lindstedt: j* = " << *analysis.resonance_order << ", "
              << analysis.roots.size() << " roots, order-check slope "
              << pc::format_double(fit.slope) << " (expect ~" << series.order()
              << ")\n";
  }
  write_json(path_in(rc, "order_check.json"), oc);
  return 0;
}

int cmd_heteroclinic(const pc::cfg::RunConfig& rc) {
  const auto profile = pc::heteroclinic::build_profile(
      rc.epsilon, rc.direction, rc.dae.eta_sign, rc.het_L, rc.het_n_s);
  {
    pc::io::CsvWriter csv(path_in(rc, "profile.csv"), rc.echo, {"s", "alpha"});
    for (std::size_t i = 0; i < profile.s.size(); ++i)
      csv.row(std::array<double, 2>{profile.s[i], profile.alpha[i]});
  }
  json pj = json_header(rc);
  pj["alpha_minus"] = profile.alpha_minus;
  pj["alpha_plus"] = profile.alpha_plus;
  pj["ode_residual_linf"] = profile.ode_residual_linf;
  write_json(path_in(rc, "profile.json"), pj);

  {
    pc::io::CsvWriter csv(path_in(rc, "kinetic.csv"), rc.echo,
                          {"epsilon", "quadrature", "closed_form", "rel_error"});
    for (double e : rc.sweep_epsilons) {
      if (e == 0.0) {
        csv.row(std::array<double, 4>{0.0, 0.0, 0.0, 0.0});
        continue;
      }
      const double q = pc::heteroclinic::kinetic_jump_integral(e);
      const double cf = pc::heteroclinic::closed_form_kinetic(e);
      csv.row(std::array<double, 4>{e, q, cf, std::abs(q - cf) / cf});
    }
  }

  if (rc.potential.kind != pc::potential::Kind::product_cos) {
    std::cout << "heteroclinic: profile and kinetic integral written; strip "
                 "quadrature needs the product_cos family\n";
    return 0;
  }

  const auto pick = pc::lindstedt::select_initial_constant(
      rc.potential, rc.omega, rc.torus, 1, rc.alpha_grid);
  if (!pick.analysis || !pick.analysis->resonance_order) {
    std::cout << "heteroclinic: no first-order resonance at this rotation "
                 "vector; strip quadrature skipped\n";
    return 0;
  }
  const auto series = pc::lindstedt::build_series(
      rc.potential, rc.omega, rc.torus, pick.alpha, std::max(2, rc.series_order));
  {
    pc::io::CsvWriter csv(path_in(rc, "dae.csv"), rc.echo,
                          {"epsilon", "dplus", "dminus", "jump", "jump_analytic",
                           "relative_gap", "kinetic_sech2", "potential_plus",
                           "potential_minus"});
    for (double e : rc.sweep_epsilons) {
      if (e == 0.0) {
        csv.row(std::array<double, 9>{});
        continue;
      }
      const auto q = pc::heteroclinic::dae_quadrature(e, rc.direction, rc.potential,
                                                      series, rc.dae);
      const double analytic = pc::heteroclinic::analytic_jump(e);
      csv.row(std::array<double, 9>{e, q.dplus, q.dminus, q.jump, analytic,
                                    std::abs(q.jump - analytic) / analytic,
                                    q.kinetic_sech2, q.potential_plus,
                                    q.potential_minus});
    }
  }
  std::cout << "heteroclinic: profile residual "
            << pc::format_double(profile.ode_residual_linf) << "\n";
  return 0;
}

int cmd_compare(const pc::cfg::RunConfig& rc) {
  if (rc.potential.kind != pc::potential::Kind::product_cos)
    throw pc::ConfigError("compare: the three-way comparison is defined for the "
                          "product_cos family");
  if (rc.sweep_epsilons.empty()) throw pc::ConfigError("compare: empty epsilon list");

  std::vector<double> positive;
  for (double e : rc.sweep_epsilons)
    if (e > 0.0) positive.push_back(e);

  pc::energy::SweepOptions opts;
  opts.warm_start = rc.warm_start;
  const auto records =
      pc::energy::sweep(rc.omega, positive, rc.direction, setup_from(rc), opts);

  const auto pick = pc::lindstedt::select_initial_constant(
      rc.potential, rc.omega, rc.torus, 1, rc.alpha_grid);
  const auto series = pc::lindstedt::build_series(
      rc.potential, rc.omega, rc.torus, pick.alpha, std::max(2, rc.series_order));

  int failures = 0;
  double max_gap = 0.0;
  {
    pc::io::CsvWriter csv(
        path_in(rc, "compare.csv"), rc.echo,
        {"epsilon", "jump_numeric", "jump_dae", "jump_analytic",
         "gap_numeric_vs_analytic", "gap_dae_vs_analytic", "gap_numeric_vs_dae"});
    std::size_t ri = 0;
    for (double e : rc.sweep_epsilons) {
      if (e == 0.0) {
        csv.row(std::array<double, 7>{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
        continue;
      }
      const auto& r = records[ri++];
      if (!r.converged) {
        ++failures;
        continue;
      }
      const auto q =
          pc::heteroclinic::dae_quadrature(e, rc.direction, rc.potential, series, rc.dae);
      const double analytic = pc::heteroclinic::analytic_jump(e);
      const double g1 = std::abs(r.jump - analytic) / analytic;
      const double g2 = std::abs(q.jump - analytic) / analytic;
      const double g3 = std::abs(r.jump - q.jump) / std::abs(q.jump);
      max_gap = std::max({max_gap, g1, g2, g3});
      csv.row(std::array<double, 7>{e, r.jump, q.jump, analytic, g1, g2, g3});
    }
  }
  json j = json_header(rc);
  j["max_relative_gap"] = max_gap;
  j["failed_points"] = failures;
  write_json(path_in(rc, "compare.json"), j);
  std::cout << "compare: max relative gap " << pc::format_double(max_gap) << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planecell: spectral cell-problem solver suite"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", args.config_path, "JSON config file")->required();
    sub->add_option("-s,--set", args.overrides,
                    "override a config field, path.to.field=value (repeatable)");
    sub->add_option("-o,--output-dir", args.output_dir_override,
                    "override the configured output directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "run one minimization");
  CLI::App* sweep = app.add_subcommand("jump-sweep", "corner sizes over an epsilon list");
  CLI::App* lind = app.add_subcommand("lindstedt", "resonance analysis and series");
  CLI::App* het = app.add_subcommand("heteroclinic", "profile and strip quadrature");
  CLI::App* comp = app.add_subcommand("compare", "three-way jump comparison");
  for (CLI::App* sub : {solve, sweep, lind, het, comp}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const pc::cfg::RunConfig rc = load(args);
    if (solve->parsed()) return cmd_solve(rc);
    if (sweep->parsed()) return cmd_jump_sweep(rc);
    if (lind->parsed()) return cmd_lindstedt(rc);
    if (het->parsed()) return cmd_heteroclinic(rc);
    if (comp->parsed()) return cmd_compare(rc);
  } catch (const pc::ConfigError& e) {
    std::cerr << "planecell: config error: " << e.what() << "\n";
    return 2;
  } catch (const pc::Error& e) {
    std::cerr << "planecell: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "planecell: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
