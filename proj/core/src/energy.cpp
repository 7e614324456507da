#include "planecell/energy.hpp"

#include <cmath>

#include "planecell/lindstedt.hpp"
#include "planecell/parallel.hpp"

namespace planecell::energy {

double reduced_average_energy(const Field& z, std::span<const double> omega,
                              double epsilon, const potential::PotentialSpec& spec) {
  const TorusSpec& torus = z.spec();
  if (int(omega.size()) != torus.d)
    throw ConfigError("average_energy: rotation vector has wrong dimension");

  const std::vector<Field> grad = gradient(z);
  potential::Evaluator ev(spec, torus);
  std::vector<double> y = ev.compose_argument(
      {std::vector<double>(omega.begin(), omega.end()), 0.0, std::nullopt});
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
  const Field v = ev.deriv(0, y);

  CompensatedSum acc;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double kinetic = 0.0;
    for (int axis = 0; axis < torus.d; ++axis) {
      const double gi = omega[std::size_t(axis)] + grad[std::size_t(axis)][i];
      kinetic += gi * gi;
    }
    acc.add(0.5 * kinetic + epsilon * v[i]);
  }
  // Node average equals the per-unit-volume integral on a periodic grid.
  return acc.value() / double(z.size());
}

double average_energy(const descent::MinimizerSolution& sol,
                      const potential::PotentialSpec& spec) {
  return reduced_average_energy(sol.z, sol.omega, sol.epsilon, spec);
}

EnergyRecord record(const descent::MinimizerSolution& sol,
                    const potential::PotentialSpec& spec) {
  EnergyRecord rec;
  rec.omega = sol.omega;
  rec.epsilon = sol.epsilon;
  rec.A = average_energy(sol, spec);
  rec.residual = sol.residual_linf;
  rec.grid = sol.z.spec();
  if (!std::isfinite(rec.A))
    throw Error("energy record: average energy is not finite");
  return rec;
}

namespace {

struct BranchResult {
  double A = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  std::string failure;
};

// One minimization at a fixed rotation vector, started from the previous
// iterate (warm start) or from the constant alpha picked by resonance
// analysis. The converged iterate is stored back into *state when given.
BranchResult run_branch_point(const SolveSetup& setup, const std::vector<double>& omega,
                              double epsilon, double alpha0, Field* state,
                              bool use_state) {
  BranchResult out;
  try {
    descent::MinimizerSolution sol =
        (use_state && state && state->size() > 0)
            ? descent::solve(setup.torus, omega, epsilon, setup.potential,
                             setup.params, *state)
            : descent::solve(setup.torus, omega, epsilon, setup.potential,
                             setup.params, alpha0);
    out.A = sol.energy;
    out.residual = sol.residual_linf;
    out.iterations = sol.iterations;
    out.converged = sol.converged;
    if (state) *state = sol.z;
  } catch (const descent::NonConvergenceError& e) {
    out.A = e.last_iterate.energy;
    out.residual = e.last_iterate.residual_linf;
    out.iterations = e.last_iterate.iterations;
    out.converged = false;
    out.failure = e.what();
    if (state) *state = e.last_iterate.z;  // still the best warm start available
  }
  return out;
}

JumpRecord assemble_record(double epsilon, int axis, double dw,
                           const BranchResult& center, const BranchResult& plus,
                           const BranchResult& minus, bool warm) {
  JumpRecord rec;
  rec.epsilon = epsilon;
  rec.direction = axis;
  rec.delta_omega = dw;
  rec.A_center = center.A;
  rec.A_plus = plus.A;
  rec.A_minus = minus.A;
  // Plain one-sided differences. Near a corner A is conical along rays, so
  // the second difference carries no quadratic kinetic term and measures the
  // gradient jump directly; away from corners (eps = 0) it reduces to the
  // curvature of |omega|^2/2, i.e. jump = dw exactly.
  rec.dplus = (plus.A - center.A) / dw;
  rec.dminus = (minus.A - center.A) / dw;
  rec.jump = rec.dplus + rec.dminus;
  rec.residual_max = std::max({center.residual, plus.residual, minus.residual});
  rec.iters_total = center.iterations + plus.iterations + minus.iterations;
  rec.converged = center.converged && plus.converged && minus.converged;
  rec.warm_started = warm;
  if (!center.failure.empty()) rec.failure = "center: " + center.failure;
  if (!plus.failure.empty()) {
    if (!rec.failure.empty()) rec.failure += "; ";
    rec.failure += "plus: " + plus.failure;
  }
  if (!minus.failure.empty()) {
    if (!rec.failure.empty()) rec.failure += "; ";
    rec.failure += "minus: " + minus.failure;
  }
  return rec;
}

std::vector<std::vector<double>> branch_omegas(std::span<const double> omega,
                                               int axis, double dw) {
  std::vector<double> center(omega.begin(), omega.end());
  std::vector<double> plus = center;
  std::vector<double> minus = center;
  plus[std::size_t(axis)] += dw;
  minus[std::size_t(axis)] -= dw;
  return {center, plus, minus};
}

double pick_alpha(const SolveSetup& setup, const std::vector<double>& omega) {
  return lindstedt::select_initial_constant(setup.potential, omega, setup.torus,
                                            setup.probe_depth, setup.alpha_grid)
      .alpha;
}

}  // namespace

JumpRecord jump_estimate(std::span<const double> omega, double epsilon, int axis,
                         const SolveSetup& setup) {
  setup.torus.validate();
  if (axis < 0 || axis >= setup.torus.d)
    throw ConfigError("jump_estimate: axis out of range");
  potential::require_commensurate(omega, setup.torus.N);

  const double dw = 1.0 / double(setup.torus.N);
  const auto omegas = branch_omegas(omega, axis, dw);

  std::vector<BranchResult> results(3);
  run_parallel(3, 0, [&](std::size_t b) {
    const double alpha0 = pick_alpha(setup, omegas[b]);
    results[b] = run_branch_point(setup, omegas[b], epsilon, alpha0, nullptr, false);
  });

  JumpRecord rec =
      assemble_record(epsilon, axis, dw, results[0], results[1], results[2], false);
  if (!rec.converged)
    throw descent::NonConvergenceError(
        "jump_estimate: solve failed (" + rec.failure + ")",
        descent::MinimizerSolution{});
  return rec;
}

std::vector<JumpRecord> sweep(std::span<const double> omega,
                              std::span<const double> epsilons, int axis,
                              const SolveSetup& setup, const SweepOptions& opts) {
  setup.torus.validate();
  if (axis < 0 || axis >= setup.torus.d)
    throw ConfigError("sweep: axis out of range");
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
    if (!(epsilons[i] > 0.0) || epsilons[i] > epsilons[i + 1])
      throw ConfigError("sweep: epsilons must be positive and sorted ascending");
  if (!epsilons.empty() && !(epsilons.back() > 0.0))
    throw ConfigError("sweep: epsilons must be positive");
  if (epsilons.empty()) return {};

  const double dw = 1.0 / double(setup.torus.N);
  const auto omegas = branch_omegas(omega, axis, dw);

  // Branch chains run concurrently; each chain is sequential in eps so the
  // previous solution can seed the next solve (continuation).
  std::vector<std::vector<BranchResult>> results(
      3, std::vector<BranchResult>(epsilons.size()));
  run_parallel(3, opts.max_threads, [&](std::size_t b) {
    const double alpha0 = pick_alpha(setup, omegas[b]);
    Field state;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      const bool warm = opts.warm_start && e > 0;
      results[b][e] = run_branch_point(setup, omegas[b], epsilons[e], alpha0,
                                       &state, warm);
    }
  });

  std::vector<JumpRecord> records;
  records.reserve(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e)
    records.push_back(assemble_record(epsilons[e], axis, dw, results[0][e],
                                      results[1][e], results[2][e],
                                      opts.warm_start && e > 0));
  return records;
}

PowerLawFit fit_power_law(std::span<const JumpRecord> records) {
  std::vector<double> log_eps, log_jump, bad;
  for (const JumpRecord& r : records) {
    if (!r.converged) continue;
    if (r.jump <= 0.0) {
      bad.push_back(r.epsilon);
      continue;
    }
    log_eps.push_back(std::log(r.epsilon));
    log_jump.push_back(std::log(r.jump));
  }
  if (!bad.empty()) {
    std::string msg = "fit_power_law: nonpositive jump at epsilon =";
    for (double e : bad) msg += " " + format_double(e);
    throw InvalidJumpError(msg, bad);
  }
  if (log_eps.size() < 3)
    throw ConfigError("fit_power_law: need at least 3 records with positive jumps");

  const LineFit line = fit_line(log_eps, log_jump);
  PowerLawFit fit;
  fit.C = std::exp(line.intercept);
  fit.p = line.slope;
  fit.rms_log_residual = line.rms_residual;
  fit.points_used = int(log_eps.size());
  return fit;
}

}  // namespace planecell::energy
