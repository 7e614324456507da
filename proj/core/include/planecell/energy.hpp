#pragma once

// Minimal average energy A_eps(omega) on the torus, one-sided derivative
// estimates over rotation vectors, jump (corner) extraction, eps-sweeps and
// log-log power-law fitting.

#include <string>
#include <vector>

#include "planecell/descent.hpp"
#include "planecell/grid.hpp"
#include "planecell/potential.hpp"

namespace planecell::energy {

/// Per-unit-volume value of the reduced functional at u = omega.x + z:
///   (1/N^d) integral of  |omega + grad z|^2 / 2 + eps V(x, omega.x + z).
/// Gradients are spectral; the quadrature is the node average.
double reduced_average_energy(const Field& z, std::span<const double> omega,
                              double epsilon, const potential::PotentialSpec& spec);

double average_energy(const descent::MinimizerSolution& sol,
                      const potential::PotentialSpec& spec);

struct EnergyRecord {
  std::vector<double> omega;
  double epsilon = 0.0;
  double A = 0.0;
  double residual = 0.0;
  TorusSpec grid;
};

/// Packages one converged solve as an energy record.
EnergyRecord record(const descent::MinimizerSolution& sol,
                    const potential::PotentialSpec& spec);

struct JumpRecord {
  double epsilon = 0.0;
  int direction = 0;          // axis index j
  double dplus = 0.0;         // estimate of D_{+e_j} A_eps(omega)
  double dminus = 0.0;        // estimate of D_{-e_j} A_eps(omega)
  double jump = 0.0;          // dplus + dminus
  double delta_omega = 0.0;   // step 1/N used
  double A_center = 0.0;
  double A_plus = 0.0;
  double A_minus = 0.0;
  double residual_max = 0.0;
  long iters_total = 0;
  bool converged = false;
  bool warm_started = false;
  std::string failure;        // nonempty when a solve failed
};

struct PowerLawFit {
  double C = 0.0;                // prefactor
  double p = 0.0;                // exponent
  double rms_log_residual = 0.0;
  int points_used = 0;
};

/// Everything needed to run one minimization.
struct SolveSetup {
  TorusSpec torus;
  potential::PotentialSpec potential;
  descent::DescentParams params;
  int probe_depth = 1;    // resonance probe depth for initial constants
  int alpha_grid = 256;
};

/// Computes A at omega and omega +- (1/N) e_j via fresh solves started from
/// constants chosen by resonance analysis, then takes plain one-sided
/// differences:
///   dplus  = (A(omega + dw e_j) - A(omega)) / dw,
///   dminus = (A(omega - dw e_j) - A(omega)) / dw,
///   jump   = dplus + dminus.
/// At a resonant corner A is conical along rays through omega, so the second
/// difference measures the gradient jump directly. On smooth stretches it
/// instead returns the quadratic-background curvature, which for the kinetic
/// part is exactly dw (the eps = 0 baseline).
JumpRecord jump_estimate(std::span<const double> omega, double epsilon, int axis,
                         const SolveSetup& setup);

struct SweepOptions {
  bool warm_start = true;  // reuse the previous eps solution per branch
  int max_threads = 0;     // 0 = PLANECELL_THREADS or hardware concurrency
};

/// One JumpRecord per eps (ascending). Branch chains (center, plus, minus)
/// run concurrently; within a branch the eps continuation is sequential.
/// Per-eps failures are recorded and the sweep continues.
std::vector<JumpRecord> sweep(std::span<const double> omega,
                              std::span<const double> epsilons, int axis,
                              const SolveSetup& setup, const SweepOptions& opts = {});

/// Least-squares line over (log eps, log jump). Requires >= 3 usable records;
/// throws InvalidJumpError naming the offending epsilons if any jump <= 0.
PowerLawFit fit_power_law(std::span<const JumpRecord> records);

}  // namespace planecell::energy
