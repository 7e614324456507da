#pragma once

// Quasi-implicit Sobolev-gradient descent in the frequency domain for the
// reduced cell problem
//
//     Delta z = eps * V_y(x, omega.x + z),      z  N-periodic.
//
// One step advances every mode by
//
//   zhat_{n+1}(q) = [zhat_n(q) - dt (g+|xi|^{2 delta})^{-beta} Fhat(q)]
//                 / [1 + dt (g+|xi|^{2 delta})^{1-beta}
//                      - g dt (g+|xi|^{2 delta})^{-beta}]
//
// with F = eps * V_y(x, omega.x + z_n); only the nonlinearity is explicit.

#include <string>
#include <vector>

#include "planecell/grid.hpp"
#include "planecell/potential.hpp"

namespace planecell::descent {

struct DescentParams {
  double beta = 0.9;          // metric exponent, (0, 1]
  double gamma = 1.0;         // metric shift, > 0
  double dt = 0.5;            // time step
  double delta = 1.0;         // fractional order, 1 = classical
  long max_iters = 200000;
  double tol_residual = 1e-9;  // on ||Delta z - eps V_y||_inf
  double tol_step = 1e-12;     // stall guard on ||z_{n+1}-z_n||_inf / dt

  void validate() const;
};

enum class StopReason { residual, step_stall, max_iters };

const char* to_string(StopReason r);

enum class TraceLevel { none, residual, full };  // full adds per-iteration energy

struct MinimizerSolution {
  Field z;
  std::vector<double> omega;
  double epsilon = 0.0;
  double residual_linf = 0.0;
  long iterations = 0;
  double energy = 0.0;  // per-unit-volume value of the reduced functional
  bool converged = false;
  StopReason stop_reason = StopReason::residual;
  std::vector<double> residual_trace;
  std::vector<double> energy_trace;  // filled under TraceLevel::full
};

/// Thrown when the iteration stops without meeting tol_residual; carries the
/// last iterate so callers may restart with a smaller dt.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& msg, MinimizerSolution last)
      : Error(msg), last_iterate(std::move(last)) {}
  MinimizerSolution last_iterate;
};

/// A single update of the scheme above.
Field descent_step(const Field& z, std::span<const double> omega, double epsilon,
                   const potential::PotentialSpec& spec, const DescentParams& p);

/// Iterates descent_step from z0 until the residual tolerance, the step
/// stall guard, or max_iters fires. Throws NonConvergenceError unless the
/// residual criterion was met.
MinimizerSolution solve(const TorusSpec& torus, std::span<const double> omega,
                        double epsilon, const potential::PotentialSpec& spec,
                        const DescentParams& p, const Field& z0,
                        TraceLevel trace = TraceLevel::none);

/// Convenience overload starting from the constant field z0 = alpha.
MinimizerSolution solve(const TorusSpec& torus, std::span<const double> omega,
                        double epsilon, const potential::PotentialSpec& spec,
                        const DescentParams& p, double z0_constant = 0.0,
                        TraceLevel trace = TraceLevel::none);

enum class BirkhoffClass { positive, negative, zero, mixed };

struct BirkhoffEntry {
  std::vector<int> k;
  int l = 0;
  BirkhoffClass cls = BirkhoffClass::zero;
  double min = 0.0;
  double max = 0.0;
};

struct BirkhoffReport {
  std::vector<BirkhoffEntry> entries;
  bool any_mixed = false;
};

/// Evaluates u(x+k) + l - u(x), u = omega.x + z, over all nodes for every
/// (k, l) with |k_i| <= range and |l| <= range. Entries whose values stay
/// within 1e-8 of zero are classed as identically zero.
BirkhoffReport check_birkhoff(const MinimizerSolution& sol, int range);

/// Per-mode amplification factors 1/denominator of the homogeneous scheme on
/// a given grid; their max/min spread quantifies stiffness.
std::vector<double> amplification_factors(const DescentParams& p, const TorusSpec& torus);

}  // namespace planecell::descent
