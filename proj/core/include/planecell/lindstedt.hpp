#pragma once

// Perturbation-series machinery: resonance functions Phi_j and their roots
// in alpha, order-by-order solution of Delta u_j = [V_y(x, u^{<j})]_{j-1}
// with solvability constants lambda^{(j)}, series evaluation, and Newton
// refinement to a true solution of the discrete cell problem.

#include <optional>
#include <vector>

#include "planecell/descent.hpp"
#include "planecell/grid.hpp"
#include "planecell/potential.hpp"

namespace planecell::lindstedt {

/// Truncated series u_0 + eps u_1 + ... + eps^{M-1} u_{M-1} with affine
/// u_0 = omega.x + alpha kept symbolically (it is not periodic) and
/// u_j = u_j* + lambda^{(j)}, mean(u_j*) = 0, for j >= 1.
struct SeriesField {
  TorusSpec torus;
  std::vector<double> omega;
  double alpha = 0.0;
  std::vector<Field> u_star;     // u_star[j-1] holds u_j*, mean zero
  std::vector<double> lambda;    // lambda[j-1] holds lambda^{(j)}
  bool final_lambda_fixed = false;  // whether lambda^{(M-1)} came from the
                                    // order-M compatibility condition

  int order() const { return int(u_star.size()) + 1; }  // M
  Field coefficient(int j) const;  // u_j = u_j* + lambda^{(j)}, j >= 1
};

struct ResonanceAnalysis {
  std::vector<double> omega;
  std::optional<int> resonance_order;  // j*, empty if none within probe depth
  std::vector<double> roots;           // alpha in [0,1) with Phi_{j*}(alpha)=0
  std::vector<double> twist_values;    // mean V_yy(x, u_0) at each root
  std::vector<double> phi_max_by_order;  // max |Phi_j| over the scan, diagnostics
};

/// The eps^{j-1} coefficient of V_y(x, u_0 + sum_{i>=1} eps^i u_i) via
/// truncated Taylor composition,
///   sum_{n >= 0} deriv_y(n+1, u_0)/n! * [W^n]_{j-1},
/// where W = sum_{i>=1} eps^i u_i. Requires u_1..u_{j-1} present.
Field series_coefficient_rhs(const SeriesField& series, int j,
                             const potential::PotentialSpec& spec);

/// Probes orders j = 1, 2, ... with alpha free. At each order the mean of
/// the right-hand side is affine in the newest constant lambda^{(j-1)} with
/// slope mean V_yy(x, u_0); when that slope is not identically zero the
/// order is solvable for every alpha and the probe continues. A resonance is
/// declared at the first order whose mean is alpha-dependent and cannot be
/// absorbed; its roots are bracketed on the scan grid and bisected to 1e-12.
ResonanceAnalysis analyze_resonance(const potential::PotentialSpec& spec,
                                    std::span<const double> omega,
                                    const TorusSpec& torus, int probe_depth = 4,
                                    int alpha_grid = 256);

/// Starting constant for a descent solve at this rotation vector: the
/// first-order-resonance root minimizing the order-eps energy, or 0 when no
/// resonance is found within the probe depth.
struct InitialConstant {
  double alpha = 0.0;
  std::optional<ResonanceAnalysis> analysis;
};
InitialConstant select_initial_constant(const potential::PotentialSpec& spec,
                                        std::span<const double> omega,
                                        const TorusSpec& torus, int probe_depth = 1,
                                        int alpha_grid = 256);

/// Builds u_1..u_{M-1} at a resonance root. lambda^{(j-1)} is fixed so that
/// mean(rhs_j) = 0, exploiting that the mean is affine in lambda (evaluated
/// at lambda = 0 and 1); lambda^{(M-1)} is set by the order-M condition when
/// the twist slope allows it, else 0 (recorded in final_lambda_fixed).
SeriesField build_series(const potential::PotentialSpec& spec,
                         std::span<const double> omega, const TorusSpec& torus,
                         double alpha, int M);

struct EvaluatedSeries {
  Field z;  // sum_{j>=1} eps^j u_j
  std::vector<double> omega;
  double alpha = 0.0;
};

/// Horner evaluation of the periodic part at a concrete eps.
EvaluatedSeries eval_series(const SeriesField& series, double epsilon);

/// ||Delta z - eps V_y(x, omega.x + alpha + z)||_inf of the truncated series;
/// scales as eps^M.
double series_residual(const SeriesField& series, double epsilon,
                       const potential::PotentialSpec& spec);

struct NewtonOptions {
  int max_iters = 20;
  double tol_residual = 1e-9;
  double gamma = 1.0;       // spectral preconditioner (gamma - Delta)^{-1}
  double cg_tol = 1e-12;    // relative tolerance of the inner solves
  int cg_max_iters = 2000;
};

/// Newton iteration U_{n+1} = U_n - L^{-1} F(U_n) with
/// L = -Delta + eps V_yy(x, U_n), each linear solve by preconditioned
/// conjugate gradients. Throws LinearSolveStallError with the smallest
/// Rayleigh quotient seen when an inner solve fails.
descent::MinimizerSolution newton_refine(const EvaluatedSeries& start,
                                         double epsilon,
                                         const potential::PotentialSpec& spec,
                                         const NewtonOptions& opts = {});

}  // namespace planecell::lindstedt
