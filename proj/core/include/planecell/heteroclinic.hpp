#pragma once

// Asymptotic heteroclinic construction for the first-order resonance of the
// product_cos potential at omega = k: the transition profile
//
//     alpha(s) = (1/pi) arctan(sinh(sqrt(2) pi s)) + 3/4,
//
// which solves alpha'' = -pi cos(2 pi alpha) and connects 1/4 to 5/4, the
// composed approximations M (periodic minimizer) and H (heteroclinic), and
// strip quadrature of the one-sided derivative formula for A_eps.

#include <vector>

#include "planecell/grid.hpp"
#include "planecell/lindstedt.hpp"
#include "planecell/potential.hpp"

namespace planecell::heteroclinic {

/// The transition profile evaluated on the universal layer variable s.
double profile_alpha(double s);
double profile_alpha_prime(double s);  // sqrt(2) sech(sqrt(2) pi s)

struct HeteroclinicProfile {
  double epsilon = 0.0;
  int axis = 0;
  int sign = 1;  // eta = sign * e_axis
  double L = 10.0;
  std::vector<double> s;
  std::vector<double> alpha;
  double alpha_minus = 0.0;  // limit as s -> -inf, 1/4
  double alpha_plus = 0.0;   // limit as s -> +inf, 5/4
  double ode_residual_linf = 0.0;
};

/// Samples the closed form over s in [-L, L] and records the asymptotics and
/// the residual of alpha'' + pi cos(2 pi alpha), measured with high-order
/// finite differences (closed-form ghost values, no boundary loss).
HeteroclinicProfile build_profile(double epsilon, int axis, int sign,
                                  double L = 10.0, int n_s = 4096);

/// Adaptive quadrature of 2 eps sech^2(sqrt(2 eps) pi x) over a truncated
/// line; equals (2 sqrt(2)/pi) sqrt(eps).
double kinetic_jump_integral(double epsilon, double rel_tol = 1e-11);

/// The closed forms the quadratures are matched against.
double closed_form_kinetic(double epsilon);   // (2 sqrt(2)/pi) sqrt(eps)
double analytic_jump(double epsilon);         // (4 sqrt(2)/pi) sqrt(eps)

struct DaeOptions {
  double strip_factor = 10.0;  // L_x = strip_factor / sqrt(2 eps)
  int panels = 64;             // composite Gauss-Legendre panels, longitudinal
  int gl_order = 10;
  int n_transverse = 64;       // rectangle-rule points per transverse axis
  double tail_tol = 1e-8;
  int eta_sign = 1;            // differentiation direction eta = eta_sign * e_axis
};

struct JumpQuadrature {
  double dplus = 0.0;   // excess energy of the heteroclinic in direction +eta
  double dminus = 0.0;  // and in direction -eta
  double jump = 0.0;    // dplus + dminus
  // Diagnostics: the decomposition of the integrand.
  double kinetic_sech2 = 0.0;    // per-direction sech^2 contribution
  double potential_plus = 0.0;   // per-direction potential-difference parts
  double potential_minus = 0.0;
  double cross_plus = 0.0;       // +-(omega_j / cosh) cross terms; cancel in jump
  double cross_minus = 0.0;
  double tail_value = 0.0;       // transverse-averaged integrand at the strip ends
};

/// Integrates E(H) - E(M) over the strip [0,1]^{d-1} x [-L_x, L_x] for both
/// directions, where E(u) = |grad u|^2/2 + eps V(x,u),
///   M = omega.x + alpha0 + eps u_1,
///   H = omega.x + alpha_profile(sqrt(eps) sigma x_j) + eps u_1,
/// with u_1 the series first-order coefficient in closed form. Hard-wired to
/// the product_cos family at omega = k, minimizing root alpha0 = 1/4.
/// Throws TailError when the integrand has not decayed at the strip ends.
JumpQuadrature dae_quadrature(double epsilon, int axis,
                              const potential::PotentialSpec& spec,
                              const lindstedt::SeriesField& series,
                              const DaeOptions& opts = {});

}  // namespace planecell::heteroclinic
