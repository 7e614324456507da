#pragma once

// Analytic potentials V(x,y), periodic under integer translations in every
// argument, with closed-form y-derivatives of all orders. Every potential is
// stored as a finite sum of terms
//
//     amplitude * cos(2 pi p.x + phase_x) * cos(2 pi q y + phase_y)
//
// so that d^n/dy^n multiplies the amplitude by (2 pi q)^n and advances
// phase_y by n*pi/2.

#include <optional>
#include <string>
#include <vector>

#include "planecell/grid.hpp"

namespace planecell::potential {

struct TrigTerm {
  double amplitude = 1.0;
  std::vector<int> p;      // integer x wave vector, size d
  double phase_x = 0.0;
  int q = 1;               // integer y harmonic
  double phase_y = 0.0;
};

enum class Kind { product_cos, separable, mixed, custom_trig };

struct PotentialSpec {
  Kind kind = Kind::product_cos;
  std::vector<int> k;       // built-in wave vector
  double amplitude = 1.0;
  std::vector<TrigTerm> terms;  // used by custom_trig only

  /// Built-ins:
  ///   product_cos: A sin(2 pi k.x) cos(2 pi y)
  ///   separable:   A sin(2 pi k1 x1) sin(2 pi k2 x2) cos(2 pi y)   (d = 2)
  ///   mixed:       (A/2) sin(2 pi k.x) (cos(2 pi y) + sin(2 pi y))
  static PotentialSpec product_cos(std::vector<int> k, double amplitude = 1.0);
  static PotentialSpec separable(std::vector<int> k, double amplitude = 1.0);
  static PotentialSpec mixed(std::vector<int> k, double amplitude = 1.0);
  static PotentialSpec custom(std::vector<TrigTerm> terms);
};

/// The potential expanded into canonical cos*cos terms for dimension d.
std::vector<TrigTerm> expanded_terms(const PotentialSpec& spec, int d);

/// y(x) = omega.x + alpha + perturbation(x). N*omega must be integer
/// componentwise so compositions with the built-ins stay N-periodic.
struct ComposedArgument {
  std::vector<double> omega;
  double alpha = 0.0;
  std::optional<Field> perturbation;
};

void require_commensurate(std::span<const double> omega, int N);

/// Precomputes the x-dependent factor of every term on a fixed grid; the
/// descent loop re-evaluates only the y-dependent cosine each iteration.
class Evaluator {
 public:
  Evaluator(const PotentialSpec& spec, const TorusSpec& torus);

  /// Samples d^n V / dy^n (x, y(x)) given nodal values of y.
  Field deriv(int n, std::span<const double> y_nodes) const;

  const TorusSpec& torus() const { return torus_; }

  /// Nodal values of omega.x + alpha (+ perturbation).
  std::vector<double> compose_argument(const ComposedArgument& arg) const;

 private:
  TorusSpec torus_;
  struct CachedTerm {
    double amplitude;
    int q;
    double phase_y;
    std::vector<double> x_factor;  // cos(2 pi p.x + phase_x) at all nodes
  };
  std::vector<CachedTerm> terms_;
};

/// Samples d^n V / dy^n (x, y(x)) over the grid. n <= 12.
Field deriv_y(const PotentialSpec& spec, int n, const ComposedArgument& arg,
              const TorusSpec& torus);

/// Node average of deriv_y: the per-unit-volume integral of
/// d^n V / dy^n (x, y(x)) over the torus.
double mean_deriv_y(const PotentialSpec& spec, int n, const ComposedArgument& arg,
                    const TorusSpec& torus);

}  // namespace planecell::potential
