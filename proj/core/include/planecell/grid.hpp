#pragma once

// Periodic scalar fields on the torus [0,N]^d with forward/inverse discrete
// Fourier transforms, diagonal spectral operators, mean-zero Poisson solves
// and exact integer-node translates.
//
// Conventions (pinned once, used everywhere):
//   * frequency multi-index q has components in {-m/2, ..., m/2-1},
//   * wavenumber xi(q) = 2*pi*q/N componentwise,
//   * forward() is normalized so that coeffs(0) = mean(f),
//   * the Nyquist row of odd derivatives (gradients) is zeroed.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "planecell/errors.hpp"
#include "planecell/numeric.hpp"

namespace planecell {

struct TorusSpec {
  int d = 1;  // spatial dimension, 1..3
  int N = 1;  // integer cell period; torus is [0,N]^d
  int m = 4;  // samples per dimension: power of two, m >= 4, divisible by N

  std::size_t node_count() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= std::size_t(m);
    return n;
  }
  double spacing() const { return double(N) / double(m); }

  /// Throws ConfigError unless d in 1..3, N >= 1, m a power of two >= 4
  /// divisible by N (so integer translates align with grid nodes).
  void validate() const;

  bool operator==(const TorusSpec&) const = default;
};

class Field {
 public:
  Field() = default;
  explicit Field(const TorusSpec& spec, double fill = 0.0)
      : spec_(spec), values_(spec.node_count(), fill) {}
  Field(const TorusSpec& spec, std::vector<double> values);

  static Field constant(const TorusSpec& spec, double c) { return Field(spec, c); }

  const TorusSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double mean() const { return compensated_sum(values_) / double(values_.size()); }
  double linf() const { return linf_norm(values_); }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);
  Field& operator+=(double c);

 private:
  TorusSpec spec_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);
Field pointwise_product(const Field& a, const Field& b);

class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const TorusSpec& spec)
      : spec_(spec), coeffs_(spec.node_count(), {0.0, 0.0}) {}

  const TorusSpec& spec() const { return spec_; }
  std::size_t size() const { return coeffs_.size(); }
  std::complex<double> operator[](std::size_t i) const { return coeffs_[i]; }
  std::complex<double>& operator[](std::size_t i) { return coeffs_[i]; }
  std::span<const std::complex<double>> coeffs() const { return coeffs_; }
  std::span<std::complex<double>> coeffs() { return coeffs_; }

  /// Coefficient addressed by integer frequency multi-index q,
  /// components in {-m/2, ..., m/2-1}.
  std::complex<double> coeff_at(std::span<const int> q) const;

  /// Decomposes a flat storage index into the frequency multi-index.
  std::array<int, 3> freq_at(std::size_t flat) const;

  /// |xi(q)|^2 = sum_i (2 pi q_i / N)^2 at a flat storage index.
  double xi_squared_at(std::size_t flat) const;

 private:
  TorusSpec spec_;
  std::vector<std::complex<double>> coeffs_;
};

/// Forward transform, coeffs(0) = mean(f). inverse(forward(f)) == f to
/// machine precision.
SpectralField forward(const Field& f);

/// Inverse transform; imaginary residue of a conjugate-symmetric spectrum
/// (below roundoff) is discarded.
Field inverse(const SpectralField& fh);

enum class OperatorKind { laplacian, resolvent_power, fractional };

/// Diagonal spectral operator. Symbols:
///   laplacian        -> -|xi|^2
///   fractional       -> -(|xi|^2)^delta          (delta = 1 is classical)
///   resolvent_power  -> (gamma + (|xi|^2)^delta)^power
struct OperatorSpec {
  OperatorKind kind = OperatorKind::laplacian;
  double gamma = 1.0;
  double power = 1.0;
  double delta = 1.0;

  void validate() const;  // rejects gamma <= 0 for resolvent_power, delta outside (0,1]
};

/// The scalar symbol evaluated at |xi|^2. delta = 1 bypasses pow() so the
/// fractional path is bit-identical to the classical one.
double operator_symbol(const OperatorSpec& op, double xi_squared);

Field apply_operator(const OperatorSpec& op, const Field& f);
SpectralField apply_operator(const OperatorSpec& op, const SpectralField& fh);

/// Solves Delta(phi) = g - mean(g) with mean(phi) = 0 by spectral division.
/// tol_mean < 0 selects the default 1e-10 * linf(g). Throws
/// CompatibilityError if |mean(g)| exceeds the tolerance.
Field solve_poisson_zero_mean(const Field& g, double tol_mean = -1.0);

/// x -> f(x + k) + l using exact node shifts (m divisible by N guarantees
/// alignment). Components of k must lie within [-N, N].
Field translate(const Field& f, std::span<const int> k, int l);

/// All d partial derivatives, spectral, Nyquist row zeroed.
std::vector<Field> gradient(const Field& f);

/// Discrete L2 pairing <f, g> = h^d * sum_j f_j g_j.
double l2_inner(const Field& a, const Field& b);

}  // namespace planecell
