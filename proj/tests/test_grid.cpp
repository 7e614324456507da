#include <doctest.h>

#include <cmath>

#include "planecell/grid.hpp"
#include "test_support.hpp"

using namespace planecell;

namespace {

Field cosine_mode(const TorusSpec& spec, int axis, int q, double amplitude = 1.0,
                  double phase = 0.0) {
  Field f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = testsupport::node_of(spec, i);
    f[i] = amplitude * std::cos(kTwoPi * double(q) * x[std::size_t(axis)] / double(spec.N) + phase);
  }
  return f;
}

}  // namespace

TEST_CASE("torus validation") {
  CHECK_THROWS_AS((TorusSpec{0, 1, 8}.validate()), ConfigError);
  CHECK_THROWS_AS((TorusSpec{1, 1, 3}.validate()), ConfigError);  // not power of two
  CHECK_THROWS_AS((TorusSpec{1, 3, 8}.validate()), ConfigError);  // 8 % 3 != 0
  CHECK_THROWS_AS((TorusSpec{1, 1, 2}.validate()), ConfigError);  // too few samples
  CHECK_NOTHROW((TorusSpec{2, 16, 256}.validate()));
}

TEST_CASE("forward of a constant puts everything in the zero mode") {
  const TorusSpec spec{2, 2, 8};
  const SpectralField fh = forward(Field::constant(spec, 3.25));
  const int q0[2] = {0, 0};
  CHECK(std::abs(fh.coeff_at(q0) - std::complex<double>(3.25, 0.0)) < 1e-14);
  double off = 0.0;
  for (std::size_t i = 1; i < fh.size(); ++i) off = std::max(off, std::abs(fh[i]));
  CHECK(off < 1e-14);
}

TEST_CASE("single cosine lands on the +-1 modes with weight 1/2") {
  const TorusSpec spec{1, 4, 16};
  const SpectralField fh = forward(cosine_mode(spec, 0, 1));
  const int qp[1] = {1};
  const int qm[1] = {-1};
  CHECK(std::abs(fh.coeff_at(qp) - std::complex<double>(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(fh.coeff_at(qm) - std::complex<double>(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(fh.coeff_at(std::array<int, 1>{2})) < 1e-14);
}

TEST_CASE("forward matches a naive DFT") {
  const TorusSpec spec{1, 1, 16};
  const Field f = testsupport::random_field(spec, 7u);
  const SpectralField fh = forward(f);
  const auto ref = testsupport::naive_dft_1d(f);
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(std::abs(fh[i] - ref[i]) < 1e-13);
}

TEST_CASE("round trip is identity to 1e-12 relative") {
  for (int d : {1, 2, 3}) {
    const TorusSpec spec{d, 2, d == 3 ? 8 : 16};
    const Field f = testsupport::random_field(spec, 42u + unsigned(d));
    const Field back = inverse(forward(f));
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      worst = std::max(worst, std::abs(back[i] - f[i]));
    CHECK(worst < 1e-12 * std::max(1.0, f.linf()));
  }
}

TEST_CASE("laplacian eigenfunction") {
  const TorusSpec spec{2, 4, 32};
  const Field f = cosine_mode(spec, 0, 1);
  const Field lap = apply_operator({OperatorKind::laplacian, 1.0, 1.0, 1.0}, f);
  const double factor = -std::pow(kTwoPi / double(spec.N), 2);
  for (std::size_t i = 0; i < f.size(); i += 17)
    CHECK(lap[i] == doctest::Approx(factor * f[i]).epsilon(1e-12));
}

TEST_CASE("resolvent power fixes the zero mode") {
  const TorusSpec spec{2, 2, 8};
  const Field c = Field::constant(spec, 1.7);
  const Field out =
      apply_operator({OperatorKind::resolvent_power, 1.0, -0.9, 1.0}, c);
  for (std::size_t i = 0; i < out.size(); i += 5)
    CHECK(out[i] == doctest::Approx(1.7).epsilon(1e-13));
}

TEST_CASE("resolvent power rejects nonpositive gamma") {
  const TorusSpec spec{1, 1, 8};
  CHECK_THROWS_AS(
      apply_operator({OperatorKind::resolvent_power, 0.0, -0.5, 1.0},
                     Field::constant(spec, 1.0)),
      ConfigError);
}

TEST_CASE("fractional operator at delta = 1/2 on a single mode") {
  const TorusSpec spec{1, 4, 32};
  const Field f = cosine_mode(spec, 0, 1, 0.8);
  const Field out = apply_operator({OperatorKind::fractional, 1.0, 1.0, 0.5}, f);
  // symbol -(|xi|^2)^{1/2} = -(2 pi / N)
  const double factor = -kTwoPi / double(spec.N);
  for (std::size_t i = 0; i < f.size(); i += 7)
    CHECK(out[i] == doctest::Approx(factor * f[i]).epsilon(1e-12));
}

TEST_CASE("fractional symbol at delta = 1 equals the classical one bitwise") {
  const TorusSpec spec{2, 2, 16};
  SpectralField probe(spec);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double xi2 = probe.xi_squared_at(i);
    CHECK(operator_symbol({OperatorKind::fractional, 1.0, 1.0, 1.0}, xi2) ==
          operator_symbol({OperatorKind::laplacian, 1.0, 1.0, 1.0}, xi2));
  }
}

TEST_CASE("poisson solve sign and scale on a composite mode") {
  // g = sin(4 pi k.x), k = (2,3), N = 1  ->  phi = -sin(4 pi k.x)/(16 pi^2 |k|^2)
  const TorusSpec spec{2, 1, 32};
  const int k0 = 2, k1 = 3;
  Field g(spec);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = testsupport::node_of(spec, i);
    g[i] = std::sin(2.0 * kTwoPi * (k0 * x[0] + k1 * x[1]));
  }
  const Field phi = solve_poisson_zero_mean(g);
  const double scale = 16.0 * kPi * kPi * double(k0 * k0 + k1 * k1);
  for (std::size_t i = 0; i < g.size(); i += 13)
    CHECK(phi[i] == doctest::Approx(-g[i] / scale).epsilon(1e-11));
}

TEST_CASE("poisson of zero is zero, eigenfunction case is exact") {
  const TorusSpec spec{1, 4, 16};
  CHECK(solve_poisson_zero_mean(Field(spec)).linf() == 0.0);

  const Field g = cosine_mode(spec, 0, 1);
  const Field phi = solve_poisson_zero_mean(g);
  const double expected = -std::pow(double(spec.N) / kTwoPi, 2);
  for (std::size_t i = 0; i < g.size(); i += 3)
    CHECK(phi[i] == doctest::Approx(expected * g[i]).epsilon(1e-12));
}

TEST_CASE("poisson rejects a right-hand side with mean") {
  const TorusSpec spec{1, 1, 8};
  CHECK_THROWS_AS(solve_poisson_zero_mean(Field::constant(spec, 0.3)),
                  CompatibilityError);
}

TEST_CASE("poisson residual property") {
  const TorusSpec spec{2, 2, 32};
  Field g = testsupport::random_field(spec, 11u);
  g += -g.mean();
  const Field phi = solve_poisson_zero_mean(g);
  CHECK(std::abs(phi.mean()) < 1e-13);
  const Field lap = apply_operator({OperatorKind::laplacian, 1.0, 1.0, 1.0}, phi);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(lap[i] - g[i]));
  CHECK(worst <= 1e-10 * g.linf());
}

TEST_CASE("translate identity, full period, and additive integer") {
  const TorusSpec spec{2, 2, 8};
  const Field f = testsupport::random_field(spec, 3u);

  const int zero[2] = {0, 0};
  const Field same = translate(f, zero, 0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

  const int period[2] = {2, 0};  // k = N e_1
  const Field wrapped = translate(f, period, 0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(wrapped[i] == f[i]);

  const Field lifted = translate(f, zero, 1);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(lifted[i] == f[i] + 1.0);
}

TEST_CASE("translate by one unit shifts nodes exactly") {
  const TorusSpec spec{1, 2, 8};  // 4 nodes per unit
  Field f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(i);
  const int one[1] = {1};
  const Field shifted = translate(f, one, 0);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(shifted[i] == f[(i + 4) % f.size()]);
}

TEST_CASE("operator linearity") {
  const TorusSpec spec{2, 2, 16};
  const Field f = testsupport::random_field(spec, 21u);
  const Field g = testsupport::random_field(spec, 22u);
  for (OperatorSpec op : {OperatorSpec{OperatorKind::laplacian, 1.0, 1.0, 1.0},
                          OperatorSpec{OperatorKind::resolvent_power, 1.3, -0.7, 1.0},
                          OperatorSpec{OperatorKind::fractional, 1.0, 1.0, 0.5}}) {
    Field combo = f;
    combo *= 2.0;
    Field tmp = g;
    tmp *= -3.0;
    combo += tmp;
    const Field lhs = apply_operator(op, combo);
    Field rhs = apply_operator(op, f);
    rhs *= 2.0;
    Field rhs2 = apply_operator(op, g);
    rhs2 *= -3.0;
    rhs += rhs2;
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
      worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
    CHECK(worst < 1e-12 * std::max(1.0, lhs.linf()));
  }
}

TEST_CASE("operators are self-adjoint in the discrete L2 pairing") {
  const TorusSpec spec{2, 2, 16};
  const Field f = testsupport::random_field(spec, 31u);
  const Field g = testsupport::random_field(spec, 32u);
  for (OperatorSpec op : {OperatorSpec{OperatorKind::laplacian, 1.0, 1.0, 1.0},
                          OperatorSpec{OperatorKind::resolvent_power, 0.8, -0.9, 0.7},
                          OperatorSpec{OperatorKind::fractional, 1.0, 1.0, 0.3}}) {
    const double lhs = l2_inner(apply_operator(op, f), g);
    const double rhs = l2_inner(f, apply_operator(op, g));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("gradient of a plane wave and Nyquist handling") {
  const TorusSpec spec{1, 1, 16};
  const Field f = cosine_mode(spec, 0, 3, 1.0, 0.4);
  const auto grad = gradient(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = testsupport::node_of(spec, i);
    const double expect = -3.0 * kTwoPi * std::sin(3.0 * kTwoPi * x[0] + 0.4);
    CHECK(grad[0][i] == doctest::Approx(expect).epsilon(1e-11));
  }
  // Pure Nyquist mode has zero spectral odd derivative by convention.
  Field nyq(spec);
  for (std::size_t i = 0; i < nyq.size(); ++i) nyq[i] = (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(gradient(nyq)[0].linf() < 1e-12);
}

TEST_CASE("translate bounds and spectral index range are enforced") {
  const TorusSpec spec{1, 2, 8};
  const Field f = testsupport::random_field(spec, 9u);
  const int too_far[1] = {3};  // |k| > N
  CHECK_THROWS_AS(translate(f, too_far, 0), ConfigError);

  const SpectralField fh = forward(f);
  const int beyond[1] = {4};  // m/2 is outside {-m/2..m/2-1}
  CHECK_THROWS_AS(fh.coeff_at(beyond), ConfigError);
}

TEST_CASE("mean is the spectral zero mode") {
  const TorusSpec spec{2, 4, 16};
  const Field f = testsupport::random_field(spec, 5u);
  const SpectralField fh = forward(f);
  const int q0[2] = {0, 0};
  CHECK(std::abs(f.mean() - fh.coeff_at(q0).real()) < 1e-13);
}

TEST_CASE("three-dimensional poisson and gradient smoke") {
  const TorusSpec spec{3, 2, 8};
  Field g = testsupport::random_field(spec, 33u);
  g += -g.mean();
  const Field phi = solve_poisson_zero_mean(g);
  const Field lap = apply_operator({OperatorKind::laplacian, 1.0, 1.0, 1.0}, phi);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(lap[i] - g[i]));
  CHECK(worst <= 1e-10 * g.linf());
  CHECK(gradient(phi).size() == 3);
}
