#include <doctest.h>

#include <cmath>

#include "planecell/descent.hpp"
#include "planecell/lindstedt.hpp"
#include "test_support.hpp"

using namespace planecell;
using lindstedt::SeriesField;
using potential::PotentialSpec;

namespace {

SeriesField series_shell(const TorusSpec& torus, std::vector<double> omega,
                         double alpha) {
  SeriesField s;
  s.torus = torus;
  s.omega = std::move(omega);
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST_CASE("rhs order 1 is V_y at the affine argument") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const auto s = series_shell(torus, {2.0, 3.0}, 0.25);
  const Field rhs = lindstedt::series_coefficient_rhs(s, 1, spec);
  const Field vy = potential::deriv_y(spec, 1, {{2.0, 3.0}, 0.25, std::nullopt}, torus);
  for (std::size_t i = 0; i < rhs.size(); ++i)
    CHECK(rhs[i] == doctest::Approx(vy[i]).epsilon(1e-13));
}

TEST_CASE("rhs orders 2 and 3 match the composition formulas") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 2});
  auto s = series_shell(torus, {1.0, 2.0}, 0.25);
  s.u_star.push_back(testsupport::random_field(torus, 91u, 0.3));
  s.u_star.push_back(testsupport::random_field(torus, 92u, 0.2));
  s.lambda = {0.07, -0.02};

  const potential::ComposedArgument u0{{1.0, 2.0}, 0.25, std::nullopt};
  const Field vyy = potential::deriv_y(spec, 2, u0, torus);
  const Field vyyy = potential::deriv_y(spec, 3, u0, torus);
  const Field u1 = s.coefficient(1);
  const Field u2 = s.coefficient(2);

  const Field rhs2 = lindstedt::series_coefficient_rhs(s, 2, spec);
  for (std::size_t i = 0; i < rhs2.size(); ++i)
    CHECK(rhs2[i] == doctest::Approx(vyy[i] * u1[i]).epsilon(1e-12));

  const Field rhs3 = lindstedt::series_coefficient_rhs(s, 3, spec);
  for (std::size_t i = 0; i < rhs3.size(); ++i) {
    const double expect = vyy[i] * u2[i] + 0.5 * vyyy[i] * u1[i] * u1[i];
    CHECK(rhs3[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("product_cos at omega = k is a first-order resonance with roots 1/4, 3/4") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const auto analysis =
      lindstedt::analyze_resonance(spec, std::array<double, 2>{2.0, 3.0}, torus);
  REQUIRE(analysis.resonance_order.has_value());
  CHECK(*analysis.resonance_order == 1);
  REQUIRE(analysis.roots.size() == 2);
  CHECK(std::abs(analysis.roots[0] - 0.25) < 1e-9);
  CHECK(std::abs(analysis.roots[1] - 0.75) < 1e-9);
  REQUIRE(analysis.twist_values.size() == 2);
  CHECK(analysis.twist_values[0] == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-9));
  CHECK(analysis.twist_values[1] == doctest::Approx(-2.0 * kPi * kPi).epsilon(1e-9));
}

TEST_CASE("no resonance within depth for a non-matching rotation vector") {
  const TorusSpec torus{2, 1, 64};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const auto analysis = lindstedt::analyze_resonance(
      spec, std::array<double, 2>{1.0, 0.0}, torus, 4, 64);
  CHECK(!analysis.resonance_order.has_value());
  CHECK(analysis.roots.empty());
  for (double phi : analysis.phi_max_by_order) CHECK(phi <= 1e-10);
}

TEST_CASE("degenerate twist at a root is reported") {
  // V = sin(2 pi k.x) cos(2 pi y) + (1/4) sin(4 pi k.x) cos(4 pi y + pi/2):
  // alpha = 1/4 stays a root of Phi_1 while the twist integral cancels.
  const TorusSpec torus{2, 1, 32};
  potential::TrigTerm t1{1.0, {1, 1}, -kPi / 2.0, 1, 0.0};
  potential::TrigTerm t2{0.25, {2, 2}, -kPi / 2.0, 2, kPi / 2.0};
  const auto spec = PotentialSpec::custom({t1, t2});
  CHECK_THROWS_AS(
      lindstedt::analyze_resonance(spec, std::array<double, 2>{1.0, 1.0}, torus),
      DegenerateTwistError);
}

TEST_CASE("a sign change hidden from the scan grid raises NoRootError") {
  // Single harmonic q = 8 aliases to a constant on an 8-point alpha grid:
  // every sample sees the same sign even though Phi_1 has zero mean.
  const TorusSpec torus{2, 1, 64};
  potential::TrigTerm t{1.0, {8, 8}, -kPi / 2.0, 8, 0.0};
  const auto spec = PotentialSpec::custom({t});
  CHECK_THROWS_AS(lindstedt::analyze_resonance(spec, std::array<double, 2>{1.0, 1.0},
                                               torus, 1, 8),
                  NoRootError);
  // A fine grid resolves the oscillation and finds roots.
  const auto analysis = lindstedt::analyze_resonance(
      spec, std::array<double, 2>{1.0, 1.0}, torus, 1, 256);
  CHECK(analysis.resonance_order.has_value());
  CHECK(!analysis.roots.empty());
}

TEST_CASE("series M = 2 reproduces the closed-form first-order terms") {
  const TorusSpec torus{2, 1, 64};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const std::vector<double> omega{2.0, 3.0};
  const double k2 = 13.0;

  const auto minimizing = lindstedt::build_series(spec, omega, torus, 0.25, 2);
  REQUIRE(minimizing.u_star.size() == 1);
  CHECK(std::abs(minimizing.u_star[0].mean()) < 1e-12);
  CHECK(std::abs(minimizing.lambda[0]) < 1e-10);  // lambda^{(1)} vanishes here
  CHECK(minimizing.final_lambda_fixed);

  const auto critical = lindstedt::build_series(spec, omega, torus, 0.75, 2);
  for (std::size_t i = 0; i < minimizing.u_star[0].size(); ++i) {
    const auto x = testsupport::node_of(torus, i);
    const double kx = 2.0 * x[0] + 3.0 * x[1];
    const double expect = std::sin(2.0 * kTwoPi * kx) / (16.0 * kPi * k2);
    CHECK(minimizing.u_star[0][i] == doctest::Approx(expect).epsilon(1e-10));
    // Branch symmetry: the 3/4 branch negates the sin coefficient.
    CHECK(critical.u_star[0][i] == doctest::Approx(-expect).epsilon(1e-10));
  }
}

TEST_CASE("all series coefficients are mean zero") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 2});
  const auto series =
      lindstedt::build_series(spec, std::vector<double>{1.0, 2.0}, torus, 0.25, 5);
  REQUIRE(series.u_star.size() == 4);
  for (const Field& u : series.u_star) CHECK(std::abs(u.mean()) < 1e-11);
}

TEST_CASE("build_series away from a root is rejected") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 2});
  CHECK_THROWS_AS(
      lindstedt::build_series(spec, std::vector<double>{1.0, 2.0}, torus, 0.1, 2),
      CompatibilityError);
}

TEST_CASE("the order mean is affine in the newest lambda with the twist slope") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 2});
  auto series =
      lindstedt::build_series(spec, std::vector<double>{1.0, 2.0}, torus, 0.25, 2);

  std::array<double, 3> lambdas{0.0, 0.5, 1.0};
  std::array<double, 3> means{};
  for (std::size_t i = 0; i < 3; ++i) {
    series.lambda[0] = lambdas[i];
    means[i] = lindstedt::series_coefficient_rhs(series, 2, spec).mean();
  }
  // Collinear: the mid point sits on the chord.
  CHECK(std::abs(means[1] - 0.5 * (means[0] + means[2])) < 1e-10);
  const double slope = means[2] - means[0];
  const double twist = potential::mean_deriv_y(
      spec, 2, {{1.0, 2.0}, 0.25, std::nullopt}, torus);
  CHECK(slope == doctest::Approx(twist).epsilon(1e-9));
}

TEST_CASE("eval_series at eps = 0 and at a single term") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 2});
  const auto series =
      lindstedt::build_series(spec, std::vector<double>{1.0, 2.0}, torus, 0.25, 2);

  const auto at_zero = lindstedt::eval_series(series, 0.0);
  CHECK(at_zero.z.linf() == 0.0);
  CHECK(at_zero.alpha == 0.25);

  const double eps = 1e-3;
  const auto ev = lindstedt::eval_series(series, eps);
  const Field u1 = series.coefficient(1);
  for (std::size_t i = 0; i < ev.z.size(); i += 7)
    CHECK(ev.z[i] == doctest::Approx(eps * u1[i]).epsilon(1e-13));
}

TEST_CASE("series residual scales like eps^M") {
  const TorusSpec torus{2, 1, 64};
  const auto spec = PotentialSpec::product_cos({1, 1});
  const std::vector<double> omega{1.0, 1.0};

  for (int M : {2, 3, 4}) {
    const auto series = lindstedt::build_series(spec, omega, torus, 0.25, M);
    std::vector<double> log_eps, log_res;
    for (double eps : {0.04, 0.02, 0.01, 0.005, 0.0025}) {
      const double r = lindstedt::series_residual(series, eps, spec);
      log_eps.push_back(std::log(eps));
      log_res.push_back(std::log(r));
    }
    const LineFit fit = fit_line(log_eps, log_res);
    CHECK(fit.slope == doctest::Approx(double(M)).epsilon(0.2 / double(M)));

    // Halving eps divides the residual by ~2^M.
    const double r1 = lindstedt::series_residual(series, 0.01, spec);
    const double r2 = lindstedt::series_residual(series, 0.005, spec);
    CHECK(r1 / r2 == doctest::Approx(std::pow(2.0, M)).epsilon(0.3));
  }
}

TEST_CASE("newton from an exact solution makes no correction") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 2});
  const auto sol = descent::solve(torus, std::array<double, 2>{1.0, 2.0}, 0.01,
                                  spec, descent::DescentParams{}, 0.25);
  lindstedt::EvaluatedSeries start;
  start.z = sol.z;
  start.omega = sol.omega;
  start.alpha = 0.0;
  const auto refined = lindstedt::newton_refine(start, 0.01, spec);
  CHECK(refined.converged);
  CHECK(refined.iterations == 0);
  double diff = 0.0;
  for (std::size_t i = 0; i < refined.z.size(); ++i)
    diff = std::max(diff, std::abs(refined.z[i] - sol.z[i]));
  CHECK(diff == 0.0);
}

TEST_CASE("newton converges quadratically from the truncated series") {
  // M = 2 at a sizable eps leaves a visible gap between the starting
  // residual and the roundoff floor, so the contraction rate is measurable.
  const TorusSpec torus{2, 1, 64};
  const auto spec = PotentialSpec::product_cos({1, 1});
  const std::vector<double> omega{1.0, 1.0};
  const auto series = lindstedt::build_series(spec, omega, torus, 0.25, 2);
  const double eps = 0.1;

  lindstedt::NewtonOptions opts;
  opts.tol_residual = 1e-11;  // stay above the roundoff floor of this grid
  const auto refined =
      lindstedt::newton_refine(lindstedt::eval_series(series, eps), eps, spec, opts);
  REQUIRE(refined.residual_trace.size() >= 2);
  const double r0 = refined.residual_trace[0];
  const double r1 = refined.residual_trace[1];
  CHECK(r1 <= 100.0 * r0 * r0);  // one step lands near the roundoff floor
  CHECK(r1 <= 0.05 * r0);
  // Monotone decay down to the tolerance.
  for (std::size_t i = 0; i + 1 < refined.residual_trace.size(); ++i)
    CHECK(refined.residual_trace[i + 1] <= refined.residual_trace[i]);
  // Birkhoff class of the refined solution is clean.
  CHECK(!descent::check_birkhoff(refined, 2).any_mixed);
}

TEST_CASE("newton and descent agree after mean alignment") {
  const TorusSpec torus{2, 1, 64};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const std::vector<double> omega{2.0, 3.0};
  const double eps = 1e-2;

  const auto series = lindstedt::build_series(spec, omega, torus, 0.25, 3);
  const auto newton =
      lindstedt::newton_refine(lindstedt::eval_series(series, eps), eps, spec);
  REQUIRE(newton.converged);
  const auto grad =
      descent::solve(torus, omega, eps, spec, descent::DescentParams{}, 0.25);

  const double shift = grad.z.mean() - newton.z.mean();
  double diff = 0.0;
  for (std::size_t i = 0; i < grad.z.size(); ++i)
    diff = std::max(diff, std::abs(grad.z[i] - newton.z[i] - shift));
  CHECK(diff < 1e-7);
}

TEST_CASE("newton on the saddle branch stalls with a negative Ritz estimate") {
  // The 3/4 branch has mean V_yy < 0: the linearization carries a negative
  // eigenvalue of size ~ 2 pi^2 eps on the constant mode, and conjugate
  // gradients must refuse it.
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 1});
  const auto series =
      lindstedt::build_series(spec, std::vector<double>{1.0, 1.0}, torus, 0.75, 2);
  lindstedt::NewtonOptions opts;
  opts.tol_residual = 1e-12;
  try {
    lindstedt::newton_refine(lindstedt::eval_series(series, 0.1), 0.1, spec, opts);
    FAIL("expected LinearSolveStallError");
  } catch (const LinearSolveStallError& e) {
    CHECK(e.min_ritz_estimate < 0.0);
    CHECK(e.min_ritz_estimate > -2.0 * kPi * kPi * 0.1 - 1.0);
  }
}

TEST_CASE("an exhausted inner solve reports the stall too") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({1, 1});
  const auto series =
      lindstedt::build_series(spec, std::vector<double>{1.0, 1.0}, torus, 0.25, 2);
  lindstedt::NewtonOptions opts;
  opts.cg_max_iters = 1;
  CHECK_THROWS_AS(
      lindstedt::newton_refine(lindstedt::eval_series(series, 0.1), 0.1, spec, opts),
      LinearSolveStallError);
}

TEST_CASE("derivative orders beyond the truncation bound are rejected") {
  const TorusSpec torus{2, 1, 16};
  const auto spec = PotentialSpec::product_cos({1, 1});
  CHECK_THROWS_AS(
      potential::deriv_y(spec, 13, {{1.0, 1.0}, 0.0, std::nullopt}, torus),
      ConfigError);
}

TEST_CASE("initial constant picks the minimizing root") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const auto pick = lindstedt::select_initial_constant(
      spec, std::array<double, 2>{2.0, 3.0}, torus);
  CHECK(std::abs(pick.alpha - 0.25) < 1e-9);

  const auto off = lindstedt::select_initial_constant(
      spec, std::array<double, 2>{1.0, 0.0}, torus);
  CHECK(off.alpha == 0.0);
}
