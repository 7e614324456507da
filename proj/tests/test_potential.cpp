#include <doctest.h>

#include <cmath>

#include "planecell/potential.hpp"
#include "test_support.hpp"

using namespace planecell;
using potential::ComposedArgument;
using potential::PotentialSpec;

TEST_CASE("product_cos V_y matches the closed form at omega = k") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const double alpha = 0.37;
  const ComposedArgument arg{{2.0, 3.0}, alpha, std::nullopt};

  const Field vy = potential::deriv_y(spec, 1, arg, torus);
  for (std::size_t i = 0; i < vy.size(); ++i) {
    const auto x = testsupport::node_of(torus, i);
    const double kx = 2.0 * x[0] + 3.0 * x[1];
    const double expect =
        -kTwoPi * std::sin(kTwoPi * kx) * std::sin(kTwoPi * (kx + alpha));
    CHECK(vy[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("order zero is V itself") {
  const TorusSpec torus{2, 1, 16};
  const auto spec = PotentialSpec::mixed({1, 1}, 2.0);
  const ComposedArgument arg{{0.0, 0.0}, 0.11, std::nullopt};
  const Field v = potential::deriv_y(spec, 0, arg, torus);
  for (std::size_t i = 0; i < v.size(); i += 5) {
    const auto x = testsupport::node_of(torus, i);
    const double expect = std::sin(kTwoPi * (x[0] + x[1])) *
                          (std::cos(kTwoPi * 0.11) + std::sin(kTwoPi * 0.11));
    CHECK(v[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("mean V_y of product_cos at omega = k is -pi cos(2 pi alpha)") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  for (double alpha : {0.0, 0.1, 0.25, 0.62}) {
    const double mean =
        potential::mean_deriv_y(spec, 1, {{2.0, 3.0}, alpha, std::nullopt}, torus);
    CHECK(mean == doctest::Approx(-kPi * std::cos(kTwoPi * alpha)).epsilon(1e-10));
  }
}

TEST_CASE("mean V_y vanishes off resonance") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const double mean =
      potential::mean_deriv_y(spec, 1, {{0.0, 0.0}, 0.3, std::nullopt}, torus);
  CHECK(std::abs(mean) < 1e-13);
}

TEST_CASE("twist integral at the minimizing root, against brute-force quadrature") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::product_cos({2, 3});
  const ComposedArgument arg{{2.0, 3.0}, 0.25, std::nullopt};
  const double mean = potential::mean_deriv_y(spec, 2, arg, torus);

  // V_yy(x, k.x + 1/4) = 4 pi^2 sin^2(2 pi k.x); mean 2 pi^2. Nonzero: the
  // twist condition holds on this branch.
  CHECK(mean == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-10));

  // Independent oracle: centered finite differences of direct V samples.
  CompensatedSum acc;
  for (std::size_t i = 0; i < torus.node_count(); ++i) {
    const auto x = testsupport::node_of(torus, i);
    const double y = 2.0 * x[0] + 3.0 * x[1] + 0.25;
    acc.add(testsupport::fd_deriv_y_at(spec, torus, 2, x, y, 1e-4));
  }
  const double oracle = acc.value() / double(torus.node_count());
  CHECK(mean == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("derivative consistency against finite differences in y") {
  const TorusSpec torus{2, 1, 16};
  const std::vector<PotentialSpec> specs = {
      PotentialSpec::product_cos({2, 3}),
      PotentialSpec::separable({2, 1}),
      PotentialSpec::mixed({2, 1}),
  };
  for (const auto& spec : specs) {
    for (int n = 1; n <= 4; ++n) {
      const Field dn = potential::deriv_y(spec, n, {{1.0, 0.0}, 0.21, std::nullopt}, torus);
      const Field dn1_up = potential::deriv_y(
          spec, n - 1, {{1.0, 0.0}, 0.21 + 1e-5, std::nullopt}, torus);
      const Field dn1_dn = potential::deriv_y(
          spec, n - 1, {{1.0, 0.0}, 0.21 - 1e-5, std::nullopt}, torus);
      double worst = 0.0;
      for (std::size_t i = 0; i < dn.size(); ++i) {
        const double fd = (dn1_up[i] - dn1_dn[i]) / 2e-5;
        worst = std::max(worst, std::abs(fd - dn[i]));
      }
      CHECK(worst <= 1e-7 * std::max(1.0, dn.linf()));
    }
  }
}

TEST_CASE("sampled derivatives are invariant under full-period node shifts") {
  const TorusSpec torus{2, 2, 16};
  const auto spec = PotentialSpec::product_cos({1, 2});
  const Field vy =
      potential::deriv_y(spec, 1, {{0.5, 1.0}, 0.4, std::nullopt}, torus);
  const int shift[2] = {2, 0};  // N e_1
  const Field moved = translate(vy, shift, 0);
  for (std::size_t i = 0; i < vy.size(); ++i) CHECK(moved[i] == vy[i]);
}

TEST_CASE("Phi_1 integrates to zero over a period in alpha") {
  const TorusSpec torus{2, 1, 32};
  const auto spec = PotentialSpec::separable({2, 1});
  CompensatedSum acc;
  const int samples = 256;
  for (int i = 0; i < samples; ++i) {
    const double alpha = double(i) / double(samples);
    acc.add(potential::mean_deriv_y(spec, 1, {{2.0, 1.0}, alpha, std::nullopt}, torus));
  }
  CHECK(std::abs(acc.value() / double(samples)) < 1e-10);
}

TEST_CASE("custom_trig reproduces product_cos") {
  const TorusSpec torus{2, 1, 16};
  const auto builtin = PotentialSpec::product_cos({2, 3}, 1.3);
  potential::TrigTerm term;  // sin(2 pi k.x) cos(2 pi y), amplitude 1.3
  term.amplitude = 1.3;
  term.p = {2, 3};
  term.phase_x = -kPi / 2.0;
  term.q = 1;
  term.phase_y = 0.0;
  const auto custom = PotentialSpec::custom({term});

  const ComposedArgument arg{{1.0, 1.0}, 0.77, std::nullopt};
  for (int n : {0, 1, 3}) {
    const Field a = potential::deriv_y(builtin, n, arg, torus);
    const Field b = potential::deriv_y(custom, n, arg, torus);
    for (std::size_t i = 0; i < a.size(); i += 3)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
  }
}

TEST_CASE("composition with a perturbation field") {
  const TorusSpec torus{1, 1, 16};
  const auto spec = PotentialSpec::product_cos({1});
  Field pert(torus);
  for (std::size_t i = 0; i < pert.size(); ++i)
    pert[i] = 0.01 * std::sin(kTwoPi * double(i) / double(torus.m));
  const Field v = potential::deriv_y(spec, 0, {{1.0}, 0.2, pert}, torus);
  for (std::size_t i = 0; i < v.size(); i += 3) {
    const auto x = testsupport::node_of(torus, i);
    const double y = x[0] + 0.2 + pert[i];
    CHECK(v[i] ==
          doctest::Approx(std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * y)).epsilon(1e-12));
  }
}

TEST_CASE("incommensurate rotation vectors are rejected") {
  const TorusSpec torus{2, 2, 8};
  const auto spec = PotentialSpec::product_cos({1, 1});
  CHECK_THROWS_AS(
      potential::deriv_y(spec, 0, {{0.333, 0.0}, 0.0, std::nullopt}, torus),
      ConfigError);
  CHECK_NOTHROW(
      potential::deriv_y(spec, 0, {{0.5, 1.5}, 0.0, std::nullopt}, torus));
}

TEST_CASE("built-in potentials are periodic in x and y by sampling") {
  const TorusSpec torus{2, 1, 16};
  for (const auto& spec :
       {PotentialSpec::product_cos({2, 3}), PotentialSpec::separable({2, 1}),
        PotentialSpec::mixed({1, 2})}) {
    const auto terms = potential::expanded_terms(spec, 2);
    auto eval = [&](const std::vector<double>& xx, double yy) {
      double acc = 0.0;
      for (const auto& t : terms) {
        double dot = 0.0;
        for (int ax = 0; ax < 2; ++ax) dot += t.p[std::size_t(ax)] * xx[std::size_t(ax)];
        acc += t.amplitude * std::cos(kTwoPi * dot + t.phase_x) *
               std::cos(kTwoPi * t.q * yy + t.phase_y);
      }
      return acc;
    };
    for (double y : {0.13, 0.48}) {
      for (std::size_t i = 0; i < torus.node_count(); i += 7) {
        auto x = testsupport::node_of(torus, i);
        const double base = eval(x, y);
        auto x_shift = x;
        x_shift[0] += 1.0;
        CHECK(eval(x_shift, y) == doctest::Approx(base).epsilon(1e-12));
        CHECK(eval(x, y + 1.0) == doctest::Approx(base).epsilon(1e-12));
      }
    }
  }
}
