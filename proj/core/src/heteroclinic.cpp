#include "planecell/heteroclinic.hpp"

#include <cmath>

namespace planecell::heteroclinic {

double profile_alpha(double s) {
  return std::atan(std::sinh(std::sqrt(2.0) * kPi * s)) / kPi + 0.75;
}

double profile_alpha_prime(double s) {
  return std::sqrt(2.0) / std::cosh(std::sqrt(2.0) * kPi * s);
}

HeteroclinicProfile build_profile(double epsilon, int axis, int sign, double L,
                                  int n_s) {
  if (n_s < 16) throw ConfigError("build_profile: need at least 16 samples");
  if (sign != 1 && sign != -1) throw ConfigError("build_profile: sign must be +-1");
  if (epsilon < 0.0) throw ConfigError("build_profile: epsilon must be nonnegative");
  // Tails must sit within 1e-6 of the limits at |s| = L; the deviation is
  // (2/pi) exp(-sqrt(2) pi L).
  if ((2.0 / kPi) * std::exp(-std::sqrt(2.0) * kPi * L) > 1e-6)
    throw ConfigError("build_profile: L too short for settled tails");

  HeteroclinicProfile p;
  p.epsilon = epsilon;
  p.axis = axis;
  p.sign = sign;
  p.L = L;
  p.alpha_minus = 0.25;
  p.alpha_plus = 1.25;

  const double h = 2.0 * L / double(n_s - 1);
  p.s.resize(std::size_t(n_s));
  p.alpha.resize(std::size_t(n_s));
  for (int i = 0; i < n_s; ++i) {
    p.s[std::size_t(i)] = -L + h * double(i);
    p.alpha[std::size_t(i)] = profile_alpha(p.s[std::size_t(i)]);
  }

  // Sixth-order second derivative; ghost values come from the closed form,
  // which is defined everywhere.
  auto alpha_at = [&](int i) {
    if (i >= 0 && i < n_s) return p.alpha[std::size_t(i)];
    return profile_alpha(-L + h * double(i));
  };
  double worst = 0.0;
  for (int i = 0; i < n_s; ++i) {
    const double d2 =
        (2.0 * alpha_at(i - 3) - 27.0 * alpha_at(i - 2) + 270.0 * alpha_at(i - 1) -
         490.0 * alpha_at(i) + 270.0 * alpha_at(i + 1) - 27.0 * alpha_at(i + 2) +
         2.0 * alpha_at(i + 3)) /
        (180.0 * h * h);
    const double r = d2 + kPi * std::cos(kTwoPi * p.alpha[std::size_t(i)]);
    worst = std::max(worst, std::abs(r));
  }
  p.ode_residual_linf = worst;
  return p;
}

namespace {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Legendre nodes by Newton iteration on P_n; standard and accurate to
// machine precision for the small orders used here.
GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(std::size_t(n));
  rule.weights.resize(std::size_t(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / double(j);
        p0 = p1;
        p1 = p2;
      }
      dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[std::size_t(i)] = -x;
    rule.nodes[std::size_t(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[std::size_t(i)] = w;
    rule.weights[std::size_t(n - 1 - i)] = w;
  }
  return rule;
}

template <typename F>
double composite_gl(const F& f, double a, double b, int panels, const GaussRule& rule) {
  CompensatedSum acc;
  const double w = (b - a) / double(panels);
  for (int p = 0; p < panels; ++p) {
    const double lo = a + w * double(p);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = lo + 0.5 * w * (rule.nodes[i] + 1.0);
      acc.add(0.5 * w * rule.weights[i] * f(x));
    }
  }
  return acc.value();
}

}  // namespace

double closed_form_kinetic(double epsilon) {
  return 2.0 * std::sqrt(2.0) / kPi * std::sqrt(epsilon);
}

double analytic_jump(double epsilon) {
  return 4.0 * std::sqrt(2.0) / kPi * std::sqrt(epsilon);
}

double kinetic_jump_integral(double epsilon, double rel_tol) {
  if (!(epsilon > 0.0)) throw ConfigError("kinetic_jump_integral: epsilon must be positive");
  const double a = std::sqrt(2.0 * epsilon) * kPi;
  const double X = 15.0 / a;  // relative truncation error ~ exp(-30)
  const auto f = [&](double x) {
    const double c = std::cosh(a * x);
    return 2.0 * epsilon / (c * c);
  };
  const GaussRule rule = gauss_legendre(12);
  double prev = composite_gl(f, -X, X, 16, rule);
  for (int panels = 32; panels <= 2048; panels *= 2) {
    const double cur = composite_gl(f, -X, X, panels, rule);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

namespace {

// Closed-form first-order coefficient of the product_cos series at a root:
// u_1*(x) = -cos(4 pi k.x + 2 pi alpha0) / (16 pi |k|^2).
struct ProductCosForms {
  std::vector<int> k;
  double alpha0 = 0.0;
  double lambda1 = 0.0;
  double k2 = 0.0;  // |k|^2

  double u1(std::span<const double> x) const {
    double kx = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) kx += double(k[i]) * x[i];
    return -std::cos(2.0 * kTwoPi * kx + kTwoPi * alpha0) / (16.0 * kPi * k2) +
           lambda1;
  }
  double du1(std::span<const double> x, int axis) const {
    double kx = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) kx += double(k[i]) * x[i];
    return double(k[std::size_t(axis)]) *
           std::sin(2.0 * kTwoPi * kx + kTwoPi * alpha0) / (4.0 * k2);
  }
  double V(std::span<const double> x, double y) const {
    double kx = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) kx += double(k[i]) * x[i];
    return std::sin(kTwoPi * kx) * std::cos(kTwoPi * y);
  }
};

}  // namespace

JumpQuadrature dae_quadrature(double epsilon, int axis,
                              const potential::PotentialSpec& spec,
                              const lindstedt::SeriesField& series,
                              const DaeOptions& opts) {
  if (spec.kind != potential::Kind::product_cos)
    throw ConfigError("dae_quadrature: only the product_cos family is hard-wired");
  if (std::abs(spec.amplitude - 1.0) > 1e-12)
    throw ConfigError("dae_quadrature: profile assumes unit amplitude");
  if (!(epsilon > 0.0)) throw ConfigError("dae_quadrature: epsilon must be positive");
  const int d = series.torus.d;
  if (axis < 0 || axis >= d) throw ConfigError("dae_quadrature: axis out of range");
  if (series.order() < 2)
    throw ConfigError("dae_quadrature: series must carry the first-order term");
  if (opts.eta_sign != 1 && opts.eta_sign != -1)
    throw ConfigError("dae_quadrature: eta_sign must be +-1");
  if (std::abs(series.alpha - 0.25) > 1e-6)
    throw ConfigError("dae_quadrature: expected the minimizing root alpha = 1/4");
  for (int i = 0; i < d; ++i)
    if (std::abs(series.omega[std::size_t(i)] - double(spec.k[std::size_t(i)])) > 1e-12)
      throw ConfigError("dae_quadrature: hard-wired to the resonance omega = k");

  ProductCosForms forms;
  forms.k = spec.k;
  forms.alpha0 = series.alpha;
  forms.lambda1 = series.lambda.empty() ? 0.0 : series.lambda[0];
  forms.k2 = 0.0;
  for (int ki : spec.k) forms.k2 += double(ki) * double(ki);

  // Guard: the closed form must agree with the series coefficient.
  {
    const Field& u1s = series.u_star[0];
    const TorusSpec& torus = series.torus;
    const double h = torus.spacing();
    const int m = torus.m;
    double worst = 0.0;
    std::vector<double> x(static_cast<std::size_t>(d));
    const std::size_t stride = std::max<std::size_t>(1, u1s.size() / 257);
    for (std::size_t flat = 0; flat < u1s.size(); flat += stride) {
      std::size_t rest = flat;
      for (int ax = d - 1; ax >= 0; --ax) {
        x[std::size_t(ax)] = h * double(rest % std::size_t(m));
        rest /= std::size_t(m);
      }
      worst = std::max(worst,
                       std::abs(forms.u1(x) - forms.lambda1 - u1s[flat]));
    }
    if (worst > 1e-8)
      throw ConfigError(
          "dae_quadrature: series first-order term does not match the "
          "product_cos closed form (wrong potential, branch or grid?)");
  }

  const double a = std::sqrt(2.0 * epsilon) * kPi;   // layer rate
  const double Lx = opts.strip_factor / std::sqrt(2.0 * epsilon);
  const GaussRule rule = gauss_legendre(opts.gl_order);
  const double omega_axis = double(spec.k[std::size_t(axis)]);

  // Transverse rectangle-rule grid over [0,1]^{d-1}; exact for the trig
  // content of these integrands.
  const int nt = (d == 1) ? 1 : opts.n_transverse;
  std::size_t n_perp = 1;
  for (int i = 0; i < d - 1; ++i) n_perp *= std::size_t(nt);

  struct Components {
    double cross = 0.0;
    double kin = 0.0;
    double pot = 0.0;
  };

  // Transverse averages of the integrand pieces at fixed longitudinal t.
  auto transverse_avg = [&](double t, int sigma) {
    Components c;
    const double sechv = 1.0 / std::cosh(a * t);
    const double prof = profile_alpha(std::sqrt(epsilon) * double(sigma) * t);
    CompensatedSum cross_acc, pot_acc;
    std::vector<double> x(static_cast<std::size_t>(d));
    x[std::size_t(axis)] = t;
    for (std::size_t pi = 0; pi < n_perp; ++pi) {
      std::size_t rest = pi;
      for (int ax = 0; ax < d; ++ax) {
        if (ax == axis) continue;
        x[std::size_t(ax)] = double(rest % std::size_t(nt)) / double(nt);
        rest /= std::size_t(nt);
      }
      double omega_x = 0.0;
      for (int i = 0; i < d; ++i) omega_x += double(spec.k[std::size_t(i)]) * x[std::size_t(i)];
      const double u1v = forms.u1(x);
      const double yM = omega_x + forms.alpha0 + epsilon * u1v;
      const double yH = omega_x + prof + epsilon * u1v;
      cross_acc.add(double(sigma) * std::sqrt(2.0 * epsilon) * sechv *
                    (omega_axis + epsilon * forms.du1(x, axis)));
      pot_acc.add(epsilon * (forms.V(x, yH) - forms.V(x, yM)));
    }
    c.cross = cross_acc.value() / double(n_perp);
    c.kin = epsilon * sechv * sechv;
    c.pot = pot_acc.value() / double(n_perp);
    return c;
  };

  JumpQuadrature out;
  for (int dir = 0; dir < 2; ++dir) {
    const int sigma = (dir == 0 ? 1 : -1) * opts.eta_sign;
    // Tail check before integrating.
    for (double t : {-Lx, Lx}) {
      const Components c = transverse_avg(t, sigma);
      const double total = std::abs(c.cross + c.kin + c.pot);
      out.tail_value = std::max(out.tail_value, total);
      if (total > opts.tail_tol)
        throw TailError("dae_quadrature: integrand " + format_double(total) +
                            " at strip end exceeds tolerance (strip too short)",
                        total);
    }
    CompensatedSum cross_int, kin_int, pot_int;
    const double w = 2.0 * Lx / double(opts.panels);
    for (int p = 0; p < opts.panels; ++p) {
      const double lo = -Lx + w * double(p);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = lo + 0.5 * w * (rule.nodes[i] + 1.0);
        const double wt = 0.5 * w * rule.weights[i];
        const Components c = transverse_avg(t, sigma);
        cross_int.add(wt * c.cross);
        kin_int.add(wt * c.kin);
        pot_int.add(wt * c.pot);
      }
    }
    const double total = cross_int.value() + kin_int.value() + pot_int.value();
    if (dir == 0) {
      out.dplus = total;
      out.cross_plus = cross_int.value();
      out.potential_plus = pot_int.value();
      out.kinetic_sech2 = kin_int.value();
    } else {
      out.dminus = total;
      out.cross_minus = cross_int.value();
      out.potential_minus = pot_int.value();
    }
  }
  out.jump = out.dplus + out.dminus;
  return out;
}

}  // namespace planecell::heteroclinic
