#include "planecell/lindstedt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "planecell/energy.hpp"
#include "planecell/parallel.hpp"

namespace planecell::lindstedt {

namespace {

constexpr double kPhiZeroTol = 1e-10;   // "identically zero" threshold
constexpr double kTwistTol = 1e-10;
constexpr double kBisectTol = 1e-12;

// c[t] = sum_{i+j=t} a[i] b[j], all lists indexed by epsilon order starting
// at 0, truncated at a[0] = b[0] = 0 (series with no constant term).
std::vector<Field> truncated_product(const std::vector<Field>& a,
                                     const std::vector<Field>& b,
                                     const TorusSpec& torus) {
  std::vector<Field> c(a.size(), Field(torus));
  for (std::size_t t = 0; t < c.size(); ++t) {
    for (std::size_t i = 1; i + 1 <= t; ++i) {
      const Field& ai = a[i];
      const Field& bj = b[t - i];
      for (std::size_t n = 0; n < c[t].size(); ++n) c[t][n] += ai[n] * bj[n];
    }
  }
  return c;
}

}  // namespace

Field SeriesField::coefficient(int j) const {
  if (j < 1 || std::size_t(j) > u_star.size())
    throw ConfigError("SeriesField: coefficient index out of range");
  Field u = u_star[std::size_t(j - 1)];
  u += lambda[std::size_t(j - 1)];
  return u;
}

Field series_coefficient_rhs(const SeriesField& series, int j,
                             const potential::PotentialSpec& spec) {
  if (j < 1 || std::size_t(j - 1) > series.u_star.size())
    throw ConfigError("series_coefficient_rhs: orders u_1..u_{j-1} must be present");
  const TorusSpec& torus = series.torus;
  potential::Evaluator ev(spec, torus);
  const std::vector<double> y0 =
      ev.compose_argument({series.omega, series.alpha, std::nullopt});

  const int target = j - 1;
  if (target == 0) return ev.deriv(1, y0);

  // W = sum_{i>=1} eps^i u_i, dense coefficient list up to eps^target.
  std::vector<Field> w(std::size_t(target) + 1, Field(torus));
  for (int i = 1; i <= target; ++i) w[std::size_t(i)] = series.coefficient(i);

  Field rhs(torus);
  std::vector<Field> power = w;  // W^1
  double factorial = 1.0;
  for (int n = 1; n <= target; ++n) {
    factorial *= double(n);
    const Field dn = ev.deriv(n + 1, y0);
    const Field& pn = power[std::size_t(target)];
    const double inv_fact = 1.0 / factorial;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += inv_fact * dn[i] * pn[i];
    if (n < target) power = truncated_product(power, w, torus);
  }
  return rhs;
}

namespace {

// Rule applied at one series order during a resonance probe.
enum class LambdaRule { none, solved, zero };

struct ProbeChain {
  const potential::PotentialSpec& spec;
  const TorusSpec& torus;
  std::vector<double> omega;
  std::vector<LambdaRule> rules;  // rules[i] fixes lambda^{(i)} while building order i+1

  // Builds the series at a given alpha up to max_order-1 coefficients and
  // returns mean(rhs_{max_order}) evaluated with the newest lambda = 0.
  double phi_at(double alpha, int max_order) const {
    SeriesField s;
    s.torus = torus;
    s.omega = omega;
    s.alpha = alpha;
    potential::Evaluator ev(spec, torus);
    const std::vector<double> y0 = ev.compose_argument({omega, alpha, std::nullopt});

    for (int j = 1; j < max_order; ++j) {
      if (j >= 2) s.lambda.push_back(0.0);
      Field rhs = series_coefficient_rhs(s, j, spec);
      if (j >= 2 && rules[std::size_t(j - 2)] == LambdaRule::solved) {
        const Field vyy = ev.deriv(2, y0);
        const double slope = vyy.mean();
        const double lam = -rhs.mean() / slope;
        s.lambda.back() = lam;
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += lam * vyy[i];
      }
      rhs += -rhs.mean();
      s.u_star.push_back(solve_poisson_zero_mean(rhs));
    }
    if (max_order >= 2) s.lambda.push_back(0.0);
    return series_coefficient_rhs(s, max_order, spec).mean();
  }
};

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double fa, double fb) {
  for (int it = 0; it < 200 && (b - a) > kBisectTol; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  (void)fb;
  return 0.5 * (a + b);
}

}  // namespace

ResonanceAnalysis analyze_resonance(const potential::PotentialSpec& spec,
                                    std::span<const double> omega,
                                    const TorusSpec& torus, int probe_depth,
                                    int alpha_grid) {
  torus.validate();
  if (probe_depth < 1) throw ConfigError("analyze_resonance: probe_depth must be >= 1");
  if (alpha_grid < 8) throw ConfigError("analyze_resonance: alpha grid too coarse");
  potential::require_commensurate(omega, torus.N);

  const std::vector<double> omega_v(omega.begin(), omega.end());
  potential::Evaluator ev(spec, torus);

  ResonanceAnalysis out;
  out.omega = omega_v;

  std::vector<double> alphas(static_cast<std::size_t>(alpha_grid));
  for (int i = 0; i < alpha_grid; ++i) alphas[std::size_t(i)] = double(i) / double(alpha_grid);

  // Twist slope mean V_yy(x, u_0) as a function of alpha; evaluated lazily,
  // it is only needed once the probe reaches second order.
  std::vector<double> slope;
  bool slope_zero = false;
  auto ensure_slope = [&] {
    if (!slope.empty()) return;
    slope.resize(alphas.size());
    run_parallel(alphas.size(), 0, [&](std::size_t i) {
      const std::vector<double> y0 =
          ev.compose_argument({omega_v, alphas[i], std::nullopt});
      slope[i] = ev.deriv(2, y0).mean();
    });
    slope_zero = linf_norm(slope) <= kPhiZeroTol;
  };

  // Per-alpha partial series, kept across orders. Deep probes are intended
  // for modest grids; the state is alpha_grid * (depth-1) fields.
  std::vector<SeriesField> states(alphas.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    states[i].torus = torus;
    states[i].omega = omega_v;
    states[i].alpha = alphas[i];
  }

  ProbeChain chain{spec, torus, omega_v, {}};

  for (int j = 1; j <= probe_depth; ++j) {
    if (j >= 2) ensure_slope();
    const bool lambda_solvable = (j >= 2) && !slope_zero;

    // Alpha samples are independent; scan them on the worker pool.
    std::vector<double> phi(alphas.size());
    std::vector<Field> rhs_fields(alphas.size());
    run_parallel(alphas.size(), 0, [&](std::size_t i) {
      if (j >= 2) states[i].lambda.push_back(0.0);
      rhs_fields[i] = series_coefficient_rhs(states[i], j, spec);
      phi[i] = rhs_fields[i].mean();
    });

    if (lambda_solvable) {
      // The order is solvable for every alpha: absorb the mean into
      // lambda^{(j-1)}(alpha) and continue deeper.
      for (std::size_t i = 0; i < alphas.size(); ++i)
        if (std::abs(slope[i]) <= kPhiZeroTol && std::abs(phi[i]) > kPhiZeroTol)
          throw CompatibilityError(
              "analyze_resonance: twist slope vanishes at alpha = " +
                  format_double(alphas[i]) + " while the mean does not",
              phi[i]);
      run_parallel(alphas.size(), 0, [&](std::size_t i) {
        if (std::abs(slope[i]) > kPhiZeroTol) {
          const double lam = -phi[i] / slope[i];
          states[i].lambda.back() = lam;
          const std::vector<double> y0 =
              ev.compose_argument({omega_v, alphas[i], std::nullopt});
          const Field vyy = ev.deriv(2, y0);
          for (std::size_t n = 0; n < rhs_fields[i].size(); ++n)
            rhs_fields[i][n] += lam * vyy[n];
        }
        rhs_fields[i] += -rhs_fields[i].mean();
        states[i].u_star.push_back(solve_poisson_zero_mean(rhs_fields[i]));
      });
      chain.rules.push_back(LambdaRule::solved);
      out.phi_max_by_order.push_back(0.0);
      continue;
    }

    const double phi_max = linf_norm(phi);
    out.phi_max_by_order.push_back(phi_max);

    if (phi_max <= kPhiZeroTol) {
      // Identically zero at this order: zero-mean branch, continue.
      run_parallel(alphas.size(), 0, [&](std::size_t i) {
        rhs_fields[i] += -rhs_fields[i].mean();
        states[i].u_star.push_back(solve_poisson_zero_mean(rhs_fields[i]));
      });
      if (j >= 2) chain.rules.push_back(LambdaRule::zero);
      continue;
    }

    // Resonance at order j: locate the roots of Phi_j.
    out.resonance_order = j;
    const int jstar = j;
    auto phi_fn = [&](double a) { return chain.phi_at(a, jstar); };

    const double grid_zero_tol = 1e-12 * phi_max;
    std::vector<double> roots;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const std::size_t ip = (i + 1) % alphas.size();
      const double a0 = alphas[i];
      const double a1 = (ip == 0) ? 1.0 : alphas[ip];
      const double f0 = phi[i];
      const double f1 = phi[ip];
      if (std::abs(f0) <= grid_zero_tol) {
        roots.push_back(a0);
      } else if (std::abs(f1) > grid_zero_tol && (f0 < 0.0) != (f1 < 0.0)) {
        roots.push_back(bisect_root(phi_fn, a0, a1, f0, f1));
      }
    }
    for (double& r : roots)
      if (r >= 1.0) r -= 1.0;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                roots.end());

    if (roots.empty())
      throw NoRootError("analyze_resonance: Phi_" + std::to_string(j) +
                            " has no sign change on the alpha grid (min " +
                            format_double(*std::min_element(phi.begin(), phi.end())) +
                            ", max " +
                            format_double(*std::max_element(phi.begin(), phi.end())) + ")",
                        *std::min_element(phi.begin(), phi.end()),
                        *std::max_element(phi.begin(), phi.end()));

    out.roots = roots;
    for (double r : roots) {
      const std::vector<double> y0 = ev.compose_argument({omega_v, r, std::nullopt});
      const double tw = ev.deriv(2, y0).mean();
      if (std::abs(tw) <= kTwistTol)
        throw DegenerateTwistError(
            "analyze_resonance: twist integral vanishes at root alpha = " +
                format_double(r),
            tw);
      out.twist_values.push_back(tw);
    }
    return out;
  }

  return out;  // no resonance within probe depth
}

InitialConstant select_initial_constant(const potential::PotentialSpec& spec,
                                        std::span<const double> omega,
                                        const TorusSpec& torus, int probe_depth,
                                        int alpha_grid) {
  InitialConstant pick;
  ResonanceAnalysis analysis =
      analyze_resonance(spec, omega, torus, probe_depth, alpha_grid);
  if (analysis.resonance_order && !analysis.roots.empty()) {
    // Rank roots by the order-eps energy contribution mean V(x, omega.x + a).
    double best = 0.0;
    bool have = false;
    const std::vector<double> omega_v(omega.begin(), omega.end());
    for (double r : analysis.roots) {
      const double e =
          potential::mean_deriv_y(spec, 0, {omega_v, r, std::nullopt}, torus);
      if (!have || e < best) {
        best = e;
        pick.alpha = r;
        have = true;
      }
    }
  }
  pick.analysis = std::move(analysis);
  return pick;
}

SeriesField build_series(const potential::PotentialSpec& spec,
                         std::span<const double> omega, const TorusSpec& torus,
                         double alpha, int M) {
  torus.validate();
  if (M < 1) throw ConfigError("build_series: truncation order must be >= 1");
  potential::require_commensurate(omega, torus.N);

  SeriesField s;
  s.torus = torus;
  s.omega.assign(omega.begin(), omega.end());
  s.alpha = alpha;
  if (M == 1) return s;

  potential::Evaluator ev(spec, torus);

  // Orders j = 1..M-1: fix lambda^{(j-1)} so that mean(rhs_j) = 0, using
  // that the mean is affine in lambda (evaluated at lambda = 0 and 1), then
  // solve for the zero-mean part.
  for (int j = 1; j <= M - 1; ++j) {
    Field rhs(torus);
    if (j == 1) {
      rhs = series_coefficient_rhs(s, 1, spec);
      // Solvability here is the resonance condition on alpha itself; the
      // Poisson solve's mean check is the arbiter.
      s.u_star.push_back(solve_poisson_zero_mean(rhs));
      s.lambda.push_back(0.0);
      continue;
    }

    s.lambda[std::size_t(j - 2)] = 0.0;
    const Field rhs0 = series_coefficient_rhs(s, j, spec);
    s.lambda[std::size_t(j - 2)] = 1.0;
    const Field rhs1 = series_coefficient_rhs(s, j, spec);
    const double mean0 = rhs0.mean();
    const double mean1 = rhs1.mean();
    const double slope = mean1 - mean0;
    const double slope_tol = 1e-10 * std::max(1.0, rhs0.linf());

    double lam = 0.0;
    if (std::abs(slope) > slope_tol) {
      lam = -mean0 / slope;
    } else if (std::abs(mean0) > 1e-10 * std::max(1.0, rhs0.linf())) {
      throw CompatibilityError(
          "build_series: order " + std::to_string(j) +
              " mean cannot be zeroed (twist slope vanishes); hierarchy obstructed",
          mean0);
    }
    s.lambda[std::size_t(j - 2)] = lam;

    rhs = rhs0;
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] += lam * (rhs1[i] - rhs0[i]);
    rhs += -rhs.mean();
    s.u_star.push_back(solve_poisson_zero_mean(rhs));
    s.lambda.push_back(0.0);
  }

  // lambda^{(M-1)} from the order-M compatibility condition when the twist
  // slope allows it; otherwise left at 0 and recorded.
  s.lambda[std::size_t(M - 2)] = 0.0;
  const Field rhs0 = series_coefficient_rhs(s, M, spec);
  s.lambda[std::size_t(M - 2)] = 1.0;
  const Field rhs1 = series_coefficient_rhs(s, M, spec);
  const double mean0 = rhs0.mean();
  const double slope = rhs1.mean() - mean0;
  if (std::abs(slope) > 1e-10 * std::max(1.0, rhs0.linf())) {
    s.lambda[std::size_t(M - 2)] = -mean0 / slope;
    s.final_lambda_fixed = true;
  } else {
    s.lambda[std::size_t(M - 2)] = 0.0;
    s.final_lambda_fixed = false;
  }
  return s;
}

EvaluatedSeries eval_series(const SeriesField& series, double epsilon) {
  EvaluatedSeries out;
  out.omega = series.omega;
  out.alpha = series.alpha;
  const int M = series.order();
  if (M == 1) {
    out.z = Field(series.torus);
    return out;
  }
  Field z = series.coefficient(M - 1);
  for (int j = M - 2; j >= 1; --j) {
    z *= epsilon;
    z += series.coefficient(j);
  }
  z *= epsilon;
  out.z = std::move(z);
  return out;
}

double series_residual(const SeriesField& series, double epsilon,
                       const potential::PotentialSpec& spec) {
  const EvaluatedSeries es = eval_series(series, epsilon);
  const OperatorSpec lap{OperatorKind::laplacian, 1.0, 1.0, 1.0};
  Field r = apply_operator(lap, es.z);
  potential::Evaluator ev(spec, series.torus);
  std::vector<double> y =
      ev.compose_argument({series.omega, series.alpha, std::nullopt});
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += es.z[i];
  const Field vy = ev.deriv(1, y);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= epsilon * vy[i];
  return r.linf();
}

namespace {

// Preconditioned conjugate gradients on L = -Delta + eps V_yy(x, .), with
// spectral preconditioner (gamma - Delta)^{-1}. Returns the solution; throws
// LinearSolveStallError with the smallest Rayleigh quotient seen on failure.
Field pcg_solve(const Field& rhs, const Field& vyy_eps, const NewtonOptions& opts) {
  const TorusSpec& torus = rhs.spec();
  const OperatorSpec minus_lap{OperatorKind::laplacian, 1.0, 1.0, 1.0};
  const OperatorSpec precond{OperatorKind::resolvent_power, opts.gamma, -1.0, 1.0};

  auto apply_L = [&](const Field& v) {
    Field out = apply_operator(minus_lap, v);
    out *= -1.0;  // -Delta
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += vyy_eps[i] * v[i];
    return out;
  };

  Field x(torus);
  Field r = rhs;
  const double rhs_norm = std::sqrt(l2_inner(rhs, rhs));
  if (rhs_norm == 0.0) return x;

  Field z = apply_operator(precond, r);
  Field p = z;
  double rz = l2_inner(r, z);
  double min_rayleigh = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opts.cg_max_iters; ++it) {
    const Field Lp = apply_L(p);
    const double pLp = l2_inner(p, Lp);
    const double pp = l2_inner(p, p);
    min_rayleigh = std::min(min_rayleigh, pLp / pp);
    if (pLp <= 0.0)
      throw LinearSolveStallError(
          "newton_refine: linearized operator is not positive along a search "
          "direction (estimated smallest Ritz value " +
              format_double(min_rayleigh) + ")",
          min_rayleigh);
    const double step = rz / pLp;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += step * p[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= step * Lp[i];
    if (std::sqrt(l2_inner(r, r)) <= opts.cg_tol * rhs_norm) return x;
    z = apply_operator(precond, r);
    const double rz_next = l2_inner(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  throw LinearSolveStallError(
      "newton_refine: inner conjugate-gradient solve stalled (estimated "
      "smallest Ritz value " +
          format_double(min_rayleigh) + ")",
      min_rayleigh);
}

}  // namespace

descent::MinimizerSolution newton_refine(const EvaluatedSeries& start,
                                         double epsilon,
                                         const potential::PotentialSpec& spec,
                                         const NewtonOptions& opts) {
  const TorusSpec& torus = start.z.spec();
  potential::Evaluator ev(spec, torus);
  const std::vector<double> base =
      ev.compose_argument({start.omega, 0.0, std::nullopt});
  const OperatorSpec lap{OperatorKind::laplacian, 1.0, 1.0, 1.0};

  Field z = start.z;
  z += start.alpha;

  descent::MinimizerSolution sol;
  sol.omega = start.omega;
  sol.epsilon = epsilon;

  std::vector<double> y(z.size());
  double residual = 0.0;
  bool converged = false;
  int iter = 0;
  for (; iter <= opts.max_iters; ++iter) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = base[i] + z[i];
    // G(z) = -Delta z + eps V_y
    Field g = apply_operator(lap, z);
    g *= -1.0;
    const Field vy = ev.deriv(1, y);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += epsilon * vy[i];
    residual = g.linf();
    sol.residual_trace.push_back(residual);
    if (residual <= opts.tol_residual) {
      converged = true;
      break;
    }
    if (iter == opts.max_iters) break;

    Field vyy = ev.deriv(2, y);
    vyy *= epsilon;
    const Field eta = pcg_solve(g, vyy, opts);
    z -= eta;
  }

  sol.z = std::move(z);
  sol.residual_linf = residual;
  sol.iterations = iter;
  sol.converged = converged;
  sol.stop_reason =
      converged ? descent::StopReason::residual : descent::StopReason::max_iters;
  sol.energy = energy::reduced_average_energy(sol.z, sol.omega, epsilon, spec);
  return sol;
}

}  // namespace planecell::lindstedt
