#include "planecell/descent.hpp"

#include <cmath>

#include "planecell/energy.hpp"

namespace planecell::descent {

void DescentParams::validate() const {
  if (beta <= 0.0 || beta > 1.0)
    throw ConfigError("DescentParams: beta must lie in (0, 1]");
  if (gamma <= 0.0) throw ConfigError("DescentParams: gamma must be positive");
  if (dt <= 0.0) throw ConfigError("DescentParams: dt must be positive");
  if (delta <= 0.0 || delta > 1.0)
    throw ConfigError("DescentParams: delta must lie in (0, 1]");
  if (max_iters < 1) throw ConfigError("DescentParams: max_iters must be positive");
  if (tol_residual <= 0.0 || tol_step <= 0.0)
    throw ConfigError("DescentParams: tolerances must be positive");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::residual: return "residual";
    case StopReason::step_stall: return "step_stall";
    case StopReason::max_iters: return "max_iters";
  }
  return "unknown";
}

namespace {

// Per-mode factors of the scheme, fixed over a whole solve:
//   force factor  a(q) = dt * s^{-beta}
//   denominator   D(q) = 1 + dt s^{1-beta} - gamma dt s^{-beta},
// with s = gamma + |xi|^{2 delta}. D >= 1 always (D - 1 = dt s^{-beta} |xi|^{2 delta}).
struct Stepper {
  TorusSpec torus;
  std::vector<double> force_factor;
  std::vector<double> denom;
  std::vector<double> minus_xi2;  // Laplacian symbol, for residuals

  Stepper(const TorusSpec& spec, const DescentParams& p) : torus(spec) {
    const std::size_t n = spec.node_count();
    force_factor.resize(n);
    denom.resize(n);
    minus_xi2.resize(n);
    SpectralField probe(spec);  // only for frequency decoding
    for (std::size_t i = 0; i < n; ++i) {
      const double xi2 = probe.xi_squared_at(i);
      const double xi2d = (p.delta == 1.0) ? xi2 : std::pow(xi2, p.delta);
      const double s = p.gamma + xi2d;
      const double s_mb = std::pow(s, -p.beta);
      const double d = 1.0 + p.dt * std::pow(s, 1.0 - p.beta) - p.gamma * p.dt * s_mb;
      if (!(d > 0.0))
        throw ConfigError("descent: nonpositive scheme denominator (pathological gamma*dt)");
      force_factor[i] = p.dt * s_mb;
      denom[i] = d;
      minus_xi2[i] = -xi2;
    }
  }

  void advance(SpectralField& zhat, const SpectralField& fhat) const {
    for (std::size_t i = 0; i < zhat.size(); ++i)
      zhat[i] = (zhat[i] - force_factor[i] * fhat[i]) / denom[i];
  }

  Field laplacian(const SpectralField& zhat) const {
    SpectralField lz = zhat;
    for (std::size_t i = 0; i < lz.size(); ++i) lz[i] *= minus_xi2[i];
    return inverse(lz);
  }
};

}  // namespace

Field descent_step(const Field& z, std::span<const double> omega, double epsilon,
                   const potential::PotentialSpec& spec, const DescentParams& p) {
  p.validate();
  potential::require_commensurate(omega, z.spec().N);
  Stepper stepper(z.spec(), p);
  potential::Evaluator ev(spec, z.spec());

  std::vector<double> y = ev.compose_argument(
      {std::vector<double>(omega.begin(), omega.end()), 0.0, std::nullopt});
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];

  Field force = ev.deriv(1, y);
  force *= epsilon;
  SpectralField zhat = forward(z);
  stepper.advance(zhat, forward(force));
  return inverse(zhat);
}

MinimizerSolution solve(const TorusSpec& torus, std::span<const double> omega,
                        double epsilon, const potential::PotentialSpec& spec,
                        const DescentParams& p, const Field& z0, TraceLevel trace) {
  torus.validate();
  p.validate();
  potential::require_commensurate(omega, torus.N);
  if (!(z0.spec() == torus)) throw ConfigError("solve: z0 lives on a different grid");

  Stepper stepper(torus, p);
  potential::Evaluator ev(spec, torus);
  const std::vector<double> omega_v(omega.begin(), omega.end());
  const std::vector<double> base =
      ev.compose_argument({omega_v, 0.0, std::nullopt});

  MinimizerSolution sol;
  sol.omega = omega_v;
  sol.epsilon = epsilon;

  Field z = z0;
  SpectralField zhat = forward(z);
  std::vector<double> y(z.size());

  StopReason reason = StopReason::max_iters;
  long iter = 0;
  double residual = 0.0;

  for (; iter < p.max_iters; ++iter) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = base[i] + z[i];
    Field force = ev.deriv(1, y);
    force *= epsilon;

    // Residual of the current iterate, in physical space.
    Field lap = stepper.laplacian(zhat);
    lap -= force;
    residual = lap.linf();
    if (trace != TraceLevel::none) sol.residual_trace.push_back(residual);
    if (trace == TraceLevel::full)
      sol.energy_trace.push_back(
          energy::reduced_average_energy(z, omega, epsilon, spec));
    if (residual <= p.tol_residual) {
      reason = StopReason::residual;
      break;
    }

    stepper.advance(zhat, forward(force));
    Field z_next = inverse(zhat);

    double step_linf = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      step_linf = std::max(step_linf, std::abs(z_next[i] - z[i]));
    z = std::move(z_next);

    if (step_linf <= p.tol_step * p.dt) {
      // Flow has stalled; recompute the residual at the new iterate.
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = base[i] + z[i];
      Field f2 = ev.deriv(1, y);
      f2 *= epsilon;
      Field lap2 = stepper.laplacian(zhat);
      lap2 -= f2;
      residual = lap2.linf();
      ++iter;
      reason = StopReason::step_stall;
      break;
    }
  }

  sol.z = std::move(z);
  sol.residual_linf = residual;
  sol.iterations = iter;
  sol.stop_reason = reason;
  sol.converged = residual <= p.tol_residual;
  sol.energy = energy::reduced_average_energy(sol.z, omega, epsilon, spec);

  if (!sol.converged) {
    throw NonConvergenceError(
        "descent did not reach tol_residual (stopped on " +
            std::string(to_string(reason)) + ", residual " + format_double(residual) +
            " after " + std::to_string(iter) + " iterations)",
        std::move(sol));
  }
  return sol;
}

MinimizerSolution solve(const TorusSpec& torus, std::span<const double> omega,
                        double epsilon, const potential::PotentialSpec& spec,
                        const DescentParams& p, double z0_constant, TraceLevel trace) {
  return solve(torus, omega, epsilon, spec, p,
               Field::constant(torus, z0_constant), trace);
}

BirkhoffReport check_birkhoff(const MinimizerSolution& sol, int range) {
  const TorusSpec& torus = sol.z.spec();
  const int d = torus.d;
  BirkhoffReport report;

  std::vector<int> k(std::size_t(d), -range);
  const std::size_t combos = [&] {
    std::size_t c = 1;
    for (int i = 0; i < d; ++i) c *= std::size_t(2 * range + 1);
    return c;
  }();

  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::size_t rest = combo;
    for (int i = 0; i < d; ++i) {
      k[std::size_t(i)] = int(rest % std::size_t(2 * range + 1)) - range;
      rest /= std::size_t(2 * range + 1);
    }
    // z is N-periodic: shift it by k mod N, keep the exact omega.k offset.
    std::vector<int> k_mod = k;
    for (int& ki : k_mod) ki = ((ki % torus.N) + torus.N) % torus.N;
    const Field shifted = translate(sol.z, k_mod, 0);
    double omega_dot_k = 0.0;
    for (int i = 0; i < d; ++i) omega_dot_k += sol.omega[std::size_t(i)] * k[std::size_t(i)];

    for (int l = -range; l <= range; ++l) {
      // u(x+k) + l - u(x) = omega.k + l + z(x+k) - z(x)
      double lo = 0.0, hi = 0.0;
      bool first = true;
      for (std::size_t i = 0; i < sol.z.size(); ++i) {
        const double v = omega_dot_k + double(l) + shifted[i] - sol.z[i];
        if (first) {
          lo = hi = v;
          first = false;
        } else {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      BirkhoffEntry entry;
      entry.k = k;
      entry.l = l;
      entry.min = lo;
      entry.max = hi;
      if (std::abs(lo) <= 1e-8 && std::abs(hi) <= 1e-8) {
        entry.cls = BirkhoffClass::zero;
      } else if (lo > 0.0) {
        entry.cls = BirkhoffClass::positive;
      } else if (hi < 0.0) {
        entry.cls = BirkhoffClass::negative;
      } else {
        entry.cls = BirkhoffClass::mixed;
        report.any_mixed = true;
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

std::vector<double> amplification_factors(const DescentParams& p, const TorusSpec& torus) {
  Stepper stepper(torus, p);
  std::vector<double> out(stepper.denom.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / stepper.denom[i];
  return out;
}

}  // namespace planecell::descent
