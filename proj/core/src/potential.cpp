#include "planecell/potential.hpp"

#include <cmath>

namespace planecell::potential {

PotentialSpec PotentialSpec::product_cos(std::vector<int> k, double amplitude) {
  PotentialSpec s;
  s.kind = Kind::product_cos;
  s.k = std::move(k);
  s.amplitude = amplitude;
  return s;
}

PotentialSpec PotentialSpec::separable(std::vector<int> k, double amplitude) {
  PotentialSpec s;
  s.kind = Kind::separable;
  s.k = std::move(k);
  s.amplitude = amplitude;
  return s;
}

PotentialSpec PotentialSpec::mixed(std::vector<int> k, double amplitude) {
  PotentialSpec s;
  s.kind = Kind::mixed;
  s.k = std::move(k);
  s.amplitude = amplitude;
  return s;
}

PotentialSpec PotentialSpec::custom(std::vector<TrigTerm> terms) {
  PotentialSpec s;
  s.kind = Kind::custom_trig;
  s.terms = std::move(terms);
  return s;
}

std::vector<TrigTerm> expanded_terms(const PotentialSpec& spec, int d) {
  const double half_pi = kPi / 2.0;
  std::vector<TrigTerm> out;
  switch (spec.kind) {
    case Kind::product_cos: {
      if (int(spec.k.size()) != d)
        throw ConfigError("potential: wave vector k has wrong dimension");
      // sin(2 pi k.x) = cos(2 pi k.x - pi/2)
      out.push_back({spec.amplitude, spec.k, -half_pi, 1, 0.0});
      break;
    }
    case Kind::separable: {
      if (d != 2 || spec.k.size() != 2)
        throw ConfigError("potential: separable kind is two-dimensional");
      // sin(a) sin(b) = (cos(a-b) - cos(a+b)) / 2
      std::vector<int> diff = {spec.k[0], -spec.k[1]};
      std::vector<int> sum = {spec.k[0], spec.k[1]};
      out.push_back({0.5 * spec.amplitude, diff, 0.0, 1, 0.0});
      out.push_back({-0.5 * spec.amplitude, sum, 0.0, 1, 0.0});
      break;
    }
    case Kind::mixed: {
      if (int(spec.k.size()) != d)
        throw ConfigError("potential: wave vector k has wrong dimension");
      out.push_back({0.5 * spec.amplitude, spec.k, -half_pi, 1, 0.0});
      out.push_back({0.5 * spec.amplitude, spec.k, -half_pi, 1, -half_pi});
      break;
    }
    case Kind::custom_trig: {
      for (const TrigTerm& t : spec.terms) {
        if (int(t.p.size()) != d)
          throw ConfigError("potential: custom term wave vector has wrong dimension");
        out.push_back(t);
      }
      break;
    }
  }
  return out;
}

void require_commensurate(std::span<const double> omega, int N) {
  for (double w : omega) {
    const double scaled = w * double(N);
    if (std::abs(scaled - std::round(scaled)) > 1e-9)
      throw ConfigError("incommensurate rotation vector: N*omega must be integer");
  }
}

Evaluator::Evaluator(const PotentialSpec& spec, const TorusSpec& torus)
    : torus_(torus) {
  torus_.validate();
  const auto terms = expanded_terms(spec, torus_.d);
  const std::size_t n = torus_.node_count();
  const double h = torus_.spacing();
  const int m = torus_.m;

  for (const TrigTerm& t : terms) {
    CachedTerm ct;
    ct.amplitude = t.amplitude;
    ct.q = t.q;
    ct.phase_y = t.phase_y;
    ct.x_factor.resize(n);
    for (std::size_t flat = 0; flat < n; ++flat) {
      std::size_t rest = flat;
      double dot = 0.0;
      for (int axis = torus_.d - 1; axis >= 0; --axis) {
        const int j = int(rest % std::size_t(m));
        rest /= std::size_t(m);
        dot += double(t.p[std::size_t(axis)]) * (h * double(j));
      }
      ct.x_factor[flat] = std::cos(kTwoPi * dot + t.phase_x);
    }
    terms_.push_back(std::move(ct));
  }
}

std::vector<double> Evaluator::compose_argument(const ComposedArgument& arg) const {
  if (int(arg.omega.size()) != torus_.d)
    throw ConfigError("potential: rotation vector has wrong dimension");
  require_commensurate(arg.omega, torus_.N);
  if (arg.perturbation && !(arg.perturbation->spec() == torus_))
    throw ConfigError("potential: perturbation lives on a different grid");

  const std::size_t n = torus_.node_count();
  const double h = torus_.spacing();
  const int m = torus_.m;
  std::vector<double> y(n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rest = flat;
    double dot = 0.0;
    for (int axis = torus_.d - 1; axis >= 0; --axis) {
      const int j = int(rest % std::size_t(m));
      rest /= std::size_t(m);
      dot += arg.omega[std::size_t(axis)] * (h * double(j));
    }
    y[flat] = dot + arg.alpha;
    if (arg.perturbation) y[flat] += (*arg.perturbation)[flat];
  }
  return y;
}

Field Evaluator::deriv(int n, std::span<const double> y_nodes) const {
  if (n < 0 || n > 12)
    throw ConfigError("potential: y-derivative order must lie in 0..12");
  Field out(torus_);
  for (const CachedTerm& t : terms_) {
    const double tq = kTwoPi * double(t.q);
    const double amp = t.amplitude * std::pow(tq, double(n));
    const double phase = t.phase_y + double(n) * kPi / 2.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += amp * t.x_factor[i] * std::cos(tq * y_nodes[i] + phase);
    }
  }
  return out;
}

Field deriv_y(const PotentialSpec& spec, int n, const ComposedArgument& arg,
              const TorusSpec& torus) {
  Evaluator ev(spec, torus);
  return ev.deriv(n, ev.compose_argument(arg));
}

double mean_deriv_y(const PotentialSpec& spec, int n, const ComposedArgument& arg,
                    const TorusSpec& torus) {
  return deriv_y(spec, n, arg, torus).mean();
}

}  // namespace planecell::potential
