#include "planecell/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace planecell {

void TorusSpec::validate() const {
  if (d < 1 || d > 3) throw ConfigError("TorusSpec: dimension must be 1, 2 or 3");
  if (N < 1) throw ConfigError("TorusSpec: cell period N must be positive");
  if (m < 4) throw ConfigError("TorusSpec: need at least 4 samples per dimension");
  if (!is_power_of_two(m)) throw ConfigError("TorusSpec: m must be a power of two");
  if (m % N != 0)
    throw ConfigError("TorusSpec: m must be divisible by N so integer translates hit nodes");
}

Field::Field(const TorusSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.node_count())
    throw ConfigError("Field: value count does not match grid");
}

Field& Field::operator+=(const Field& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
Field& Field::operator-=(const Field& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}
Field& Field::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

Field pointwise_product(const Field& a, const Field& b) {
  Field out(a.spec());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

std::array<int, 3> SpectralField::freq_at(std::size_t flat) const {
  std::array<int, 3> q{0, 0, 0};
  const int m = spec_.m;
  std::size_t rest = flat;
  for (int axis = spec_.d - 1; axis >= 0; --axis) {
    int t = int(rest % std::size_t(m));
    rest /= std::size_t(m);
    q[axis] = (t < m / 2) ? t : t - m;
  }
  return q;
}

double SpectralField::xi_squared_at(std::size_t flat) const {
  const auto q = freq_at(flat);
  double s = 0.0;
  for (int i = 0; i < spec_.d; ++i) {
    const double xi = kTwoPi * double(q[i]) / double(spec_.N);
    s += xi * xi;
  }
  return s;
}

std::complex<double> SpectralField::coeff_at(std::span<const int> q) const {
  const int m = spec_.m;
  std::size_t flat = 0;
  for (int axis = 0; axis < spec_.d; ++axis) {
    int qi = q[axis];
    if (qi < -m / 2 || qi >= m / 2)
      throw ConfigError("SpectralField: frequency index out of range");
    const int t = (qi >= 0) ? qi : qi + m;
    flat = flat * std::size_t(m) + std::size_t(t);
  }
  return coeffs_[flat];
}

namespace {

// One out-of-place c2c plan pair per (d, m). Plan creation is guarded (the
// FFTW planner is not thread safe); fftw_execute_dft on distinct buffers is.
// FFTW_ESTIMATE keeps planning deterministic across runs. Plans live for the
// process and are released at static destruction.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, PlanPair> plans;

  ~PlanCache() {
    for (auto& [key, pp] : plans) {
      fftw_destroy_plan(pp.fwd);
      fftw_destroy_plan(pp.bwd);
    }
    fftw_cleanup();
  }
};

const PlanPair& plans_for(const TorusSpec& spec) {
  static PlanCache cache;
  std::scoped_lock lock(cache.mu);
  auto key = std::make_pair(spec.d, spec.m);
  auto it = cache.plans.find(key);
  if (it != cache.plans.end()) return it->second;

  const std::size_t n = spec.node_count();
  fftw_complex* in = fftw_alloc_complex(n);
  fftw_complex* out = fftw_alloc_complex(n);
  int dims[3] = {spec.m, spec.m, spec.m};
  PlanPair pp;
  pp.fwd = fftw_plan_dft(spec.d, dims, in, out, FFTW_FORWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  pp.bwd = fftw_plan_dft(spec.d, dims, in, out, FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  return cache.plans.emplace(key, pp).first->second;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

SpectralField forward(const Field& f) {
  const TorusSpec& spec = f.spec();
  const std::size_t n = f.size();
  std::vector<std::complex<double>> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = f[i];

  SpectralField out(spec);
  const PlanPair& pp = plans_for(spec);
  fftw_execute_dft(pp.fwd, as_fftw(in.data()), as_fftw(out.coeffs().data()));
  const double scale = 1.0 / double(n);
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
  return out;
}

Field inverse(const SpectralField& fh) {
  const TorusSpec& spec = fh.spec();
  const std::size_t n = fh.size();
  std::vector<std::complex<double>> in(fh.coeffs().begin(), fh.coeffs().end());
  std::vector<std::complex<double>> out(n);

  const PlanPair& pp = plans_for(spec);
  fftw_execute_dft(pp.bwd, as_fftw(in.data()), as_fftw(out.data()));

  Field result(spec);
  for (std::size_t i = 0; i < n; ++i) result[i] = out[i].real();
  return result;
}

void OperatorSpec::validate() const {
  if (kind == OperatorKind::resolvent_power && gamma <= 0.0)
    throw ConfigError("OperatorSpec: resolvent_power requires gamma > 0");
  if (delta <= 0.0 || delta > 1.0)
    throw ConfigError("OperatorSpec: fractional order delta must lie in (0, 1]");
}

double operator_symbol(const OperatorSpec& op, double xi_squared) {
  // delta == 1 uses |xi|^2 directly; the fractional path then matches the
  // classical one bit for bit.
  const double xi2d = (op.delta == 1.0) ? xi_squared : std::pow(xi_squared, op.delta);
  switch (op.kind) {
    case OperatorKind::laplacian:
      return -xi_squared;
    case OperatorKind::fractional:
      return -xi2d;
    case OperatorKind::resolvent_power:
      return std::pow(op.gamma + xi2d, op.power);
  }
  return 0.0;
}

SpectralField apply_operator(const OperatorSpec& op, const SpectralField& fh) {
  op.validate();
  SpectralField out = fh;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = operator_symbol(op, out.xi_squared_at(i));
    if (!std::isfinite(s))
      throw ConfigError("apply_operator: operator symbol is not finite");
    out[i] *= s;
  }
  return out;
}

Field apply_operator(const OperatorSpec& op, const Field& f) {
  return inverse(apply_operator(op, forward(f)));
}

Field solve_poisson_zero_mean(const Field& g, double tol_mean) {
  if (tol_mean < 0.0) tol_mean = 1e-10 * g.linf();
  const double mean = g.mean();
  if (std::abs(mean) > tol_mean)
    throw CompatibilityError(
        "solve_poisson_zero_mean: right-hand side has nonzero mean " +
            format_double(mean) + " (resonance obstruction)",
        mean);

  SpectralField gh = forward(g);
  gh[0] = 0.0;
  for (std::size_t i = 1; i < gh.size(); ++i) {
    const double xi2 = gh.xi_squared_at(i);
    gh[i] = -gh[i] / xi2;
  }
  return inverse(gh);
}

Field translate(const Field& f, std::span<const int> k, int l) {
  const TorusSpec& spec = f.spec();
  if (int(k.size()) != spec.d)
    throw ConfigError("translate: shift vector has wrong dimension");
  const int nodes_per_unit = spec.m / spec.N;
  std::array<int, 3> shift{0, 0, 0};
  for (int i = 0; i < spec.d; ++i) {
    if (k[i] < -spec.N || k[i] > spec.N)
      throw ConfigError("translate: components of k must lie within [-N, N]");
    long s = long(k[i]) * nodes_per_unit;
    if (s * spec.N != long(k[i]) * spec.m)
      throw MisalignmentError("translate: shift is not an integer number of nodes");
    shift[i] = int(((s % spec.m) + spec.m) % spec.m);
  }

  Field out(spec);
  const int m = spec.m;
  if (spec.d == 1) {
    for (int j = 0; j < m; ++j) out[j] = f[std::size_t((j + shift[0]) % m)] + l;
  } else if (spec.d == 2) {
    for (int j0 = 0; j0 < m; ++j0) {
      const int s0 = (j0 + shift[0]) % m;
      for (int j1 = 0; j1 < m; ++j1) {
        out[std::size_t(j0) * m + j1] =
            f[std::size_t(s0) * m + (j1 + shift[1]) % m] + l;
      }
    }
  } else {
    for (int j0 = 0; j0 < m; ++j0) {
      const int s0 = (j0 + shift[0]) % m;
      for (int j1 = 0; j1 < m; ++j1) {
        const int s1 = (j1 + shift[1]) % m;
        for (int j2 = 0; j2 < m; ++j2) {
          out[(std::size_t(j0) * m + j1) * m + j2] =
              f[(std::size_t(s0) * m + s1) * m + (j2 + shift[2]) % m] + l;
        }
      }
    }
  }
  return out;
}

std::vector<Field> gradient(const Field& f) {
  const TorusSpec& spec = f.spec();
  SpectralField fh = forward(f);
  std::vector<Field> out;
  out.reserve(std::size_t(spec.d));
  for (int axis = 0; axis < spec.d; ++axis) {
    SpectralField dh(spec);
    for (std::size_t i = 0; i < fh.size(); ++i) {
      const auto q = fh.freq_at(i);
      if (q[axis] == -spec.m / 2) continue;  // Nyquist row of odd derivatives
      const double xi = kTwoPi * double(q[axis]) / double(spec.N);
      dh[i] = std::complex<double>(0.0, xi) * fh[i];
    }
    out.push_back(inverse(dh));
  }
  return out;
}

double l2_inner(const Field& a, const Field& b) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  double hd = 1.0;
  for (int i = 0; i < a.spec().d; ++i) hd *= a.spec().spacing();
  return acc.value() * hd;
}

}  // namespace planecell
