#include "edyn/sde/walkers.hpp"

#include "edyn/sde/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace edyn::sde {

using geometry::ConfigurationSpace;
using geometry::GridField;
using geometry::GridSpec;

namespace {

// Displacement of one walker from x for the given stream. Writes the raw
// step into dx (length n); grad is scratch of length n.
void step_displacement(const ConfigurationSpace& cs, std::span<const double> x, const DriftPotential& phi,
                       const SimParams& p, const StepOptions& opts, WalkerStream& rng, std::span<double> grad,
                       std::span<double> dx) {
  const int d = cs.chart_dim();
  if (phi.is_zero())
    std::fill(grad.begin(), grad.end(), 0.0);
  else
    phi.gradient(x, grad);
  const double sdt = std::sqrt(p.eta * p.dt);
  for (int i = 0; i < cs.particles(); ++i) {
    const SmallVec xi = cs.particle_point(x, i);
    const auto g = geometry::particle_geometry(cs, xi, i, opts.christoffel_drift);
    const SmallMat minv = g.h_inv / cs.mass(i);
    const int o = i * d;
    SmallVec b(d);
    for (int a = 0; a < d; ++a) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += p.eta * minv(a, c) * grad[static_cast<std::size_t>(o + c)];
      if (opts.christoffel_drift)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) s -= 0.5 * p.eta * minv(c, e) * g.gamma(a, c, e);
      b[a] = s;
    }
    SmallMat L;
    if (!geometry::small_cholesky(minv, L))
      throw ConditioningError("inverse mass block of particle " + std::to_string(i) + " is not positive-definite", i);
    double z[kMaxChartDim];
    for (int a = 0; a < d; ++a) z[a] = rng.normal();
    for (int a = 0; a < d; ++a) {
      double w = 0.0;
      for (int c = 0; c <= a; ++c) w += L(a, c) * z[c];
      dx[static_cast<std::size_t>(o + a)] = b[a] * p.dt + sdt * w;
    }
  }
}

// log of the scalar transition density for a coordinate displacement dx
// from x (no sqrt(M(x')) factor).
double log_scalar_density(const ConfigurationSpace& cs, std::span<const double> x, const Vec& dx,
                          const DriftPotential& phi, const SimParams& p, bool correction, double* dtilde_norm,
                          double* minv_norm) {
  const int n = cs.dim();
  const Mat M = geometry::mass_tensor(cs, x);
  const Mat Minv = geometry::inverse_mass(cs, x);
  Vec y = correction ? covariant_displacement(cs, x, std::span<const double>(dx.data(), static_cast<std::size_t>(n)))
                     : dx;
  if (dtilde_norm) *dtilde_norm = y.norm();
  if (minv_norm) *minv_norm = Eigen::SelfAdjointEigenSolver<Mat>(Minv, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (!phi.is_zero()) {
    Vec grad(n);
    phi.gradient(x, std::span<double>(grad.data(), static_cast<std::size_t>(n)));
    y -= p.eta * p.dt * (Minv * grad);
  }
  const double q = y.dot(M * y);
  return -q / (2.0 * p.eta * p.dt) - 0.5 * n * std::log(2.0 * std::numbers::pi * p.eta * p.dt);
}

}  // namespace

Drift drift_velocity(const ConfigurationSpace& cs, std::span<const double> x, const DriftPotential& phi,
                     const SimParams& p) {
  cs.check(x);
  const int n = cs.dim(), d = cs.chart_dim();
  Vec grad = Vec::Zero(n);
  if (!phi.is_zero()) phi.gradient(x, std::span<double>(grad.data(), static_cast<std::size_t>(n)));
  Drift out{Vec::Zero(n), Vec::Zero(n)};
  for (int i = 0; i < cs.particles(); ++i) {
    const auto g = geometry::particle_geometry(cs, cs.particle_point(x, i), i, true);
    const SmallMat minv = g.h_inv / cs.mass(i);
    const int o = i * d;
    for (int a = 0; a < d; ++a) {
      double bt = 0.0, corr = 0.0;
      for (int c = 0; c < d; ++c) bt += p.eta * minv(a, c) * grad[o + c];
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) corr += minv(c, e) * g.gamma(a, c, e);
      out.btilde[o + a] = bt;
      out.b[o + a] = bt - 0.5 * p.eta * corr;
    }
  }
  return out;
}

void sample_step(WalkerEnsemble& ens, const ConfigurationSpace& cs, const DriftPotential& phi, const SimParams& p,
                 const StepOptions& opts) {
  p.validate();
  if (ens.dim != cs.dim()) throw std::invalid_argument("ensemble dimension does not match configuration space");
  const auto W = static_cast<std::ptrdiff_t>(ens.count());
  const auto n = static_cast<std::size_t>(cs.dim());
  std::exception_ptr failure;
#pragma omp parallel
  {
    std::vector<double> grad(n), dx(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < W; ++k) {
      try {
        auto x = ens.walker(static_cast<std::size_t>(k));
        WalkerStream rng(ens.seed, static_cast<std::uint64_t>(k), ens.steps);
        step_displacement(cs, x, phi, p, opts, rng, grad, dx);
        for (std::size_t A = 0; A < n; ++A) x[A] += dx[A];
        cs.fold(x);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  ens.time += p.dt;
  ++ens.steps;
}

Vec draw_displacement(const ConfigurationSpace& cs, std::span<const double> x, const DriftPotential& phi,
                      const SimParams& p, std::uint64_t seed, std::uint64_t stream, std::uint64_t step,
                      const StepOptions& opts) {
  cs.check(x);
  const auto n = static_cast<std::size_t>(cs.dim());
  std::vector<double> grad(n);
  Vec dx(cs.dim());
  WalkerStream rng(seed, stream, step);
  step_displacement(cs, x, phi, p, opts, rng, grad, std::span<double>(dx.data(), n));
  return dx;
}

Vec covariant_displacement(const ConfigurationSpace& cs, std::span<const double> x, std::span<const double> dx) {
  const int n = cs.dim();
  if (static_cast<int>(dx.size()) != n) throw std::invalid_argument("displacement has the wrong dimension");
  const geometry::Connection G = geometry::christoffel(cs, x);
  Vec out(n);
  for (int A = 0; A < n; ++A) {
    double q = 0.0;
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C) q += G(A, B, C) * dx[static_cast<std::size_t>(B)] * dx[static_cast<std::size_t>(C)];
    out[A] = dx[static_cast<std::size_t>(A)] + 0.5 * q;
  }
  return out;
}

TransitionDensity transition_density(const ConfigurationSpace& cs, std::span<const double> x_from,
                                     std::span<const double> x_to, const DriftPotential& phi, const SimParams& p,
                                     const TransitionOptions& opts) {
  p.validate();
  cs.check(x_from);
  cs.check(x_to);
  const Vec dx = cs.displacement(x_from, x_to);
  double dnorm = 0.0, mnorm = 0.0;
  const double lp = log_scalar_density(cs, x_from, dx, phi, p, opts.covariant_correction, &dnorm, &mnorm);
  TransitionDensity out;
  out.scalar = std::exp(lp);
  out.value = geometry::sqrt_det_mass(cs, x_to) * out.scalar;
  out.outside_short_step = dnorm > 6.0 * std::sqrt(p.eta * p.dt * mnorm);
  return out;
}

DensityAccumulator::DensityAccumulator(const ConfigurationSpace& cs, GridSpec grid)
    : grid_(std::move(grid)), sqrt_det_(grid_.size()), counts_(grid_.size(), 0.0) {
  if (grid_.dim() != cs.dim()) throw std::invalid_argument("grid dimension does not match configuration space");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const Vec x = grid_.node(i);
    sqrt_det_[i] = geometry::sqrt_det_mass(cs, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
}

void DensityAccumulator::add(const WalkerEnsemble& ens) {
  if (ens.count() == 0) throw std::invalid_argument("cannot estimate a density from an empty ensemble");
  if (ens.dim != grid_.dim()) throw std::invalid_argument("ensemble dimension does not match grid");
  for (std::size_t k = 0; k < ens.count(); ++k) {
    const auto cell = grid_.locate(ens.walker(k));
    if (cell)
      counts_[*cell] += 1.0;
    else
      ++dropped_;
  }
  ++snapshots_;
}

GridField DensityAccumulator::density() const {
  if (snapshots_ == 0) throw std::logic_error("density accumulator is empty");
  GridField rho(grid_, geometry::FieldRole::density);
  const double dV = grid_.cell_volume();
  double mass = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    rho[i] = counts_[i] / (dV * sqrt_det_[i]);
    mass += sqrt_det_[i] * rho[i] * dV;
  }
  if (!(mass > 0.0)) throw std::runtime_error("no walkers fell inside the density grid");
  for (double& v : rho.values) v /= mass;
  return rho;
}

GridField estimate_density(const WalkerEnsemble& ens, const ConfigurationSpace& cs, const GridSpec& grid) {
  DensityAccumulator acc(cs, grid);
  acc.add(ens);
  GridField rho = acc.density();
  rho.time = ens.time;
  return rho;
}

InformationMetric information_metric_mc(const ConfigurationSpace& cs, std::span<const double> x,
                                        const DriftPotential& phi, const SimParams& p, std::size_t samples) {
  p.validate();
  cs.check(x);
  if (samples < 2) throw std::invalid_argument("information metric needs at least two samples");
  const int n = cs.dim();
  const Mat Minv = geometry::inverse_mass(cs, x);
  std::vector<double> eps(static_cast<std::size_t>(n));
  for (int A = 0; A < n; ++A) eps[static_cast<std::size_t>(A)] = 1e-3 * std::sqrt(p.eta * p.dt * Minv(A, A));

  Mat sum = Mat::Zero(n, n), sum2 = Mat::Zero(n, n);
  const Vec x0 = Eigen::Map<const Vec>(x.data(), n);
  Vec score(n), xs(n);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec dx = draw_displacement(cs, x, phi, p, p.seed, s, 0);
    const Vec xp = x0 + dx;
    for (int A = 0; A < n; ++A) {
      const double e = eps[static_cast<std::size_t>(A)];
      double lp[2];
      for (int sgn = 0; sgn < 2; ++sgn) {
        xs = x0;
        xs[A] += sgn == 0 ? e : -e;
        const Vec d = xp - xs;
        lp[sgn] = log_scalar_density(cs, std::span<const double>(xs.data(), static_cast<std::size_t>(n)), d, phi, p,
                                     true, nullptr, nullptr);
      }
      score[A] = (lp[0] - lp[1]) / (2.0 * e);
    }
    const Mat outer = score * score.transpose();
    sum += outer;
    sum2 += outer.cwiseProduct(outer);
  }
  const double N = static_cast<double>(samples);
  InformationMetric out;
  out.samples = samples;
  out.g = sum / N;
  const Mat var = (sum2 / N - out.g.cwiseProduct(out.g)).cwiseMax(0.0) * (N / (N - 1.0));
  out.standard_error = (var / N).cwiseSqrt();
  out.wide_error = samples < 100000;
  return out;
}

WalkerEnsemble replicate(const ConfigurationSpace& cs, std::span<const double> x, std::size_t count,
                         std::uint64_t seed) {
  cs.check(x);
  WalkerEnsemble ens;
  ens.dim = cs.dim();
  ens.seed = seed;
  ens.chart = cs.chart().name();
  ens.positions.resize(count * static_cast<std::size_t>(ens.dim));
  for (std::size_t k = 0; k < count; ++k) std::copy(x.begin(), x.end(), ens.walker(k).begin());
  return ens;
}

namespace {

std::vector<SmallMat> blob_factors(const ConfigurationSpace& cs, std::span<const double> center) {
  std::vector<SmallMat> L;
  for (int i = 0; i < cs.particles(); ++i) {
    const auto g = geometry::particle_geometry(cs, cs.particle_point(center, i), i, false);
    L.emplace_back(Eigen::LLT<SmallMat>(g.h_inv).matrixL());
  }
  return L;
}

}  // namespace

WalkerEnsemble gaussian_blob(const ConfigurationSpace& cs, std::span<const double> center, double sigma,
                             std::size_t count, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw std::invalid_argument("blob width must be positive");
  WalkerEnsemble ens = replicate(cs, center, count, seed);
  const auto L = blob_factors(cs, center);
  const int d = cs.chart_dim();
  for (std::size_t k = 0; k < count; ++k) {
    WalkerStream rng(seed, k, kInitialStream);
    auto x = ens.walker(k);
    for (int i = 0; i < cs.particles(); ++i) {
      SmallVec z(d);
      for (int a = 0; a < d; ++a) z[a] = rng.normal();
      const SmallVec w = sigma * (L[static_cast<std::size_t>(i)] * z);
      for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(i * d + a)] += w[a];
    }
    cs.fold(x);
  }
  return ens;
}

GridField gaussian_blob_density(const ConfigurationSpace& cs, const GridSpec& grid, std::span<const double> center,
                                double sigma, int subsamples) {
  cs.check(center);
  if (grid.dim() != cs.dim()) throw std::invalid_argument("grid dimension does not match configuration space");
  if (subsamples < 1) throw std::invalid_argument("need at least one subsample per axis");
  const int n = cs.dim(), d = cs.chart_dim();
  const auto L = blob_factors(cs, center);
  // Per-particle precision of the coordinate Gaussian.
  std::vector<SmallMat> prec;
  double log_norm = 0.0;
  for (int i = 0; i < cs.particles(); ++i) {
    const SmallMat& Li = L[static_cast<std::size_t>(i)];
    const SmallMat C = sigma * sigma * Li * Li.transpose();
    prec.emplace_back(C.inverse());
    log_norm -= 0.5 * std::log(std::pow(2.0 * std::numbers::pi, d) * C.determinant());
  }
  // Images: identity, periodic shifts, and single reflections at walls.
  struct Image {
    double scale, shift;
  };
  std::vector<std::vector<Image>> images(static_cast<std::size_t>(n));
  for (int A = 0; A < n; ++A) {
    const auto& ax = cs.chart().axis(A % d);
    auto& im = images[static_cast<std::size_t>(A)];
    im.push_back({1.0, 0.0});
    if (ax.topology == geometry::Topology::periodic) {
      im.push_back({1.0, ax.period()});
      im.push_back({1.0, -ax.period()});
    } else if (ax.finite()) {
      im.push_back({-1.0, 2.0 * ax.lo()});
      im.push_back({-1.0, 2.0 * ax.hi()});
    }
  }
  auto pdf = [&](const Vec& y) {
    double lp = log_norm;
    for (int i = 0; i < cs.particles(); ++i) {
      SmallVec r(d);
      for (int a = 0; a < d; ++a) r[a] = y[i * d + a] - center[static_cast<std::size_t>(i * d + a)];
      lp -= 0.5 * r.dot(prec[static_cast<std::size_t>(i)] * r);
    }
    return std::exp(lp);
  };
  auto summed = [&](const Vec& x) {
    double total = 0.0;
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    while (true) {
      Vec y(n);
      for (int A = 0; A < n; ++A) {
        const Image& im = images[static_cast<std::size_t>(A)][pick[static_cast<std::size_t>(A)]];
        y[A] = im.scale * x[A] + im.shift;
      }
      total += pdf(y);
      int A = 0;
      while (A < n && ++pick[static_cast<std::size_t>(A)] == images[static_cast<std::size_t>(A)].size())
        pick[static_cast<std::size_t>(A++)] = 0;
      if (A == n) break;
    }
    return total;
  };

  GridField rho(grid, geometry::FieldRole::density);
  const double dV = grid.cell_volume();
  double mass = 0.0;
  const int sub_total = static_cast<int>(std::pow(subsamples, n));
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vec xc = grid.node(c);
    double avg = 0.0;
    for (int s = 0; s < sub_total; ++s) {
      Vec x = xc;
      int rem = s;
      for (int A = 0; A < n; ++A) {
        const int j = rem % subsamples;
        rem /= subsamples;
        x[A] += ((j + 0.5) / subsamples - 0.5) * grid.axis(A).spacing;
      }
      avg += summed(x);
    }
    avg /= sub_total;
    const double sq = geometry::sqrt_det_mass(cs, std::span<const double>(xc.data(), static_cast<std::size_t>(n)));
    rho[c] = avg / sq;
    mass += avg * dV;
  }
  for (double& v : rho.values) v /= mass;
  return rho;
}

WalkerEnsemble uniform_measure(const ConfigurationSpace& cs, std::size_t count, std::uint64_t seed) {
  // sqrt(M) factorises over particles, so each particle is drawn
  // independently, uniform with respect to sqrt(h) on its chart.
  const auto& chart = cs.chart();
  const int d = chart.dim();
  SmallVec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    const auto& ax = chart.axis(a);
    if (!ax.finite()) throw std::invalid_argument("uniform sampling needs a bounded domain");
    lo[a] = ax.lo();
    hi[a] = ax.hi();
  }
  auto sqrt_h = [&](const SmallVec& x) { return std::sqrt(chart.metric(x).determinant()); };
  // Envelope: largest sqrt(h) on a probe lattice, with headroom.
  const int probes = d == 1 ? 4096 : (d == 2 ? 256 : 64);
  double bound = 0.0;
  const auto total = static_cast<std::size_t>(std::pow(probes + 1, d));
  SmallVec x(d);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rem = s;
    for (int a = 0; a < d; ++a) {
      const auto j = static_cast<double>(rem % static_cast<std::size_t>(probes + 1));
      rem /= static_cast<std::size_t>(probes + 1);
      x[a] = lo[a] + (hi[a] - lo[a]) * j / probes;
    }
    bound = std::max(bound, sqrt_h(x));
  }
  bound *= 1.05;

  WalkerEnsemble ens;
  ens.dim = cs.dim();
  ens.seed = seed;
  ens.chart = chart.name();
  ens.positions.resize(count * static_cast<std::size_t>(ens.dim));
  for (std::size_t k = 0; k < count; ++k) {
    WalkerStream rng(seed, k, kInitialStream);
    auto w = ens.walker(k);
    for (int i = 0; i < cs.particles(); ++i) {
      for (int attempt = 0;; ++attempt) {
        if (attempt > 100000) throw std::runtime_error("uniform sampling failed to accept a point");
        for (int a = 0; a < d; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * (1.0 - rng.uniform());
        if (rng.uniform() * bound <= sqrt_h(x)) break;
      }
      for (int a = 0; a < d; ++a) w[static_cast<std::size_t>(i * d + a)] = x[a];
    }
  }
  return ens;
}

DisplacementMoments displacement_moments(const ConfigurationSpace& cs, const WalkerEnsemble& before,
                                         const WalkerEnsemble& after) {
  if (before.count() != after.count() || before.dim != after.dim || before.dim != cs.dim())
    throw std::invalid_argument("ensembles do not hold the same walkers");
  const int n = cs.dim();
  const std::size_t W = before.count();
  if (W < 2) throw std::invalid_argument("need at least two walkers");
  Vec mean = Vec::Zero(n);
  Mat m2 = Mat::Zero(n, n);
  for (std::size_t k = 0; k < W; ++k) {
    const Vec dx = cs.displacement(before.walker(k), after.walker(k));
    mean += dx;
    m2 += dx * dx.transpose();
  }
  mean /= static_cast<double>(W);
  DisplacementMoments out;
  out.mean = mean;
  out.covariance = (m2 - static_cast<double>(W) * mean * mean.transpose()) / static_cast<double>(W - 1);
  return out;
}

}  // namespace edyn::sde
