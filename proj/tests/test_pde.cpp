#include "doctest.h"

#include "edyn/pde/fokker_planck.hpp"
#include "edyn/pde/functionals.hpp"
#include "edyn/pde/hamilton_jacobi.hpp"
#include "edyn/pde/velocities.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace edyn;
using namespace edyn::geometry;
using namespace edyn::pde;

namespace {

constexpr double pi = std::numbers::pi;

SimParams params(double eta, double dt, double xi = 0.0) {
  SimParams p;
  p.eta = eta;
  p.dt = dt;
  p.xi = xi;
  return p;
}

GridField normalised(const GridGeometry& geo, GridField f) {
  const double m = geo.integrate(f.values);
  for (double& v : f.values) v /= m;
  f.role = FieldRole::density;
  return f;
}

// Gaussian in coordinate x on a 1D grid, centred at c.
GridField gaussian_1d(const GridGeometry& geo, double c, double sigma) {
  GridField f(geo.grid(), FieldRole::density);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const double x = geo.grid().node(i)[0];
    f[i] = std::exp(-(x - c) * (x - c) / (2 * sigma * sigma));
  }
  return normalised(geo, f);
}

double variance_1d(const GridGeometry& geo, const GridField& rho, double c) {
  std::vector<double> w(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const double x = geo.grid().node(i)[0] - c;
    w[i] = rho[i] * x * x;
  }
  return geo.integrate(w);
}

GridField smooth_sphere_density(const GridGeometry& geo) {
  GridField f(geo.grid(), FieldRole::density);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const Vec x = geo.grid().node(i);
    f[i] = 1.0 + 0.4 * std::cos(x[0]) * std::sin(x[1]) + 0.2 * std::cos(2 * x[1]) * std::sin(x[0]);
  }
  return normalised(geo, f);
}

ConfigurationSpace line(double m, double half_width) {
  return ConfigurationSpace(flat_chart({Axis{-half_width, half_width, Topology::bounded, 0.0}}), {m});
}

}  // namespace

TEST_CASE("Fokker-Planck spreads a Gaussian at the heat-kernel rate") {
  ConfigurationSpace circle(circle_chart(), {1.0});
  const double sigma0 = 0.2, T = 0.1;
  std::vector<double> err;
  for (int N : {128, 256}) {
    GridGeometry geo(circle, make_grid(circle, {N}));
    GridField rho = gaussian_1d(geo, pi, sigma0);
    const double v0 = variance_1d(geo, rho, pi);
    fp_evolve(geo, rho, Drive::diffusion(), params(1.0, 1e-4), T);
    err.push_back(std::abs((variance_1d(geo, rho, pi) - v0) / T - 1.0));
    CHECK(rho.time == doctest::Approx(T));
  }
  CHECK(err[1] < 0.01);
  CHECK(err[1] <= err[0] + 1e-12);
}

TEST_CASE("uniform density is stationary under pure diffusion") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry geo(s, make_grid(s, {16, 32}));
  GridField rho = normalised(geo, GridField(geo.grid(), FieldRole::density, 1.0));
  const GridField start = rho;
  const double dt = 0.5 * fp_stable_dt(geo, Drive::diffusion(), params(1.0, 1.0));
  for (int k = 0; k < 10; ++k) fp_step(geo, rho, Drive::diffusion(), params(1.0, dt));
  for (std::size_t i = 0; i < geo.size(); ++i) CHECK(std::abs(rho[i] - start[i]) < 1e-10 * start[i]);
}

TEST_CASE("Fokker-Planck conserves mass and reports clipping") {
  ConfigurationSpace s(sphere_chart(), {2.0});
  GridGeometry geo(s, make_grid(s, {24, 48}));
  GridField rho = smooth_sphere_density(geo);
  std::vector<double> phi(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) phi[i] = 0.3 * std::cos(geo.grid().node(i)[0]);
  const Drive drive = Drive::potential(phi);
  const SimParams p = params(1.0, 0.5 * fp_stable_dt(geo, drive, params(1.0, 1.0)));
  for (int k = 0; k < 50; ++k) {
    const double before = geo.integrate(rho.values);
    const auto rep = fp_step(geo, rho, drive, p);
    CHECK(rep.clipped_mass == 0.0);
    CHECK(std::abs(geo.integrate(rho.values) - before) < 1e-12);
  }
  for (double v : rho.values) CHECK(v >= 0.0);
}

TEST_CASE("an unstable step size is refused with a suggestion") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry geo(s, make_grid(s, {16, 32}));
  GridField rho = smooth_sphere_density(geo);
  const double limit = fp_stable_dt(geo, Drive::diffusion(), params(1.0, 1.0));
  try {
    fp_step(geo, rho, Drive::diffusion(), params(1.0, 2 * limit));
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.suggested_dt() <= limit);
    CHECK(e.suggested_dt() > 0.5 * limit);
  }
  // The driver substeps instead.
  CHECK_NOTHROW(fp_evolve(geo, rho, Drive::diffusion(), params(1.0, 2 * limit), 4 * limit));
}

TEST_CASE("drift-potential and phase drives agree to discretisation order") {
  const SimParams p = params(1.0, 1e-5);
  std::vector<double> diff;
  for (int N : {64, 128}) {
    ConfigurationSpace c(circle_chart(), {1.0});
    GridGeometry geo(c, make_grid(c, {N}));
    GridField rho(geo.grid(), FieldRole::density);
    std::vector<double> phi(geo.size()), Phi(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) {
      const double x = geo.grid().node(i)[0];
      rho[i] = 1.0 + 0.5 * std::cos(x);
      phi[i] = 0.3 * std::sin(x);
    }
    rho = normalised(geo, rho);
    for (std::size_t i = 0; i < geo.size(); ++i) Phi[i] = p.eta * phi[i] - p.eta * 0.5 * std::log(rho[i]);
    GridField a = rho, b = rho;
    fp_step(geo, a, Drive::potential(phi), p);
    fp_step(geo, b, Drive::phase(Phi), p);
    double d = 0;
    for (std::size_t i = 0; i < geo.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]) / p.dt);
    diff.push_back(d);
  }
  CHECK(diff[1] < diff[0] / 3.0);
}

TEST_CASE("osmotic and current velocities") {
  const SimParams p = params(1.0, 1e-3);
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry sg(s, make_grid(s, {16, 32}));
  const auto u0 = osmotic_velocity(sg, normalised(sg, GridField(sg.grid(), FieldRole::density, 1.0)), p);
  for (double v : u0.values) CHECK(v == 0.0);

  const double m = 2.0, sigma = 0.5;
  ConfigurationSpace l = line(m, 4.0);
  GridGeometry geo(l, make_grid(l, {400}));
  const GridField rho = gaussian_1d(geo, 0.0, sigma);
  const auto u = osmotic_velocity(geo, rho, p);
  CHECK(u.masked.empty());
  for (std::size_t i = 1; i + 1 < geo.size(); ++i) {
    const double x = geo.grid().node(i)[0];
    CHECK(u(i, 0) == doctest::Approx(p.eta / (2 * m) * x / (sigma * sigma)).epsilon(1e-10));
  }

  // v = btilde + u when Phi = eta phi - eta log rho^(1/2).
  GridField phi(geo.grid(), FieldRole::drift_potential), Phi(geo.grid(), FieldRole::phase);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const double x = geo.grid().node(i)[0];
    phi[i] = std::sin(x) + 0.1 * x * x;
    Phi[i] = p.eta * phi[i] - p.eta * 0.5 * std::log(rho[i]);
  }
  const auto v = current_velocity(geo, Phi), bt = btilde(geo, phi, p);
  const double h = geo.grid().axis(0).spacing;
  for (std::size_t i = 0; i < geo.size(); ++i) CHECK(std::abs(v(i, 0) - bt(i, 0) - u(i, 0)) < 10 * h * h);

  GridField holey = rho;
  holey[200] = 0.0;
  const auto um = osmotic_velocity(geo, holey, p);
  CHECK(um.masked.size() == 3);
}

TEST_CASE("Fisher information") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry sg(s, make_grid(s, {16, 32}));
  const auto f0 = fisher_information(sg, normalised(sg, GridField(sg.grid(), FieldRole::density, 1.0)));
  CHECK(f0.I.cwiseAbs().maxCoeff() < 1e-20);

  const double sigma = 0.3;
  ConfigurationSpace l = line(1.0, 8 * sigma);
  GridGeometry geo(l, make_grid(l, {200}));
  const auto f1 = fisher_information(geo, gaussian_1d(geo, 0.0, sigma));
  CHECK(f1.I(0, 0) == doctest::Approx(1.0 / (sigma * sigma)).epsilon(0.005));

  ConfigurationSpace plane(flat_chart({Axis{-3, 3, Topology::bounded, 0}, Axis{-3, 3, Topology::bounded, 0}}), {1.0});
  GridGeometry pg(plane, make_grid(plane, {96, 96}));
  GridField prod(pg.grid(), FieldRole::density);
  for (std::size_t i = 0; i < pg.size(); ++i) {
    const Vec x = pg.grid().node(i);
    prod[i] = std::exp(-x[0] * x[0] / (2 * 0.36) - (x[1] - 0.2) * (x[1] - 0.2) / (2 * 0.25));
  }
  const auto f2 = fisher_information(pg, normalised(pg, prod));
  CHECK(std::abs(f2.I(0, 1)) < 1e-8);
  CHECK(f2.I(0, 0) == doctest::Approx(1 / 0.36).epsilon(0.01));
  CHECK(f2.I(1, 1) == doctest::Approx(1 / 0.25).epsilon(0.01));
  CHECK(f2.I(0, 1) == f2.I(1, 0));
}

TEST_CASE("F functional and its gradient") {
  ConfigurationSpace s(sphere_chart(), {1.5});
  GridGeometry geo(s, make_grid(s, {16, 32}));
  const GridField uni = normalised(geo, GridField(geo.grid(), FieldRole::density, 1.0));
  {
    const SimParams p = params(1.0, 1e-3, 0.3);
    CHECK(std::abs(F_functional(geo, uni, {}, p)) < 1e-14);
    for (double v : dF_drho(geo, uni, {}, p).values) CHECK(std::abs(v) < 1e-10);
  }
  {
    const SimParams p = params(1.0, 1e-3, 0.0);
    Potentials pot{std::vector<double>(geo.size(), 2.5), {}};
    const GridField rho = smooth_sphere_density(geo);
    CHECK(F_functional(geo, rho, pot, p) == doctest::Approx(2.5).epsilon(1e-13));
    for (double v : dF_drho(geo, rho, pot, p).values) CHECK(v == 2.5);
  }
  {
    const SimParams p = params(1.0, 1e-3, 0.125);
    const GridField rho = smooth_sphere_density(geo);
    Potentials pot{harmonic_potential(geo, 1.3, std::vector<double>{1.0, 2.0}).values,
                   curvature_potential(geo, 0.1).values};
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> a(4);
      for (auto& v : a) v = std::normal_distribution<double>()(gen);
      std::vector<double> d(geo.size());
      for (std::size_t i = 0; i < geo.size(); ++i) {
        const Vec x = geo.grid().node(i);
        d[i] = a[0] * std::cos(x[0]) + a[1] * std::sin(x[1]) * std::sin(x[0]) + a[2] * std::cos(2 * x[1]) +
               a[3] * std::cos(x[0]) * std::cos(x[1]);
      }
      const double mean = geo.integrate(d) / geo.integrate(std::vector<double>(geo.size(), 1.0));
      for (double& v : d) v -= mean;
      CHECK(std::abs(geo.integrate(d)) < 1e-12);
      const double eps = 1e-6;
      GridField plus = rho, minus = rho;
      for (std::size_t i = 0; i < geo.size(); ++i) {
        plus[i] += eps * d[i];
        minus[i] -= eps * d[i];
      }
      const double fd = (F_functional(geo, plus, pot, p) - F_functional(geo, minus, pot, p)) / (2 * eps);
      const GridField g = dF_drho(geo, rho, pot, p);
      std::vector<double> gd(geo.size());
      for (std::size_t i = 0; i < geo.size(); ++i) gd[i] = g[i] * d[i];
      CHECK(fd == doctest::Approx(geo.integrate(gd)).epsilon(1e-5));
    }
  }
}

TEST_CASE("Hamiltonian kinetic term") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry sg(s, make_grid(s, {16, 32}));
  const GridField rho = smooth_sphere_density(sg);
  CHECK(hamiltonian(sg, rho, GridField(sg.grid(), FieldRole::phase, 4.2), {}, params(1, 1e-3, 0.0)) == 0.0);

  const double m = 1.7, pm = 0.8, sigma = 0.4;
  ConfigurationSpace l = line(m, 10 * sigma);
  GridGeometry geo(l, make_grid(l, {300}));
  const GridField g = gaussian_1d(geo, 0.0, sigma);
  GridField Phi(geo.grid(), FieldRole::phase);
  for (std::size_t i = 0; i < geo.size(); ++i) Phi[i] = pm * geo.grid().node(i)[0];
  CHECK(kinetic_energy(geo, g, Phi) == doctest::Approx(pm * pm / (2 * m)).epsilon(1e-12));
}

TEST_CASE("coupled stepping: fixed point, gauge and mass") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry geo(s, make_grid(s, {16, 32}));
  const SimParams p = params(1.0, 1e-4, 0.125);
  {
    GridField rho = normalised(geo, GridField(geo.grid(), FieldRole::density, 1.0));
    GridField Phi(geo.grid(), FieldRole::phase, 0.7);
    const GridField r0 = rho;
    coupled_step(geo, rho, Phi, {}, p);
    for (std::size_t i = 0; i < geo.size(); ++i) {
      CHECK(std::abs(rho[i] - r0[i]) < 1e-15);
      CHECK(std::abs(Phi[i] - 0.7) < 1e-12);
    }
    GridField Phi2 = Phi;
    hj_step(geo, Phi2, rho, {}, p);
    for (std::size_t i = 0; i < geo.size(); ++i) CHECK(std::abs(Phi2[i] - 0.7) < 1e-12);
  }
  {
    GridField rho_a = smooth_sphere_density(geo), rho_b = rho_a;
    GridField Phi_a(geo.grid(), FieldRole::phase);
    for (std::size_t i = 0; i < geo.size(); ++i) Phi_a[i] = 0.05 * std::cos(geo.grid().node(i)[1]);
    GridField Phi_b = Phi_a;
    for (double& v : Phi_b.values) v += 3.0;
    const double mass = geo.integrate(rho_a.values);
    for (int k = 0; k < 20; ++k) {
      coupled_step(geo, rho_a, Phi_a, {}, p);
      coupled_step(geo, rho_b, Phi_b, {}, p);
    }
    CHECK(std::abs(geo.integrate(rho_a.values) - mass) < 1e-12);
    for (std::size_t i = 0; i < geo.size(); ++i) CHECK(std::abs(rho_a[i] - rho_b[i]) < 1e-12);
    const auto va = current_velocity(geo, Phi_a), vb = current_velocity(geo, Phi_b);
    for (std::size_t i = 0; i < va.values.size(); ++i) CHECK(std::abs(va.values[i] - vb.values[i]) < 1e-9);
  }
}

TEST_CASE("coupled stepping conserves the Hamiltonian at second order") {
  ConfigurationSpace c(circle_chart(), {1.0});
  GridGeometry geo(c, make_grid(c, {64}));
  SimParams p = params(1.0, 0.0, 0.125);
  auto run = [&](double dt, int steps) {
    GridField rho(geo.grid(), FieldRole::density), Phi(geo.grid(), FieldRole::phase);
    for (std::size_t i = 0; i < geo.size(); ++i) {
      const double x = geo.grid().node(i)[0];
      rho[i] = 1.0 + 0.5 * std::cos(x);
      Phi[i] = 0.2 * std::sin(x);
    }
    rho = normalised(geo, rho);
    p.dt = dt;
    const double H0 = hamiltonian(geo, rho, Phi, {}, p);
    double worst = 0;
    for (int k = 0; k < steps; ++k) {
      coupled_step(geo, rho, Phi, {}, p);
      worst = std::max(worst, std::abs(hamiltonian(geo, rho, Phi, {}, p) - H0) / std::abs(H0));
    }
    return worst;
  };
  const double d1 = run(2e-3, 500), d2 = run(1e-3, 1000);
  CHECK(d1 < 1e-3);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.25));
}
