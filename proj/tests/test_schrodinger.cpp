#include "doctest.h"

#include "edyn/pde/velocities.hpp"
#include "edyn/schrodinger/wave.hpp"

#include <cmath>
#include <numbers>

using namespace edyn;
using namespace edyn::geometry;
using namespace edyn::schrodinger;

namespace {

constexpr double pi = std::numbers::pi;

SimParams quantum(double hbar, double dt) {
  SimParams p;
  p.eta = hbar;
  p.k = 1.0;
  p.dt = dt;
  p.xi = p.xi_quantum();
  return p;
}

void normalise(const GridGeometry& geo, WaveField& psi) {
  const double s = std::sqrt(norm(geo, psi));
  for (auto& v : psi.values) v /= s;
}

WaveField sphere_packet(const GridGeometry& geo) {
  WaveField psi(geo.grid());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const Vec x = geo.grid().node(i);
    const double r2 = std::pow(x[0] - 1.2, 2) + std::pow(std::remainder(x[1] - 2.0, 2 * pi), 2);
    psi[i] = std::exp(-r2 / 0.2) * std::polar(1.0, 2.0 * std::sin(x[1])) + 0.05;
  }
  normalise(geo, psi);
  return psi;
}

}  // namespace

TEST_CASE("assemble and split the Madelung pair") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry geo(s, make_grid(s, {16, 32}));
  const SimParams p = quantum(0.3, 1e-3);
  const double vol = geo.integrate(std::vector<double>(geo.size(), 1.0));
  GridField uni(geo.grid(), FieldRole::density, 1.0 / vol), zero(geo.grid(), FieldRole::phase, 0.0);
  const WaveField u = assemble_wavefunction(uni, zero, p);
  for (const auto& v : u.values) CHECK(std::abs(v - std::sqrt(1.0 / vol)) < 1e-15);

  GridField rho(geo.grid(), FieldRole::density), Phi(geo.grid(), FieldRole::phase);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const Vec x = geo.grid().node(i);
    rho[i] = (1.0 + 0.5 * std::cos(x[0]) * std::sin(x[1])) / vol;
    Phi[i] = 0.6 * std::cos(x[0]) + 0.4 * std::sin(x[1]) + 5.0;
  }
  const auto split = madelung_split(assemble_wavefunction(rho, Phi, p), p);
  CHECK_FALSE(split.ambiguous);
  const double shift = split.Phi[0] - Phi[0];
  CHECK(std::abs(std::remainder(shift, 2 * pi * p.hbar())) < 1e-10);
  for (std::size_t i = 0; i < geo.size(); ++i) {
    CHECK(std::abs(split.rho[i] - rho[i]) < 1e-14);
    CHECK(std::abs(split.Phi[i] - Phi[i] - shift) < 1e-10);
  }
  CHECK(split.winding == std::vector<long>{0, 0});
}

TEST_CASE("plane wave phase and velocity") {
  const double m = 2.0, hbar = 0.5, pm = 3 * hbar;
  ConfigurationSpace c(circle_chart(), {m});
  GridGeometry geo(c, make_grid(c, {128}));
  const SimParams p = quantum(hbar, 1e-3);
  WaveField psi(geo.grid());
  for (std::size_t i = 0; i < geo.size(); ++i) psi[i] = std::polar(1.0, pm * geo.grid().node(i)[0] / hbar);
  const auto split = madelung_split(psi, p);
  CHECK(split.winding[0] == 3);
  const auto v = pde::current_velocity(geo, split.Phi);
  const double h = geo.grid().axis(0).spacing;
  // Centred differences of a linear phase are exact away from the cut.
  int checked = 0;
  for (std::size_t i = 0; i < geo.size(); ++i) {
    const std::ptrdiff_t a = geo.neighbor(i, 0, -1), b = geo.neighbor(i, 0, +1);
    if (std::abs(split.Phi[static_cast<std::size_t>(b)] - split.Phi[static_cast<std::size_t>(a)]) > 4 * pm * h) continue;
    CHECK(v(i, 0) == doctest::Approx(pm / m).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked >= 125);

  WaveField holey = psi;
  holey[10] = 0.0;
  CHECK(madelung_split(holey, p).ambiguous);
}

TEST_CASE("Crank-Nicolson is unitary and conserves energy") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry geo(s, make_grid(s, {24, 48}));
  const SimParams p = quantum(0.2, 2e-3);
  pde::Potentials pot{pde::harmonic_potential(geo, 1.0, std::vector<double>{1.5, 2.0}).values, {}};
  CrankNicolson cn(geo, pot, p);
  WaveField psi = sphere_packet(geo);
  const double E0 = cn.energy(psi);
  double worst_step = 0;
  for (int k = 0; k < 300; ++k) {
    const double before = norm(geo, psi);
    cn.step(psi);
    worst_step = std::max(worst_step, std::abs(norm(geo, psi) - before));
    CHECK(cn.last_residual() <= 1e-10);
  }
  CHECK(worst_step < 1e-11);
  CHECK(std::abs(norm(geo, psi) - 1.0) < 1e-9);
  CHECK(std::abs(cn.energy(psi) - E0) / std::abs(E0) < 1e-6);
  CHECK(psi.time == doctest::Approx(0.6));
}

TEST_CASE("l = 1 sphere mode rotates its phase at E / hbar") {
  const double m = 1.0, hbar = 0.5;
  ConfigurationSpace s(sphere_chart(), {m});
  GridGeometry geo(s, make_grid(s, {64, 64}));
  const SimParams p = quantum(hbar, 1e-3);
  WaveField psi(geo.grid());
  for (std::size_t i = 0; i < geo.size(); ++i) psi[i] = std::cos(geo.grid().node(i)[0]);
  normalise(geo, psi);
  const WaveField psi0 = psi;
  CrankNicolson cn(geo, {}, p);
  const int steps = 200;
  for (int k = 0; k < steps; ++k) cn.step(psi);
  cplx overlap = 0;
  for (std::size_t i = 0; i < geo.size(); ++i) overlap += geo.sqrt_det()[i] * std::conj(psi0[i]) * psi[i];
  overlap *= geo.cell_volume();
  CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-6));
  const double T = steps * p.dt;
  // Crank-Nicolson phase: 2 atan(E dt / 2 hbar) per step.
  const double E = hbar * hbar * 2 / (2 * m);
  const double rate = -std::arg(overlap) / T;
  CHECK(rate == doctest::Approx(2 * std::atan(E * p.dt / (2 * hbar)) / p.dt).epsilon(0.01));
  CHECK(rate == doctest::Approx(E / hbar).epsilon(0.01));
}

TEST_CASE("free packet dispersion in flat space") {
  ConfigurationSpace line(flat_chart({Axis{-20, 20, Topology::periodic, 0}}), {1.0});
  GridGeometry geo(line, make_grid(line, {1024}));
  const SimParams p = quantum(1.0, 2e-3);
  WaveField psi(geo.grid());
  std::vector<double> x(geo.size()), x2(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) {
    x[i] = geo.grid().node(i)[0];
    x2[i] = x[i] * x[i];
    psi[i] = std::exp(-x[i] * x[i] / 4.0);
  }
  normalise(geo, psi);
  CrankNicolson cn(geo, {}, p);
  for (int k = 0; k < 1000; ++k) cn.step(psi);
  const double mean = expectation(geo, psi, x);
  const double var = expectation(geo, psi, x2) - mean * mean;
  CHECK(var == doctest::Approx(2.0).epsilon(0.005));
}

TEST_CASE("flat chart reproduces the standard finite-difference Hamiltonian") {
  const double hbar = 0.7, m0 = 1.0, m1 = 3.0;
  ConfigurationSpace cs(flat_chart({Axis{0, 10, Topology::periodic, 0}}), {m0, m1});
  GridGeometry geo(cs, make_grid(cs, {16, 12}));
  std::vector<double> V(geo.size());
  for (std::size_t i = 0; i < geo.size(); ++i) V[i] = 0.1 * static_cast<double>(i % 7);
  CrankNicolson cn(geo, {V, {}}, quantum(hbar, 1e-2));
  const auto H = cn.hamiltonian_matrix();
  const auto& g = geo.grid();
  const double c0 = hbar * hbar / (2 * m0 * g.axis(0).spacing * g.axis(0).spacing);
  const double c1 = hbar * hbar / (2 * m1 * g.axis(1).spacing * g.axis(1).spacing);
  Eigen::SparseMatrix<double, Eigen::RowMajor> ref(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto r = static_cast<int>(i);
    t.emplace_back(r, r, 2 * c0 + 2 * c1 + V[i]);
    for (int dir : {-1, 1}) {
      t.emplace_back(r, static_cast<int>(g.neighbor(i, 0, dir)), -c0);
      t.emplace_back(r, static_cast<int>(g.neighbor(i, 1, dir)), -c1);
    }
  }
  ref.setFromTriplets(t.begin(), t.end());
  CHECK(H.nonZeros() == ref.nonZeros());
  double worst = 0;
  for (Eigen::Index r = 0; r < H.outerSize(); ++r)
    for (decltype(ref)::InnerIterator it(ref, r); it; ++it)
      worst = std::max(worst, std::abs(H.coeff(r, it.col()) - it.value()) / std::abs(it.value()));
  CHECK(worst <= 4 * std::numeric_limits<double>::epsilon());
}

TEST_CASE("nonlinear term cancels at the quantum coupling") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  GridGeometry geo(s, make_grid(s, {24, 48}));
  pde::Potentials pot{pde::harmonic_potential(geo, 0.8, std::vector<double>{1.5, 2.0}).values, {}};
  for (double hbar : {1.0, 0.1, 0.37}) {
    const SimParams p = quantum(hbar, 1e-3);
    const WaveField psi = sphere_packet(geo);
    const double psi_norm = std::sqrt(norm(geo, psi));
    const auto at_q = nonlinear_residual(geo, psi, pot, p, p.xi_quantum());
    for (const auto& v : at_q.term.values) CHECK(std::abs(v) <= 1e-12 * psi_norm);
    CHECK(at_q.masked.empty());

    const auto at0 = nonlinear_residual(geo, psi, pot, p, 0.0);
    std::vector<double> mod(geo.size()), lap(geo.size());
    for (std::size_t i = 0; i < geo.size(); ++i) mod[i] = std::abs(psi[i]);
    geo.laplace_beltrami<double>(mod, lap);
    double biggest = 0;
    for (std::size_t i = 0; i < geo.size(); ++i) {
      const cplx expect = 0.5 * hbar * hbar * lap[i] / mod[i] * psi[i];
      CHECK(std::abs(at0.term[i] - expect) <= 1e-12 * (1 + std::abs(expect)));
      biggest = std::max(biggest, std::abs(at0.term[i]));
    }
    CHECK(biggest > 1e-3 * hbar * hbar);

    // Real positive Psi: the full right-hand side is the linear Hamiltonian.
    WaveField real = psi;
    for (auto& v : real.values) v = std::abs(v);
    const auto r = nonlinear_residual(geo, real, pot, p, p.xi_quantum());
    CrankNicolson cn(geo, pot, p);
    const auto H = cn.hamiltonian_matrix();
    Eigen::VectorXd re(static_cast<Eigen::Index>(geo.size()));
    for (std::size_t i = 0; i < geo.size(); ++i) re[static_cast<Eigen::Index>(i)] = real[i].real();
    const Eigen::VectorXd Hpsi = H * re;
    for (std::size_t i = 0; i < geo.size(); ++i)
      CHECK(std::abs(r.rhs[i] - Hpsi[static_cast<Eigen::Index>(i)]) <= 1e-10 * (1 + std::abs(Hpsi[static_cast<Eigen::Index>(i)])));
  }
}
