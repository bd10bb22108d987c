#include "edyn/pde/hamilton_jacobi.hpp"

#include "edyn/pde/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edyn::pde {

using geometry::GridField;
using geometry::GridGeometry;

namespace {

constexpr int kMaxIterations = 100;
constexpr double kIterationTol = 1e-14;

void check_advection(const GridGeometry& geo, const GridField& Phi, const SimParams& p, const char* who) {
  const double limit = fp_stable_dt(geo, Drive::phase(Phi.values), p);
  if (p.dt > limit) {
    std::ostringstream os;
    os << who << ": dt=" << p.dt << " exceeds the advective limit " << limit;
    throw StepSizeError(os.str(), 0.9 * limit);
  }
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// out = -K_rho[Phi] / sqrt(M)
void density_rate(const GridGeometry& geo, const std::vector<double>& rho, const std::vector<double>& Phi,
                  std::vector<double>& out) {
  geo.flux_divergence<double>(Phi, out, rho);
  const auto sq = geo.sqrt_det();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / sq[i];
}

}  // namespace

void hj_step(const GridGeometry& geo, GridField& Phi, const GridField& rho, const Potentials& pot,
             const SimParams& p) {
  p.validate();
  if (!(Phi.grid == geo.grid()) || Phi.values.size() != geo.size())
    throw std::invalid_argument("phase grid does not match the solver grid");
  check_advection(geo, Phi, p, "hj_step");
  std::vector<double> kin(geo.size());
  geo.kinetic_density(Phi.values, kin);
  const GridField dF = dF_drho(geo, rho, pot, p);
  for (std::size_t i = 0; i < geo.size(); ++i) Phi[i] -= p.dt * (kin[i] + dF[i]);
  Phi.time += p.dt;
}

CoupledStepReport coupled_step(const GridGeometry& geo, GridField& rho, GridField& Phi, const Potentials& pot,
                               const SimParams& p) {
  p.validate();
  if (!(Phi.grid == geo.grid()) || !(rho.grid == geo.grid()))
    throw std::invalid_argument("coupled fields do not match the solver grid");
  check_advection(geo, Phi, p, "coupled_step");
  const std::size_t N = geo.size();
  const double h2 = 0.5 * p.dt;
  CoupledStepReport rep;

  auto fail = [&](const std::string& what) {
    throw StepSizeError("coupled_step: " + what + " at dt=" + std::to_string(p.dt), 0.5 * p.dt);
  };

  // Half step in Phi, implicit through the kinetic density.
  const GridField dF0 = dF_drho(geo, rho, pot, p);
  std::vector<double> kin(N), half(Phi.values), next(N);
  for (;;) {
    geo.kinetic_density(half, kin);
    double change = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      next[i] = Phi[i] - h2 * (kin[i] + dF0[i]);
      change = std::max(change, std::abs(next[i] - half[i]));
    }
    half.swap(next);
    ++rep.phase_iterations;
    if (change <= kIterationTol * std::max(1.0, max_abs(half))) break;
    if (rep.phase_iterations >= kMaxIterations) fail("phase iteration did not converge");
  }

  // Whole step in rho, implicit trapezoid in the linear transport term.
  std::vector<double> r0(N), r1(N), trial(rho.values), updated(N);
  density_rate(geo, rho.values, half, r0);
  for (;;) {
    density_rate(geo, trial, half, r1);
    double change = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      updated[i] = rho[i] + h2 * (r0[i] + r1[i]);
      change = std::max(change, std::abs(updated[i] - trial[i]));
    }
    trial.swap(updated);
    ++rep.density_iterations;
    if (change <= kIterationTol * std::max(1e-300, max_abs(trial))) break;
    if (rep.density_iterations >= kMaxIterations) fail("density iteration did not converge");
  }
  double clipped = 0.0;
  const auto sq = geo.sqrt_det();
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(trial[i])) fail("density became non-finite");
    if (trial[i] < 0.0) {
      clipped -= sq[i] * trial[i];
      trial[i] = 0.0;
    }
  }
  if (clipped > 0.0) {
    rep.clipped_mass = clipped * geo.cell_volume();
    const double mass = geo.integrate(trial);
    const double target = geo.integrate(rho.values);
    for (double& v : trial) v *= target / mass;
  }
  rho.values.swap(trial);

  // Closing explicit half step in Phi.
  const GridField dF1 = dF_drho(geo, rho, pot, p);
  geo.kinetic_density(half, kin);
  for (std::size_t i = 0; i < N; ++i) Phi[i] = half[i] - h2 * (kin[i] + dF1[i]);
  rho.time += p.dt;
  Phi.time += p.dt;
  return rep;
}

}  // namespace edyn::pde
