#include "edyn/pde/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edyn::pde {

using geometry::GridField;
using geometry::GridGeometry;

namespace {

void check_drive(const GridGeometry& geo, const Drive& drive) {
  if (drive.kind == Drive::Kind::phase && drive.field.empty())
    throw std::invalid_argument("phase drive needs a phase field");
  if (!drive.field.empty() && drive.field.size() != geo.size())
    throw std::invalid_argument("drive field does not match the solver grid");
}

// Gershgorin-type bound on the per-node outflow rate of the explicit update.
double max_rate(const GridGeometry& geo, const Drive& drive, const SimParams& p) {
  const auto K = geo.flux_matrix();
  const auto sq = geo.sqrt_det();
  const bool phase = drive.kind == Drive::Kind::phase;
  double rate = 0.0;
  for (Eigen::Index i = 0; i < K.outerSize(); ++i) {
    double r = 0.0;
    for (decltype(K)::InnerIterator it(K, i); it; ++it) {
      if (it.col() == i) continue;
      const double w = std::abs(it.value());
      const double jump = drive.field.empty()
                              ? 0.0
                              : std::abs(drive.field[static_cast<std::size_t>(it.col())] -
                                         drive.field[static_cast<std::size_t>(i)]);
      r += phase ? w * 0.5 * jump : w * 0.5 * p.eta * (1.0 + jump);
    }
    rate = std::max(rate, r / sq[static_cast<std::size_t>(i)]);
  }
  return rate;
}

}  // namespace

double fp_stable_dt(const GridGeometry& geo, const Drive& drive, const SimParams& p) {
  check_drive(geo, drive);
  const double r = max_rate(geo, drive, p);
  return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

FpStepReport fp_step(const GridGeometry& geo, GridField& rho, const Drive& drive, const SimParams& p) {
  p.validate();
  check_drive(geo, drive);
  if (!(rho.grid == geo.grid()) || rho.values.size() != geo.size())
    throw std::invalid_argument("density grid does not match the solver grid");
  const double limit = fp_stable_dt(geo, drive, p);
  if (p.dt > limit) {
    std::ostringstream os;
    os << "Fokker-Planck step dt=" << p.dt << " exceeds the stability limit " << limit;
    throw StepSizeError(os.str(), 0.9 * limit);
  }

  const std::size_t N = geo.size();
  std::vector<double> rhs(N), tmp(N);
  if (drive.kind == Drive::Kind::phase) {
    geo.flux_divergence<double>(drive.field, rhs, rho.values);
    for (double& v : rhs) v = -v;
  } else {
    geo.flux_divergence<double>(rho.values, rhs);
    for (double& v : rhs) v *= 0.5 * p.eta;
    if (!drive.field.empty()) {
      geo.flux_divergence<double>(drive.field, tmp, rho.values);
      for (std::size_t i = 0; i < N; ++i) rhs[i] -= p.eta * tmp[i];
    }
  }

  FpStepReport rep;
  const auto sq = geo.sqrt_det();
  for (std::size_t i = 0; i < N; ++i) {
    rho[i] += p.dt * rhs[i] / sq[i];
    if (rho[i] < 0.0) {
      rep.clipped_mass -= sq[i] * rho[i] * geo.cell_volume();
      rho[i] = 0.0;
    }
  }
  if (rep.clipped_mass > 0.0) {
    const double mass = geo.integrate(rho.values);
    for (double& v : rho.values) v /= mass;
  }
  rho.time += p.dt;
  return rep;
}

FpStepReport fp_evolve(const GridGeometry& geo, GridField& rho, const Drive& drive, const SimParams& p,
                       double duration) {
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  FpStepReport total;
  if (duration == 0.0) return total;
  // A phase drive is held fixed over the interval, so one bound suffices.
  const double limit = 0.9 * fp_stable_dt(geo, drive, p);
  const auto steps = static_cast<std::int64_t>(std::ceil(duration / std::min(p.dt, limit) - 1e-9));
  SimParams q = p;
  q.dt = duration / static_cast<double>(steps);
  const double t0 = rho.time;
  for (std::int64_t s = 0; s < steps; ++s) total.clipped_mass += fp_step(geo, rho, drive, q).clipped_mass;
  rho.time = t0 + duration;
  return total;
}

}  // namespace edyn::pde
