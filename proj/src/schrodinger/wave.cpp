#include "edyn/schrodinger/wave.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

namespace edyn::schrodinger {

using geometry::GridField;
using geometry::GridGeometry;

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

void check_wave(const GridGeometry& geo, const WaveField& psi) {
  if (!(psi.grid == geo.grid()) || psi.values.size() != geo.size())
    throw std::invalid_argument("wave field grid does not match the solver grid");
}

}  // namespace

WaveField assemble_wavefunction(const GridField& rho, const GridField& Phi, const SimParams& p) {
  if (!(rho.grid == Phi.grid)) throw std::invalid_argument("rho and Phi live on different grids");
  const double hbar = p.hbar();
  WaveField psi(rho.grid);
  psi.time = rho.time;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!(rho[i] >= 0.0)) throw std::domain_error("density must be non-negative");
    psi[i] = std::polar(std::sqrt(rho[i]), Phi[i] / hbar);
  }
  return psi;
}

MadelungSplit madelung_split(const WaveField& psi, const SimParams& p, double floor) {
  const auto& grid = psi.grid;
  const std::size_t N = psi.size();
  if (N == 0) throw std::invalid_argument("empty wave field");
  MadelungSplit out;
  out.rho = GridField(grid, geometry::FieldRole::density);
  out.Phi = GridField(grid, geometry::FieldRole::phase);
  out.rho.time = out.Phi.time = psi.time;
  for (std::size_t i = 0; i < N; ++i) {
    out.rho[i] = std::norm(psi[i]);
    if (std::abs(psi[i]) > std::abs(psi[out.reference])) out.reference = i;
  }

  std::vector<double> phase(N, 0.0);
  std::vector<char> seen(N, 0);
  std::deque<std::size_t> queue{out.reference};
  phase[out.reference] = std::arg(psi[out.reference]);
  seen[out.reference] = 1;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (int a = 0; a < grid.dim(); ++a)
      for (int dir : {-1, 1}) {
        const std::ptrdiff_t j = grid.neighbor(i, a, dir);
        if (j < 0 || seen[static_cast<std::size_t>(j)]) continue;
        const auto uj = static_cast<std::size_t>(j);
        if (std::abs(psi[uj]) < floor || std::abs(psi[i]) < floor) out.ambiguous = true;
        phase[uj] = phase[i] + wrap_angle(std::arg(psi[uj]) - std::arg(psi[i]));
        seen[uj] = 1;
        queue.push_back(uj);
      }
  }
  const double hbar = p.hbar();
  for (std::size_t i = 0; i < N; ++i) out.Phi[i] = hbar * phase[i];

  out.winding.assign(static_cast<std::size_t>(grid.dim()), 0);
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.axis(a).topology != geometry::Topology::periodic) continue;
    double total = 0.0;
    std::size_t i = out.reference;
    for (int k = 0; k < grid.axis(a).count; ++k) {
      const auto j = static_cast<std::size_t>(grid.neighbor(i, a, +1));
      total += wrap_angle(std::arg(psi[j]) - std::arg(psi[i]));
      i = j;
    }
    out.winding[static_cast<std::size_t>(a)] = std::lround(total / (2.0 * std::numbers::pi));
  }
  return out;
}

double norm(const GridGeometry& geo, const WaveField& psi) {
  check_wave(geo, psi);
  const auto sq = geo.sqrt_det();
  double s = 0.0;
  for (std::size_t i = 0; i < geo.size(); ++i) s += sq[i] * std::norm(psi[i]);
  return s * geo.cell_volume();
}

double expectation(const GridGeometry& geo, const WaveField& psi, std::span<const double> f) {
  check_wave(geo, psi);
  const auto sq = geo.sqrt_det();
  double s = 0.0;
  for (std::size_t i = 0; i < geo.size(); ++i) s += sq[i] * std::norm(psi[i]) * f[i];
  return s * geo.cell_volume();
}

CrankNicolson::CrankNicolson(const GridGeometry& geo, const pde::Potentials& pot, const SimParams& p)
    : geo_(geo), p_(p) {
  p_.validate();
  if ((!pot.V.empty() && pot.V.size() != geo.size()) || (!pot.Vc.empty() && pot.Vc.size() != geo.size()))
    throw std::invalid_argument("potential does not match the solver grid");
  const double hbar = p_.hbar();
  const auto N = static_cast<Eigen::Index>(geo.size());
  const auto sq = geo.sqrt_det();
  Eigen::SparseMatrix<double, Eigen::ColMajor> K = geo.flux_matrix();
  B_ = -0.5 * hbar * hbar * K;
  for (Eigen::Index i = 0; i < N; ++i)
    B_.coeffRef(i, i) += sq[static_cast<std::size_t>(i)] * pot.at(static_cast<std::size_t>(i));
  B_.makeCompressed();

  const cplx itau(0.0, p_.dt / (2.0 * hbar));
  Eigen::SparseMatrix<cplx, Eigen::ColMajor> S(N, N);
  S.reserve(Eigen::VectorXi::Constant(N, 1));
  for (Eigen::Index i = 0; i < N; ++i) S.insert(i, i) = sq[static_cast<std::size_t>(i)];
  const Eigen::SparseMatrix<cplx, Eigen::ColMajor> Bc = B_.cast<cplx>();
  A_ = S + itau * Bc;
  R_ = S - itau * Bc;
  A_.makeCompressed();
  R_.makeCompressed();
  lu_.analyzePattern(A_);
  lu_.factorize(A_);
  if (lu_.info() != Eigen::Success) throw SolverError("Crank-Nicolson factorisation failed", 1.0);
}

void CrankNicolson::step(WaveField& psi) {
  check_wave(geo_, psi);
  const auto N = static_cast<Eigen::Index>(psi.size());
  Eigen::Map<Eigen::VectorXcd> x(psi.values.data(), N);
  const Eigen::VectorXcd rhs = R_ * x;
  Eigen::VectorXcd sol = lu_.solve(rhs);
  const double scale = rhs.norm();
  double res = scale > 0.0 ? (rhs - A_ * sol).norm() / scale : 0.0;
  for (int k = 0; k < 5 && res > 1e-13; ++k) {
    sol += lu_.solve(Eigen::VectorXcd(rhs - A_ * sol));
    res = (rhs - A_ * sol).norm() / scale;
  }
  last_residual_ = res;
  if (!(res <= 1e-10)) {
    std::ostringstream os;
    os << "Crank-Nicolson solve stalled at relative residual " << res;
    throw SolverError(os.str(), res);
  }
  x = sol;
  psi.time += p_.dt;
}

double CrankNicolson::energy(const WaveField& psi) const {
  check_wave(geo_, psi);
  const auto N = static_cast<Eigen::Index>(psi.size());
  Eigen::Map<const Eigen::VectorXcd> x(psi.values.data(), N);
  const Eigen::VectorXcd Bx = B_.cast<cplx>() * x;
  return x.dot(Bx).real() * geo_.cell_volume();
}

Eigen::SparseMatrix<double, Eigen::RowMajor> CrankNicolson::hamiltonian_matrix() const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> H = B_;
  const auto sq = geo_.sqrt_det();
  for (Eigen::Index r = 0; r < H.outerSize(); ++r)
    for (decltype(H)::InnerIterator it(H, r); it; ++it) it.valueRef() /= sq[static_cast<std::size_t>(r)];
  return H;
}

NonlinearResidual nonlinear_residual(const GridGeometry& geo, const WaveField& psi, const pde::Potentials& pot,
                                     const SimParams& p, double xi_free, double floor) {
  check_wave(geo, psi);
  const double hbar = p.hbar();
  const double hbar2 = hbar * hbar;
  // Both pieces are power-of-two multiples of the same rounded hbar^2, so the
  // coefficient is exactly zero at xi_free = hbar^2 / 8.
  const double coeff = 0.5 * hbar2 - 4.0 * xi_free;
  const std::size_t N = geo.size();
  std::vector<double> mod(N), lap_mod(N);
  for (std::size_t i = 0; i < N; ++i) mod[i] = std::abs(psi[i]);
  geo.laplace_beltrami<double>(mod, lap_mod);
  std::vector<cplx> lap_psi(N);
  geo.laplace_beltrami<cplx>(psi.values, lap_psi);

  NonlinearResidual out{WaveField(psi.grid), WaveField(psi.grid), {}};
  out.term.time = out.rhs.time = psi.time;
  for (std::size_t i = 0; i < N; ++i) {
    cplx term(0.0, 0.0);
    if (mod[i] < floor)
      out.masked.push_back(i);
    else
      term = coeff * (lap_mod[i] / mod[i]) * psi[i];
    out.term[i] = term;
    out.rhs[i] = -0.5 * hbar2 * lap_psi[i] + term + pot.at(i) * psi[i];
  }
  return out;
}

}  // namespace edyn::schrodinger
