#include "doctest.h"

#include "edyn/geometry/chart.hpp"
#include "edyn/geometry/configuration_space.hpp"
#include "edyn/geometry/grid.hpp"
#include "edyn/geometry/laplace_beltrami.hpp"
#include "edyn/geometry/normal_coords.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace edyn;
using namespace edyn::geometry;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> pt(std::initializer_list<double> v) { return v; }

// Independent oracle: Levi-Civita symbols from a closed-form metric
// derivative, evaluated with Richardson-extrapolated differences.
ChartConnection oracle_connection(const ManifoldChart& c, const SmallVec& x) {
  const int d = c.dim();
  std::vector<SmallMat> dh(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto diff = [&](double e) {
      SmallVec p = x, m = x;
      p[k] += e;
      m[k] -= e;
      return SmallMat((c.metric(p) - c.metric(m)) / (2 * e));
    };
    dh[static_cast<std::size_t>(k)] = (4.0 * diff(1e-4) - diff(2e-4)) / 3.0;
  }
  const SmallMat hinv = c.metric(x).inverse();
  ChartConnection g;
  g.dim = d;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int cc = 0; cc < d; ++cc) {
        double s = 0;
        for (int e = 0; e < d; ++e)
          s += 0.5 * hinv(a, e) *
               (dh[static_cast<std::size_t>(b)](e, cc) + dh[static_cast<std::size_t>(cc)](e, b) -
                dh[static_cast<std::size_t>(e)](b, cc));
        g(a, b, cc) = s;
      }
  return g;
}

std::vector<double> random_point(const ConfigurationSpace& cs, std::mt19937_64& gen) {
  std::vector<double> x(static_cast<std::size_t>(cs.dim()));
  for (int A = 0; A < cs.dim(); ++A) {
    const Axis& ax = cs.chart().axis(A % cs.chart_dim());
    const double lo = ax.finite() ? ax.lo() : -3.0, hi = ax.finite() ? ax.hi() : 3.0;
    x[static_cast<std::size_t>(A)] = std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  return x;
}

}  // namespace

TEST_CASE("mass tensor is block diagonal in particle index") {
  ConfigurationSpace flat2(flat_chart(2), {1.0, 2.0});
  const auto x = pt({0.3, -1.0, 2.0, 0.5});
  const Mat M = mass_tensor(flat2, x);
  Mat expect = Mat::Zero(4, 4);
  expect.diagonal() << 1, 1, 2, 2;
  CHECK((M - expect).cwiseAbs().maxCoeff() == 0.0);
  const Mat Mi = inverse_mass(flat2, x);
  Mat inv = Mat::Zero(4, 4);
  inv.diagonal() << 1, 1, 0.5, 0.5;
  CHECK((Mi - inv).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sqrt_det_mass(flat2, x) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sphere mass tensor, inverse and volume element") {
  ConfigurationSpace s1(sphere_chart(), {1.0});
  CHECK((mass_tensor(s1, pt({pi / 2, 0})) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(sqrt_det_mass(s1, pt({pi / 2, 0})) == doctest::Approx(1.0));
  CHECK(sqrt_det_mass(s1, pt({pi / 6, 0})) == doctest::Approx(0.5).epsilon(1e-14));

  ConfigurationSpace s2(sphere_chart(), {2.0});
  const Mat M = mass_tensor(s2, pt({pi / 4, 0}));
  CHECK(M(0, 0) == doctest::Approx(2.0));
  CHECK(M(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(M(0, 1) == 0.0);
  const Mat Mi = inverse_mass(s2, pt({pi / 4, 0}));
  CHECK(Mi(0, 0) == doctest::Approx(0.5));
  CHECK(Mi(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("points in the pole margin are rejected with particle and axis") {
  ConfigurationSpace s(sphere_chart(), {1.0, 1.0});
  try {
    (void)mass_tensor(s, pt({1.0, 0.0, 0.01, 0.0}));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    const std::string what = e.what();
    CHECK(what.find("particle 1") != std::string::npos);
    CHECK(what.find("axis 0") != std::string::npos);
  }
  CHECK_THROWS_AS(christoffel(s, pt({1.0, 0.0, pi - 0.02, 0.0})), DomainError);
}

TEST_CASE("sphere connection at the equator and at pi/4") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  const Connection g0 = christoffel(s, pt({pi / 2, 0.3}));
  CHECK(std::abs(g0(0, 1, 1)) < 1e-15);
  CHECK(std::abs(g0(1, 0, 1)) < 1e-15);

  for (const Connection& g : {christoffel(s, pt({pi / 4, 0})), christoffel_fd(s, pt({pi / 4, 0}))}) {
    CHECK(g(0, 1, 1) == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(g(1, 0, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(g(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(g(0, 0, 0)) < 1e-9);
  }
  CHECK(christoffel(ConfigurationSpace(flat_chart(3), {1.0}), pt({1, 2, 3}))(0, 0, 0) == 0.0);
}

TEST_CASE("connection only couples indices of one particle") {
  ConfigurationSpace s(sphere_chart(), {1.0, 3.0});
  const Connection g = christoffel(s, pt({0.7, 1.0, 2.1, 4.0}));
  for (int A = 0; A < 4; ++A)
    for (int B = 0; B < 4; ++B)
      for (int C = 0; C < 4; ++C)
        if (!(A / 2 == B / 2 && B / 2 == C / 2)) CHECK(g(A, B, C) == 0.0);
  // Mass cancels in the Levi-Civita symbols.
  CHECK(g(2, 3, 3) == doctest::Approx(-std::sin(2.1) * std::cos(2.1)));
}

TEST_CASE("random-point properties of the built-in charts") {
  std::mt19937_64 gen(12345);
  const std::vector<ConfigurationSpace> spaces = {
      ConfigurationSpace(flat_chart(2), {1.5}), ConfigurationSpace(circle_chart(2.0), {1.0, 0.5}),
      ConfigurationSpace(sphere_chart(), {1.0}), ConfigurationSpace(sphere_chart(2.0), {1.0, 3.0}),
      ConfigurationSpace(torus_chart(), {0.7})};
  for (const auto& cs : spaces) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_point(cs, gen);
      const Mat M = mass_tensor(cs, x);
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Mat Mi = inverse_mass(cs, x);
      CHECK((M * Mi - Mat::Identity(cs.dim(), cs.dim())).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(sqrt_det_mass(cs, x) == doctest::Approx(std::sqrt(M.determinant())).epsilon(1e-12));

      const Connection ga = christoffel(cs, x), gf = christoffel_fd(cs, x);
      double sym = 0.0, diff = 0.0;
      for (int A = 0; A < cs.dim(); ++A)
        for (int B = 0; B < cs.dim(); ++B)
          for (int C = 0; C < cs.dim(); ++C) {
            sym = std::max(sym, std::abs(ga(A, B, C) - ga(A, C, B)));
            diff = std::max(diff, std::abs(ga(A, B, C) - gf(A, B, C)));
          }
      CHECK(sym == 0.0);
      CHECK(diff < 1e-6);
    }
  }
}

TEST_CASE("analytic connections match an independent extrapolated oracle") {
  std::mt19937_64 gen(7);
  for (const auto& chart : {sphere_chart(), torus_chart(2.0, 1.0), torus_chart(3.0, 0.5)}) {
    ConfigurationSpace cs(chart, {1.0});
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_point(cs, gen);
      SmallVec xs(2);
      xs << x[0], x[1];
      const ChartConnection a = chart.connection(xs), o = oracle_connection(chart, xs);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) CHECK(std::abs(a(i, j, k) - o(i, j, k)) < 1e-6);
    }
  }
}

TEST_CASE("torus scalar curvature") {
  const ManifoldChart t = torus_chart(2.0, 1.0);
  SmallVec x(2);
  x << 0.3, 0.0;
  CHECK(t.scalar_curvature(x) == doctest::Approx(2.0 / 3.0));
  x << 0.3, pi;
  CHECK(t.scalar_curvature(x) == doctest::Approx(-2.0));
  CHECK(sphere_chart(2.0).scalar_curvature(SmallVec::Constant(2, 1.0)) == doctest::Approx(0.5));
}

TEST_CASE("table chart reproduces a tabulated metric") {
  MetricTable tab;
  tab.axes = {Axis{0.0, 1.0, Topology::bounded, 0.0}, Axis{0.0, 2 * pi, Topology::periodic, 0.0}};
  tab.counts = {11, 8};
  tab.components.assign(3, std::vector<double>(88));
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 8; ++j) {
      const double u = i / 10.0;
      tab.components[0][static_cast<std::size_t>(i * 8 + j)] = 1.0 + u;
      tab.components[1][static_cast<std::size_t>(i * 8 + j)] = 0.0;
      tab.components[2][static_cast<std::size_t>(i * 8 + j)] = 2.0;
    }
  const ManifoldChart c = table_chart(tab);
  SmallVec x(2);
  x << 0.55, 1.0;
  const SmallMat h = c.metric(x);
  CHECK(h(0, 0) == doctest::Approx(1.55));
  CHECK(h(1, 1) == doctest::Approx(2.0));
  const ChartConnection g = c.connection(x);
  CHECK(g(0, 0, 0) == doctest::Approx(0.5 / 1.55).epsilon(1e-6));
}

TEST_CASE("rotated sphere chart round trip") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 100; ++t) {
    SmallVec x(2);
    x << std::uniform_real_distribution<double>(0.2, pi - 0.2)(gen),
        std::uniform_real_distribution<double>(0, 2 * pi)(gen);
    const SmallVec back = sphere_from_rotated(sphere_to_rotated(x));
    CHECK(std::abs(back[0] - x[0]) < 1e-12);
    CHECK(std::abs(std::remainder(back[1] - x[1], 2 * pi)) < 1e-12);
  }
  SmallVec pole(2);
  pole << pi / 2, 0.0;
  CHECK(sphere_to_rotated(pole)[0] < 1e-12);
}

TEST_CASE("grid layout and lookup") {
  ConfigurationSpace s(sphere_chart(), {1.0});
  const GridSpec g = make_grid(s, {8, 16});
  CHECK(g.size() == 128);
  CHECK(g.axis(0).lower == doctest::Approx(0.05));
  CHECK(g.axis(0).upper() == doctest::Approx(pi - 0.05));
  CHECK(g.axis(1).spacing * 16 == doctest::Approx(2 * pi));
  CHECK(g.neighbor(0, 0, -1) == -1);
  CHECK(g.neighbor(0, 1, -1) == 15);
  const Vec x = g.node(17);
  CHECK(g.locate(std::span<const double>(x.data(), 2)).value() == 17);
  CHECK_THROWS(make_grid(s, {4, 16}));
  CHECK(field_role_from_string(to_string(FieldRole::phase)) == FieldRole::phase);
}

TEST_CASE("Laplace-Beltrami annihilates constants") {
  for (const auto& cs : {ConfigurationSpace(sphere_chart(), {1.0}), ConfigurationSpace(torus_chart(), {2.0}),
                         ConfigurationSpace(circle_chart(), {1.0, 3.0})}) {
    const GridSpec g = make_grid(cs, {24, 32});
    GridField f(g, FieldRole::generic, 3.7);
    const GridField out = laplace_beltrami(cs, g, f);
    const double h = std::min(g.axis(0).spacing, g.axis(1).spacing);
    for (double v : out.values) CHECK(std::abs(v) < 1e-12 * 3.7 / (h * h));
  }
}

TEST_CASE("flat Laplacian of x^2 is 2 in the interior") {
  ConfigurationSpace cs(flat_chart({Axis{-1.0, 1.0, Topology::bounded, 0.0}}), {1.0});
  const GridSpec g = make_grid(cs, {64});
  GridField f(g, FieldRole::generic);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::pow(g.node(i)[0], 2);
  const GridField out = laplace_beltrami(cs, g, f);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(out[i] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("discrete divergence theorem on periodic and walled grids") {
  std::mt19937_64 gen(99);
  for (const auto& cs : {ConfigurationSpace(torus_chart(), {1.3}), ConfigurationSpace(sphere_chart(), {1.0}),
                         ConfigurationSpace(circle_chart(), {1.0, 2.0})}) {
    const GridSpec g = make_grid(cs, {16, 24});
    GridGeometry geo(cs, g);
    std::vector<double> f(g.size()), out(g.size());
    for (auto& v : f) v = std::normal_distribution<double>()(gen);
    geo.laplace_beltrami<double>(f, out);
    double norm = 0;
    for (double v : f) norm += v * v;
    CHECK(std::abs(geo.integrate(out)) < 1e-10 * std::sqrt(norm));
  }
}

TEST_CASE("flux operator is symmetric with cross terms present") {
  MetricTable tab;
  tab.axes = {Axis{0.0, 2 * pi, Topology::periodic, 0.0}, Axis{0.0, 2 * pi, Topology::periodic, 0.0}};
  tab.counts = {16, 16};
  tab.components.assign(3, std::vector<double>(256));
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const double u = 2 * pi * i / 16, v = 2 * pi * j / 16;
      const auto k = static_cast<std::size_t>(i * 16 + j);
      tab.components[0][k] = 2.0 + std::sin(u);
      tab.components[1][k] = 0.3 * std::cos(v);
      tab.components[2][k] = 1.5 + 0.5 * std::cos(u + v);
    }
  tab.counts = {16, 16};
  ConfigurationSpace cs(table_chart(tab), {1.0});
  GridGeometry geo(cs, make_grid(cs, {12, 12}));
  CHECK(geo.has_cross_terms());
  const auto K = geo.flux_matrix();
  const Eigen::SparseMatrix<double> Kt = K.transpose();
  CHECK((Eigen::SparseMatrix<double>(K) - Kt).norm() < 1e-12 * K.norm());
  // The matrix and the matrix-free operator agree.
  std::vector<double> f(geo.size()), out(geo.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.37 * static_cast<double>(i));
  geo.flux_divergence<double>(f, out);
  const Vec ref = K * Eigen::Map<const Vec>(f.data(), static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(out[i] == doctest::Approx(ref[static_cast<Eigen::Index>(i)]));
  // -f^T K f dV equals the assembled Dirichlet energy.
  const double e = -Eigen::Map<const Vec>(f.data(), static_cast<Eigen::Index>(f.size())).dot(ref) * geo.cell_volume();
  CHECK(geo.dirichlet_energy(f) == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("sphere l = 1 mode converges at second order in the interior") {
  ConfigurationSpace cs(sphere_chart(), {1.0});
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const GridSpec g = make_grid(cs, {n, 2 * n});
    GridField f(g, FieldRole::generic);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::cos(g.node(i)[0]);
    const GridField out = laplace_beltrami(cs, g, f);
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double th = g.node(i)[0];
      if (th < 0.25 || th > pi - 0.25) continue;
      err = std::max(err, std::abs(out[i] + 2 * f[i]));
    }
    errs.push_back(err);
  }
  CHECK(std::log2(errs[0] / errs[1]) > 1.9);
  CHECK(std::log2(errs[1] / errs[2]) > 1.9);
}

TEST_CASE("normal coordinates flatten the metric to second order") {
  const auto flat = normal_coords_check(ConfigurationSpace(flat_chart(2), {1.0, 2.0}), pt({0, 0, 1, 1}), 0.1);
  CHECK(flat.metric_deviation == 0.0);
  CHECK(flat.derivative_estimate == 0.0);

  ConfigurationSpace s(sphere_chart(), {1.0});
  const auto eq = normal_coords_check(s, pt({pi / 2, 0}), 1e-3);
  CHECK(eq.metric_deviation < 1e-5);
  CHECK(eq.derivative_estimate < 1e-2);
  for (double th : {pi / 2, pi / 4}) {
    const auto r1 = normal_coords_check(s, pt({th, 0}), 1e-2);
    const auto r2 = normal_coords_check(s, pt({th, 0}), 5e-3);
    CHECK(r1.metric_deviation / r2.metric_deviation == doctest::Approx(4.0).epsilon(0.05));
    CHECK(r1.derivative_estimate / r2.derivative_estimate == doctest::Approx(2.0).epsilon(0.05));
  }
  CHECK_THROWS_AS(normal_coords_check(s, pt({0.06, 0}), 0.1), DomainError);
}
