#include "edyn/geometry/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace edyn::geometry {

ManifoldChart::ManifoldChart(std::string name, std::vector<Axis> axes, MetricFn metric,
                             ConnectionFn connection, ScalarFn curvature)
    : name_(std::move(name)),
      axes_(std::move(axes)),
      metric_(std::move(metric)),
      connection_(std::move(connection)),
      curvature_(std::move(curvature)) {
  if (axes_.empty() || static_cast<int>(axes_.size()) > kMaxChartDim)
    throw std::invalid_argument("chart '" + name_ + "': dimension must be in 1.." +
                                std::to_string(kMaxChartDim));
  for (const auto& ax : axes_) {
    if (ax.topology == Topology::periodic && !(ax.finite() && ax.upper > ax.lower))
      throw std::invalid_argument("chart '" + name_ + "': periodic axis needs finite bounds");
    if (ax.margin < 0.0) throw std::invalid_argument("chart '" + name_ + "': negative margin");
  }
  if (!metric_) throw std::invalid_argument("chart '" + name_ + "': no metric");
}

ChartConnection ManifoldChart::connection(const SmallVec& x) const {
  if (connection_) return connection_(x);
  return connection_fd(x);
}

ChartConnection ManifoldChart::connection_fd(const SmallVec& x) const {
  const int d = dim();
  // dh[e](a, b) = d h_ab / d x^e
  std::array<SmallMat, kMaxChartDim> dh;
  for (int e = 0; e < d; ++e) {
    const double eps = std::max(1e-5, 1e-5 * std::abs(x[e]));
    const Axis& ax = axes_[static_cast<std::size_t>(e)];
    if (ax.topology == Topology::bounded && (x[e] - eps < ax.lower || x[e] + eps > ax.upper)) {
      std::ostringstream os;
      os << "chart '" << name_ << "': finite-difference stencil leaves the domain on axis " << e
         << " at x=" << x[e];
      throw DomainError(os.str());
    }
    SmallVec xp = x, xm = x;
    xp[e] += eps;
    xm[e] -= eps;
    dh[static_cast<std::size_t>(e)] = (metric_(xp) - metric_(xm)) / (2.0 * eps);
  }
  const SmallMat hinv = metric_(x).inverse();
  ChartConnection g;
  g.dim = d;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = b; c < d; ++c) {
        double s = 0.0;
        for (int e = 0; e < d; ++e)
          s += hinv(a, e) * (dh[static_cast<std::size_t>(b)](e, c) +
                             dh[static_cast<std::size_t>(c)](e, b) -
                             dh[static_cast<std::size_t>(e)](b, c));
        g(a, b, c) = 0.5 * s;
        g(a, c, b) = 0.5 * s;
      }
  return g;
}

double ManifoldChart::scalar_curvature(const SmallVec& x) const {
  if (!curvature_) throw std::logic_error("chart '" + name_ + "' has no scalar curvature");
  return curvature_(x);
}

bool ManifoldChart::admissible(const SmallVec& x) const {
  for (int a = 0; a < dim(); ++a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    if (!std::isfinite(x[a])) return false;
    if (ax.topology == Topology::bounded && (x[a] < ax.lo() || x[a] > ax.hi())) return false;
  }
  return true;
}

void ManifoldChart::check(const SmallVec& x, int particle) const {
  for (int a = 0; a < dim(); ++a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    const bool bad = !std::isfinite(x[a]) ||
                     (ax.topology == Topology::bounded && (x[a] < ax.lo() || x[a] > ax.hi()));
    if (bad) {
      std::ostringstream os;
      os << "chart '" << name_ << "': particle " << particle << " axis " << a << " value " << x[a]
         << " outside admissible [" << ax.lo() << ", " << ax.hi() << "]";
      throw DomainError(os.str());
    }
  }
}

void ManifoldChart::fold(double* x) const {
  for (int a = 0; a < dim(); ++a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    double& v = x[a];
    if (ax.topology == Topology::periodic) {
      const double p = ax.period();
      v = ax.lower + std::fmod(v - ax.lower, p);
      if (v < ax.lower) v += p;
      if (v >= ax.upper) v -= p;
    } else if (std::isfinite(ax.lo()) || std::isfinite(ax.hi())) {
      const double lo = ax.lo(), hi = ax.hi();
      // Repeated reflection handles excursions wider than the interval.
      for (int guard = 0; guard < 64 && (v < lo || v > hi); ++guard) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
      }
      v = std::clamp(v, lo, hi);
    }
  }
}

double ManifoldChart::wrap_delta(int axis, double dx) const {
  const Axis& ax = axes_[static_cast<std::size_t>(axis)];
  if (ax.topology != Topology::periodic) return dx;
  const double p = ax.period();
  return dx - p * std::round(dx / p);
}

ManifoldChart flat_chart(int dim) { return flat_chart(std::vector<Axis>(static_cast<std::size_t>(dim))); }

ManifoldChart flat_chart(std::vector<Axis> axes) {
  const int d = static_cast<int>(axes.size());
  return ManifoldChart(
      "flat", std::move(axes), [d](const SmallVec&) { return SmallMat(SmallMat::Identity(d, d)); },
      [d](const SmallVec&) {
        ChartConnection g;
        g.dim = d;
        return g;
      },
      [](const SmallVec&) { return 0.0; });
}

ManifoldChart circle_chart(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  const double r2 = radius * radius;
  return ManifoldChart(
      "circle", {Axis{0.0, 2.0 * std::numbers::pi, Topology::periodic, 0.0}},
      [r2](const SmallVec&) {
        SmallMat h(1, 1);
        h(0, 0) = r2;
        return h;
      },
      [](const SmallVec&) {
        ChartConnection g;
        g.dim = 1;
        return g;
      },
      [](const SmallVec&) { return 0.0; });
}

ManifoldChart sphere_chart(double radius, double pole_margin) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  const double r2 = radius * radius;
  return ManifoldChart(
      "sphere",
      {Axis{0.0, std::numbers::pi, Topology::bounded, pole_margin},
       Axis{0.0, 2.0 * std::numbers::pi, Topology::periodic, 0.0}},
      [r2](const SmallVec& x) {
        const double s = std::sin(x[0]);
        SmallMat h = SmallMat::Zero(2, 2);
        h(0, 0) = r2;
        h(1, 1) = r2 * s * s;
        return h;
      },
      [](const SmallVec& x) {
        const double s = std::sin(x[0]), c = std::cos(x[0]);
        ChartConnection g;
        g.dim = 2;
        g(0, 1, 1) = -s * c;
        g(1, 0, 1) = c / s;
        g(1, 1, 0) = c / s;
        return g;
      },
      [r2](const SmallVec&) { return 2.0 / r2; });
}

ManifoldChart torus_chart(double major_radius, double minor_radius) {
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius))
    throw std::invalid_argument("torus needs major > minor > 0");
  const double R = major_radius, r = minor_radius;
  return ManifoldChart(
      "torus",
      {Axis{0.0, 2.0 * std::numbers::pi, Topology::periodic, 0.0},
       Axis{0.0, 2.0 * std::numbers::pi, Topology::periodic, 0.0}},
      [R, r](const SmallVec& x) {
        const double w = R + r * std::cos(x[1]);
        SmallMat h = SmallMat::Zero(2, 2);
        h(0, 0) = w * w;
        h(1, 1) = r * r;
        return h;
      },
      [R, r](const SmallVec& x) {
        const double w = R + r * std::cos(x[1]);
        const double sv = std::sin(x[1]);
        ChartConnection g;
        g.dim = 2;
        g(0, 0, 1) = -r * sv / w;
        g(0, 1, 0) = -r * sv / w;
        g(1, 0, 0) = w * sv / r;
        return g;
      },
      [R, r](const SmallVec& x) {
        const double cv = std::cos(x[1]);
        return 2.0 * cv / (r * (R + r * cv));
      });
}

namespace {

// Multilinear interpolation weights of x on a table axis.
struct Bracket {
  int i0, i1;
  double w1;
};

Bracket bracket(const Axis& ax, int count, double x) {
  if (ax.topology == Topology::periodic) {
    const double h = ax.period() / count;
    double u = std::fmod(x - ax.lower, ax.period());
    if (u < 0) u += ax.period();
    const double s = u / h;
    int i0 = static_cast<int>(std::floor(s));
    const double w1 = s - i0;
    i0 %= count;
    return {i0, (i0 + 1) % count, w1};
  }
  const double h = (ax.upper - ax.lower) / (count - 1);
  const double s = std::clamp((x - ax.lower) / h, 0.0, static_cast<double>(count - 1));
  int i0 = std::min(static_cast<int>(std::floor(s)), count - 2);
  return {i0, i0 + 1, s - i0};
}

}  // namespace

ManifoldChart table_chart(MetricTable table) {
  const int d = static_cast<int>(table.axes.size());
  if (d < 1 || d > 2) throw std::invalid_argument("table chart supports dimension 1 or 2");
  if (static_cast<int>(table.counts.size()) != d)
    throw std::invalid_argument("table chart: counts do not match axes");
  std::size_t nodes = 1;
  for (int a = 0; a < d; ++a) {
    const int c = table.counts[static_cast<std::size_t>(a)];
    if (c < 2) throw std::invalid_argument("table chart: need at least 2 nodes per axis");
    if (!table.axes[static_cast<std::size_t>(a)].finite())
      throw std::invalid_argument("table chart: axes need finite bounds");
    nodes *= static_cast<std::size_t>(c);
  }
  const std::size_t ncomp = static_cast<std::size_t>(d * (d + 1) / 2);
  if (table.components.size() != ncomp)
    throw std::invalid_argument("table chart: expected " + std::to_string(ncomp) +
                                " metric components");
  for (const auto& comp : table.components)
    if (comp.size() != nodes)
      throw std::invalid_argument("table chart: component has " + std::to_string(comp.size()) +
                                  " values, expected " + std::to_string(nodes));

  auto axes = table.axes;
  auto metric = [t = std::move(table), d](const SmallVec& x) {
    std::array<Bracket, 2> br{};
    for (int a = 0; a < d; ++a)
      br[static_cast<std::size_t>(a)] =
          bracket(t.axes[static_cast<std::size_t>(a)], t.counts[static_cast<std::size_t>(a)], x[a]);
    auto sample = [&](const std::vector<double>& comp) {
      if (d == 1) return (1 - br[0].w1) * comp[static_cast<std::size_t>(br[0].i0)] +
                         br[0].w1 * comp[static_cast<std::size_t>(br[0].i1)];
      const int c1 = t.counts[1];
      auto at = [&](int i, int j) { return comp[static_cast<std::size_t>(i * c1 + j)]; };
      const double w0 = br[0].w1, w1 = br[1].w1;
      return (1 - w0) * (1 - w1) * at(br[0].i0, br[1].i0) + (1 - w0) * w1 * at(br[0].i0, br[1].i1) +
             w0 * (1 - w1) * at(br[0].i1, br[1].i0) + w0 * w1 * at(br[0].i1, br[1].i1);
    };
    SmallMat h(d, d);
    std::size_t k = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        h(a, b) = sample(t.components[k++]);
        h(b, a) = h(a, b);
      }
    return h;
  };
  return ManifoldChart("table", std::move(axes), std::move(metric));
}

namespace {

Eigen::Vector3d to_unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

SmallVec from_unit(const Eigen::Vector3d& v) {
  SmallVec x(2);
  x[0] = std::acos(std::clamp(v.z(), -1.0, 1.0));
  double phi = std::atan2(v.y(), v.x());
  if (phi < 0) phi += 2.0 * std::numbers::pi;
  x[1] = phi;
  return x;
}

}  // namespace

// The rotated chart's Cartesian axes are a cyclic permutation of the standard
// ones: (x, y, z)_rot = (y, z, x)_std, so its pole is the standard +x axis.
SmallVec sphere_to_rotated(const SmallVec& x) {
  const Eigen::Vector3d v = to_unit(x[0], x[1]);
  return from_unit({v.y(), v.z(), v.x()});
}

SmallVec sphere_from_rotated(const SmallVec& x) {
  const Eigen::Vector3d v = to_unit(x[0], x[1]);
  return from_unit({v.z(), v.x(), v.y()});
}

}  // namespace edyn::geometry
