#include "edyn/sde/potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace edyn::sde {

DriftPotential::DriftPotential(ValueFn value, GradientFn gradient)
    : value_(std::move(value)), gradient_(std::move(gradient)) {}

DriftPotential DriftPotential::zero() {
  DriftPotential p([](std::span<const double>) { return 0.0; },
                   [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); });
  p.zero_ = true;
  return p;
}

DriftPotential DriftPotential::linear(std::vector<double> g) {
  auto shared = std::make_shared<const std::vector<double>>(std::move(g));
  return DriftPotential(
      [shared](std::span<const double> x) {
        if (x.size() != shared->size()) throw std::invalid_argument("linear potential: dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (*shared)[i] * x[i];
        return s;
      },
      [shared](std::span<const double> x, std::span<double> out) {
        if (x.size() != shared->size()) throw std::invalid_argument("linear potential: dimension mismatch");
        std::copy(shared->begin(), shared->end(), out.begin());
      });
}

namespace {

struct GridSampler {
  geometry::GridSpec grid;
  std::vector<double> values;
  std::vector<double> grads;  // node-major, dim components per node

  // Per-axis lower node index and weight of the upper node.
  void bracket(std::span<const double> x, std::vector<int>& i0, std::vector<int>& i1, std::vector<double>& w) const {
    const int n = grid.dim();
    for (int a = 0; a < n; ++a) {
      const auto& ax = grid.axis(a);
      double s = (x[static_cast<std::size_t>(a)] - ax.lower) / ax.spacing - 0.5;
      if (ax.topology == geometry::Topology::periodic) {
        s = s - ax.count * std::floor(s / ax.count);
        int lo = static_cast<int>(std::floor(s));
        const double f = s - lo;
        lo %= ax.count;
        i0[static_cast<std::size_t>(a)] = lo;
        i1[static_cast<std::size_t>(a)] = (lo + 1) % ax.count;
        w[static_cast<std::size_t>(a)] = f;
      } else {
        s = std::clamp(s, 0.0, static_cast<double>(ax.count - 1));
        const int lo = std::min(static_cast<int>(std::floor(s)), ax.count - 2);
        i0[static_cast<std::size_t>(a)] = lo;
        i1[static_cast<std::size_t>(a)] = lo + 1;
        w[static_cast<std::size_t>(a)] = s - lo;
      }
    }
  }

  template <class F>
  void for_corners(std::span<const double> x, F&& f) const {
    const int n = grid.dim();
    std::vector<int> i0(static_cast<std::size_t>(n)), i1(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    bracket(x, i0, i1, w);
    for (int corner = 0; corner < (1 << n); ++corner) {
      std::size_t idx = 0;
      double weight = 1.0;
      for (int a = 0; a < n; ++a) {
        const bool up = (corner >> a) & 1;
        const auto ua = static_cast<std::size_t>(a);
        idx += static_cast<std::size_t>(up ? i1[ua] : i0[ua]) * grid.stride(a);
        weight *= up ? w[ua] : 1.0 - w[ua];
      }
      f(idx, weight);
    }
  }
};

}  // namespace

DriftPotential DriftPotential::from_grid(const geometry::GridField& field) {
  const auto& g = field.grid;
  if (field.values.size() != g.size()) throw std::invalid_argument("drift potential: field size does not match grid");
  auto s = std::make_shared<GridSampler>();
  s->grid = g;
  s->values = field.values;
  const int n = g.dim();
  s->grads.assign(g.size() * static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < n; ++a) {
      const std::ptrdiff_t p = g.neighbor(i, a, +1), m = g.neighbor(i, a, -1);
      const double fp = p >= 0 ? field.values[static_cast<std::size_t>(p)] : field.values[i];
      const double fm = m >= 0 ? field.values[static_cast<std::size_t>(m)] : field.values[i];
      const double span = (p >= 0 ? 1.0 : 0.0) + (m >= 0 ? 1.0 : 0.0);
      s->grads[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] =
          span > 0 ? (fp - fm) / (span * g.axis(a).spacing) : 0.0;
    }
  return DriftPotential(
      [s](std::span<const double> x) {
        double v = 0.0;
        s->for_corners(x, [&](std::size_t idx, double w) { v += w * s->values[idx]; });
        return v;
      },
      [s, n](std::span<const double> x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        s->for_corners(x, [&](std::size_t idx, double w) {
          for (int a = 0; a < n; ++a)
            out[static_cast<std::size_t>(a)] += w * s->grads[idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)];
        });
      });
}

double DriftPotential::value(std::span<const double> x) const {
  if (!value_) throw std::logic_error("drift potential is not set");
  return value_(x);
}

void DriftPotential::gradient(std::span<const double> x, std::span<double> out) const {
  if (!gradient_) throw std::logic_error("drift potential has no gradient");
  gradient_(x, out);
}

}  // namespace edyn::sde
