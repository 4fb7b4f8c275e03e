#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "cnds/base_flow.hpp"
#include "cnds/cocycle.hpp"
#include "cnds/errors.hpp"

namespace cnds {

using BoxId = uint64_t;

constexpr uint64_t kDefaultBoxCap = uint64_t{1} << 26;

// Uniform rectangular partition of a compact window into 2^k boxes per
// axis. Boxes are half-open [lo, hi) except at the upper window edge,
// which is absorbed into the last box. Indexing is row-major with axis 0
// slowest.
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int depth = 1;           // 2^depth boxes
  bool circular = false;   // wrap adjacency and distances
};

struct Grid {
  std::vector<GridAxis> axes;

  int dim() const { return static_cast<int>(axes.size()); }

  uint64_t cells(int axis) const { return uint64_t{1} << axes[axis].depth; }

  uint64_t box_count() const {
    uint64_t n = 1;
    for (int a = 0; a < dim(); ++a) n *= cells(a);
    return n;
  }

  double width(int axis) const {
    return (axes[axis].hi - axes[axis].lo) / static_cast<double>(cells(axis));
  }

  // Euclidean diameter of a box; identical for all boxes.
  double diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) s += width(a) * width(a);
    return std::sqrt(s);
  }

  BoxId index_of(const std::vector<uint64_t>& multi) const {
    BoxId id = 0;
    for (int a = 0; a < dim(); ++a) id = id * cells(a) + multi[a];
    return id;
  }

  std::vector<uint64_t> multi_of(BoxId id) const {
    std::vector<uint64_t> multi(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      multi[a] = id % cells(a);
      id /= cells(a);
    }
    return multi;
  }

  // Box containing a point; nullopt outside the window (circular axes wrap).
  std::optional<BoxId> box_of(const Vec& x) const {
    std::vector<uint64_t> multi(dim());
    for (int a = 0; a < dim(); ++a) {
      const auto& ax = axes[a];
      double v = x[a];
      if (ax.circular) v = ax.lo + wrap_mod(v - ax.lo, ax.hi - ax.lo);
      if (v < ax.lo || v > ax.hi) return std::nullopt;
      auto n = cells(a);
      auto i = static_cast<int64_t>(std::floor((v - ax.lo) / width(a)));
      if (i < 0) i = 0;
      if (i >= static_cast<int64_t>(n)) i = static_cast<int64_t>(n) - 1;
      multi[a] = static_cast<uint64_t>(i);
    }
    return index_of(multi);
  }

  Vec center(BoxId id) const {
    auto multi = multi_of(id);
    Vec c(dim());
    for (int a = 0; a < dim(); ++a)
      c[a] = axes[a].lo + (static_cast<double>(multi[a]) + 0.5) * width(a);
    return c;
  }

  Vec box_lo(BoxId id) const {
    auto multi = multi_of(id);
    Vec v(dim());
    for (int a = 0; a < dim(); ++a)
      v[a] = axes[a].lo + static_cast<double>(multi[a]) * width(a);
    return v;
  }

  Vec box_hi(BoxId id) const {
    auto v = box_lo(id);
    for (int a = 0; a < dim(); ++a) v[a] += width(a);
    return v;
  }

  // Euclidean distance from a point to a closed box; 0 inside.
  double dist_to_box(const Vec& x, BoxId id) const {
    auto lo = box_lo(id);
    auto hi = box_hi(id);
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) {
      double d;
      if (axes[a].circular) {
        double span = axes[a].hi - axes[a].lo;
        double v = axes[a].lo + wrap_mod(x[a] - axes[a].lo, span);
        if (v >= lo[a] && v <= hi[a]) {
          d = 0.0;
        } else {
          double d1 = std::min(std::abs(v - lo[a]), span - std::abs(v - lo[a]));
          double d2 = std::min(std::abs(v - hi[a]), span - std::abs(v - hi[a]));
          d = std::min(d1, d2);
        }
      } else {
        d = std::max({lo[a] - x[a], x[a] - hi[a], 0.0});
      }
      s += d * d;
    }
    return std::sqrt(s);
  }
};

inline Grid build_grid(const Vec& lo, const Vec& hi, const std::vector<int>& depth,
                       const std::vector<bool>& circular = {},
                       uint64_t box_cap = kDefaultBoxCap) {
  if (lo.size() != hi.size() || lo.size() != depth.size())
    throw ConfigError("grid window/depth dimension mismatch");
  Grid g;
  uint64_t count = 1;
  for (size_t a = 0; a < lo.size(); ++a) {
    if (!(lo[a] < hi[a])) throw ConfigError("grid window requires lo < hi per axis");
    if (depth[a] < 1) throw ConfigError("grid depth must be >= 1 per axis");
    GridAxis ax;
    ax.lo = lo[a];
    ax.hi = hi[a];
    ax.depth = depth[a];
    ax.circular = a < circular.size() && circular[a];
    g.axes.push_back(ax);
    uint64_t n = uint64_t{1} << depth[a];
    if (count > box_cap / n)
      throw TooManyBoxes("grid box count exceeds cap " + std::to_string(box_cap));
    count *= n;
  }
  return g;
}

// Depth incremented on the listed axes; every parent box is the exact
// union of its children.
inline Grid subdivide(const Grid& g, const std::vector<int>& axis_set,
                      uint64_t box_cap = kDefaultBoxCap) {
  Grid out = g;
  for (int a : axis_set) {
    if (a < 0 || a >= g.dim()) throw ConfigError("subdivide: axis out of range");
    out.axes[a].depth += 1;
  }
  uint64_t count = 1;
  for (int a = 0; a < out.dim(); ++a) {
    uint64_t n = out.cells(a);
    if (count > box_cap / n)
      throw TooManyBoxes("subdivided box count exceeds cap " + std::to_string(box_cap));
    count *= n;
  }
  return out;
}

// Parent box in `coarse` of a box of `fine`, where `fine` came from
// subdividing `coarse`.
inline BoxId parent_box(const Grid& fine, const Grid& coarse, BoxId id) {
  auto multi = fine.multi_of(id);
  std::vector<uint64_t> pm(multi.size());
  for (size_t a = 0; a < multi.size(); ++a)
    pm[a] = multi[a] >> (fine.axes[a].depth - coarse.axes[a].depth);
  return coarse.index_of(pm);
}

// Discretized base: m ordered samples and the index map realizing one
// time step theta_T. For periodic and finite bases the map is a
// permutation; for the real-line base it saturates at the window edge.
struct BaseSampling {
  BaseFlow base;
  int m = 1;
  double T = 1.0;
  std::vector<double> samples;
  std::vector<int> step_map;  // i -> j with theta_T(samples[i]) ~ samples[j]
};

inline BaseSampling sample_base(const BaseFlow& base, int m, double T_override = 0.0) {
  if (m < 1) throw ConfigError("sample count must be >= 1");
  BaseSampling s;
  s.base = base;
  s.m = m;
  switch (base.kind) {
    case BaseKind::TrivialPoint:
      if (m != 1) throw IncompatibleSampling("trivial-point base requires m = 1");
      if (!(T_override > 0.0))
        throw ConfigError("trivial-point base requires an explicit time step T");
      s.T = T_override;
      s.samples = {0.0};
      s.step_map = {0};
      break;
    case BaseKind::PeriodicCircle:
      s.T = base.period / m;
      for (int i = 0; i < m; ++i) {
        s.samples.push_back(i * s.T);
        s.step_map.push_back((i + 1) % m);
      }
      break;
    case BaseKind::FiniteSet:
      if (m != base.size)
        throw IncompatibleSampling("finite-set base requires m = size");
      s.T = T_override > 0.0 ? T_override : 1.0;
      for (int i = 0; i < m; ++i) {
        s.samples.push_back(static_cast<double>(i));
        s.step_map.push_back(base.permutation[i]);
      }
      break;
    case BaseKind::RealLine:
      s.T = (base.window_hi - base.window_lo) / m;
      for (int i = 0; i < m; ++i) {
        s.samples.push_back(base.window_lo + i * s.T);
        s.step_map.push_back(std::min(i + 1, m - 1));  // clamp at the window edge
      }
      break;
  }
  return s;
}

struct SkewNode {
  int base_index = 0;
  BoxId box_index = 0;
};

}  // namespace cnds
