#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "cnds/cocycle.hpp"
#include "cnds/conley.hpp"
#include "cnds/errors.hpp"
#include "cnds/grid.hpp"
#include "cnds/transition.hpp"

namespace cnds {

// An explicit (eps, T)-chain: points x_1..x_{n+1}, leg times t_i = T,
// and the measured jump defects d_i = |phi(T, p_i, x_i) - x_{i+1}|.
struct ChainCertificate {
  std::vector<Vec> points;
  std::vector<double> times;
  std::vector<double> defects;
  double eps = 0.0;
};

namespace detail {

inline Vec clamp_to_box(const Grid& grid, const Vec& x, BoxId box) {
  auto lo = grid.box_lo(box);
  auto hi = grid.box_hi(box);
  Vec out(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    double v = x[a];
    if (grid.axes[a].circular) {
      double span = grid.axes[a].hi - grid.axes[a].lo;
      v = grid.axes[a].lo + wrap_mod(v - grid.axes[a].lo, span);
      if (v < lo[a] || v > hi[a]) {
        double d1 = std::min(std::abs(v - lo[a]), span - std::abs(v - lo[a]));
        double d2 = std::min(std::abs(v - hi[a]), span - std::abs(v - hi[a]));
        v = d1 <= d2 ? lo[a] : hi[a];
      }
    } else {
      v = std::min(std::max(v, lo[a]), hi[a]);
    }
    out[a] = v;
  }
  return out;
}

inline double state_dist(const CocycleSystem& sys, const Grid& grid, const Vec& a,
                         const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < sys.dim; ++i) {
    double d = a[i] - b[i];
    if (grid.axes[i].circular) {
      double span = grid.axes[i].hi - grid.axes[i].lo;
      d = wrap_mod(d + span / 2.0, span) - span / 2.0;
    }
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// Searches for an (eps, T)-chain from x to y at fiber p: first a direct
// one-leg attempt, then a path search on a transiently built transition
// graph at box resolution <= eps/2 with padding eps/2, followed by
// leg-wise verification against direct integration. A nullopt answer
// means no chain was found at this resolution, not that none exists.
inline std::optional<ChainCertificate> numeric_chain(const CocycleSystem& sys, double p,
                                                     const Vec& x, const Vec& y, double eps,
                                                     double T, int max_legs = 4096,
                                                     int workers = 1) {
  if (!(eps > 0.0) || !(T > 0.0)) throw ConfigError("numeric chain requires eps, T > 0");

  auto one_leg = [&]() -> std::optional<ChainCertificate> {
    Vec img = evolve(sys, p, x, T);
    double d = 0.0;
    for (int a = 0; a < sys.dim; ++a) {
      double dd = img[a] - y[a];
      d += dd * dd;
    }
    d = std::sqrt(d);
    if (d < eps) {
      ChainCertificate c;
      c.points = {x, y};
      c.times = {T};
      c.defects = {d};
      c.eps = eps;
      return c;
    }
    return std::nullopt;
  };
  try {
    if (auto c = one_leg()) return c;
  } catch (const Diverged&) {
    return std::nullopt;
  }

  // grid at resolution <= eps/2 per axis
  std::vector<int> depth(sys.dim);
  std::vector<bool> circ(sys.dim, sys.state_circular);
  for (int a = 0; a < sys.dim; ++a) {
    double span = sys.window_hi[a] - sys.window_lo[a];
    int k = 1;
    while (span / std::pow(2.0, k) > eps / 2.0 && k < 22) ++k;
    depth[a] = k;
  }
  Grid grid = build_grid(sys.window_lo, sys.window_hi, depth, circ);

  BaseSampling sampling;
  switch (sys.base.kind) {
    case BaseKind::TrivialPoint:
      sampling = sample_base(sys.base, 1, T);
      break;
    case BaseKind::PeriodicCircle: {
      int m = std::max(1, static_cast<int>(std::llround(sys.base.period / T)));
      if (std::abs(m * T - sys.base.period) > 1e-9 * sys.base.period)
        throw IncompatibleSampling("chain leg time T must divide the base period");
      sampling = sample_base(sys.base, m);
      break;
    }
    case BaseKind::FiniteSet:
      sampling = sample_base(sys.base, sys.base.size, T);
      break;
    case BaseKind::RealLine: {
      double span = sys.base.window_hi - sys.base.window_lo;
      int m = std::max(1, static_cast<int>(std::llround(span / T)));
      if (std::abs(m * T - span) > 1e-9 * span)
        throw IncompatibleSampling("chain leg time T must divide the base window");
      sampling = sample_base(sys.base, m);
      break;
    }
  }

  TransitionMeta meta;
  meta.eps_pad = eps / 2.0;
  meta.scheme = 2;
  meta.policy = EscapePolicy::Drop;
  TransitionGraph g = build_transition(sys, grid, sampling, meta, workers);

  // base sample index nearest p
  int pi = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sampling.m; ++i) {
    double d = std::abs(sampling.samples[i] - p);
    if (sys.base.kind == BaseKind::PeriodicCircle)
      d = std::min(wrap_mod(d, sys.base.period), sys.base.period - wrap_mod(d, sys.base.period));
    if (d < best) {
      best = d;
      pi = i;
    }
  }

  auto bx = grid.box_of(x);
  auto by = grid.box_of(y);
  if (!bx || !by) return std::nullopt;
  uint32_t from = g.node_id(pi, *bx);

  // BFS to any node over y's box (the base sample reached is determined
  // by the leg count)
  std::vector<int64_t> parent(g.node_count(), -2);
  std::vector<uint32_t> queue{from};
  parent[from] = -1;
  std::optional<uint32_t> target;
  for (size_t head = 0; head < queue.size() && !target; ++head) {
    uint32_t v = queue[head];
    for (uint32_t w : g.succ[v]) {
      if (parent[w] != -2) continue;
      parent[w] = v;
      if (!g.is_outside(w) && g.node_of(w).box_index == *by) {
        target = w;
        break;
      }
      queue.push_back(w);
    }
  }
  if (!target) return std::nullopt;

  std::vector<uint32_t> path;
  for (int64_t cur = *target; cur != -1; cur = parent[cur])
    path.push_back(static_cast<uint32_t>(cur));
  std::reverse(path.begin(), path.end());
  if (static_cast<int>(path.size()) - 1 > max_legs) return std::nullopt;

  // verify leg by leg: each chain point is the closest point of the next
  // box to the true image of the previous point
  ChainCertificate cert;
  cert.eps = eps;
  cert.points.push_back(x);
  double pc = sampling.samples[pi];
  try {
    for (size_t i = 1; i < path.size(); ++i) {
      Vec img = evolve(sys, pc, cert.points.back(), sampling.T);
      Vec next = i + 1 == path.size()
                     ? y
                     : detail::clamp_to_box(grid, img, g.node_of(path[i]).box_index);
      double d = detail::state_dist(sys, grid, img, next);
      if (!(d < eps)) return std::nullopt;
      cert.points.push_back(std::move(next));
      cert.times.push_back(sampling.T);
      cert.defects.push_back(d);
      pc = shift(sys.base, pc, sampling.T);
    }
  } catch (const Diverged&) {
    return std::nullopt;
  }
  return cert;
}

}  // namespace cnds
