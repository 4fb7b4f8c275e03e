#pragma once

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cnds/cocycle.hpp"
#include "cnds/errors.hpp"
#include "cnds/grid.hpp"
#include "cnds/systems.hpp"

namespace cnds {

enum class EscapePolicy : uint8_t {
  Absorb,  // escaped nodes feed a self-looped OUTSIDE sink
  Drop,    // escaped samples contribute no successors
};

struct TransitionMeta {
  double T = 0.0;
  double eps_pad = 0.0;
  int scheme = 2;  // lattice points per axis per box (corners); center always added
  EscapePolicy policy = EscapePolicy::Absorb;
  double h = 1e-3;
  std::string system;
  uint64_t seed = 0;
};

// Directed combinatorial multivalued map on skew nodes (base sample, box).
// Every edge (i,b) -> (i',b') has i' = step_map(i). The padded outer
// approximation realizes one-step (eps, T)-jumps at box resolution: each
// image box is dilated by floor((eps_pad + spread_i/2) / width_i) box
// layers per axis, where spread_i is the per-axis extent of the sampled
// image points.
struct TransitionGraph {
  Grid grid;
  BaseSampling sampling;
  TransitionMeta meta;
  std::vector<std::vector<uint32_t>> succ;
  std::vector<uint8_t> escaped;
  bool has_outside = false;

  uint64_t box_count() const { return grid.box_count(); }

  size_t node_count() const { return succ.size(); }

  uint32_t node_id(int base_index, BoxId box) const {
    return static_cast<uint32_t>(static_cast<uint64_t>(base_index) * box_count() + box);
  }

  uint32_t outside_id() const {
    return static_cast<uint32_t>(static_cast<uint64_t>(sampling.m) * box_count());
  }

  SkewNode node_of(uint32_t id) const {
    SkewNode n;
    n.base_index = static_cast<int>(id / box_count());
    n.box_index = id % box_count();
    return n;
  }

  bool is_outside(uint32_t id) const { return has_outside && id == outside_id(); }
};

namespace detail {

// Sample points of a box: a scheme^dim lattice spanning the box (slightly
// shrunk so corner samples index into their own box), plus the center.
inline void box_sample_points(const Grid& g, BoxId box, int scheme,
                              std::vector<Vec>& out) {
  out.clear();
  const int d = g.dim();
  auto lo = g.box_lo(box);
  const double shrink = 1e-9;
  if (scheme >= 2) {
    std::vector<int> idx(d, 0);
    while (true) {
      Vec pt(d);
      for (int a = 0; a < d; ++a) {
        double frac = static_cast<double>(idx[a]) / (scheme - 1);
        frac = shrink + frac * (1.0 - 2.0 * shrink);
        pt[a] = lo[a] + frac * g.width(a);
      }
      out.push_back(std::move(pt));
      int a = 0;
      for (; a < d; ++a) {
        if (++idx[a] < scheme) break;
        idx[a] = 0;
      }
      if (a == d) break;
    }
  }
  out.push_back(g.center(box));
}

// Box union covering an image point cloud, each hit box dilated by
// floor((eps_pad + spread/2) / width) layers per axis.
inline void cover_boxes(const Grid& grid, const std::vector<Vec>& images, double eps_pad,
                        std::vector<BoxId>& out) {
  out.clear();
  const int d = grid.dim();
  if (images.empty()) return;

  // per-axis spread of the image cloud (wrap-aware on circular axes)
  std::vector<double> spread(d, 0.0);
  for (int a = 0; a < d; ++a) {
    double span = grid.axes[a].hi - grid.axes[a].lo;
    double ref = images[0][a];
    double lo = 0.0, hi = 0.0;
    for (const auto& img : images) {
      double delta = img[a] - ref;
      if (grid.axes[a].circular) {
        delta = wrap_mod(delta + span / 2.0, span) - span / 2.0;
      }
      lo = std::min(lo, delta);
      hi = std::max(hi, delta);
    }
    spread[a] = hi - lo;
  }
  std::vector<int64_t> pad(d), pad_eps(d);
  for (int a = 0; a < d; ++a) {
    pad[a] = static_cast<int64_t>(
        std::floor((eps_pad + 0.5 * spread[a]) / grid.width(a) + 1e-12));
    pad_eps[a] = static_cast<int64_t>(std::floor(eps_pad / grid.width(a) + 1e-12));
  }

  // index-space bounding interval of the hit boxes per non-circular axis;
  // the spread dilation is clipped to this interval plus the eps layers,
  // which keeps the cover outer for a connected image without letting the
  // symmetric point dilation overshoot far past the image itself
  std::vector<int64_t> clip_lo(d, std::numeric_limits<int64_t>::max());
  std::vector<int64_t> clip_hi(d, std::numeric_limits<int64_t>::min());
  for (const auto& img : images) {
    auto hit = grid.box_of(img);
    if (!hit) continue;
    auto multi = grid.multi_of(*hit);
    for (int a = 0; a < d; ++a) {
      auto v = static_cast<int64_t>(multi[a]);
      clip_lo[a] = std::min(clip_lo[a], v);
      clip_hi[a] = std::max(clip_hi[a], v);
    }
  }
  for (int a = 0; a < d; ++a) {
    clip_lo[a] -= pad_eps[a] + 1;
    clip_hi[a] += pad_eps[a] + 1;
  }

  for (const auto& img : images) {
    auto hit = grid.box_of(img);
    if (!hit) continue;
    auto multi = grid.multi_of(*hit);
    // dilate by pad[a] box layers per axis
    std::vector<int64_t> off(d);
    for (int a = 0; a < d; ++a) off[a] = -pad[a];
    while (true) {
      std::vector<uint64_t> m2(d);
      bool ok = true;
      for (int a = 0; a < d; ++a) {
        int64_t n = static_cast<int64_t>(grid.cells(a));
        int64_t v = static_cast<int64_t>(multi[a]) + off[a];
        if (grid.axes[a].circular) {
          v = ((v % n) + n) % n;
        } else if (v < 0 || v >= n || v < clip_lo[a] || v > clip_hi[a]) {
          ok = false;
          break;
        }
        m2[a] = static_cast<uint64_t>(v);
      }
      if (ok) out.push_back(grid.index_of(m2));
      int a = 0;
      for (; a < d; ++a) {
        if (++off[a] <= pad[a]) break;
        off[a] = -pad[a];
      }
      if (a == d) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

inline void collect_successors(const TransitionGraph& g, int target_base,
                               const std::vector<Vec>& images,
                               std::vector<uint32_t>& out) {
  out.clear();
  std::vector<BoxId> boxes;
  cover_boxes(g.grid, images, g.meta.eps_pad, boxes);
  for (BoxId b : boxes) out.push_back(g.node_id(target_base, b));
}

}  // namespace detail

// Outer approximation of the time-T skew-product map. Deterministic:
// node images are independent, so the result does not depend on worker
// count or evaluation order.
inline TransitionGraph build_transition(const CocycleSystem& sys, const Grid& grid,
                                        const BaseSampling& sampling,
                                        const TransitionMeta& meta_in, int workers = 1) {
  TransitionGraph g;
  g.grid = grid;
  g.sampling = sampling;
  g.meta = meta_in;
  g.meta.T = sampling.T;
  g.meta.h = sys.integrator.h;
  g.meta.system = sys.name;
  if (g.meta.scheme < 1) throw ConfigError("sample scheme must be >= 1 point per axis");

  const uint64_t nbox = grid.box_count();
  const uint64_t plain = static_cast<uint64_t>(sampling.m) * nbox;
  g.has_outside = g.meta.policy == EscapePolicy::Absorb;
  const size_t total = plain + (g.has_outside ? 1 : 0);
  g.succ.assign(total, {});
  g.escaped.assign(total, 0);
  if (g.has_outside) g.succ[plain] = {static_cast<uint32_t>(plain)};  // self-looped sink

  auto work = [&](uint64_t node_lo, uint64_t node_hi) {
    std::vector<Vec> points, images;
    for (uint64_t id = node_lo; id < node_hi; ++id) {
      int bi = static_cast<int>(id / nbox);
      BoxId box = id % nbox;
      detail::box_sample_points(grid, box, g.meta.scheme, points);
      images.clear();
      bool esc = false;
      for (const auto& pt : points) {
        try {
          Vec img = evolve(sys, sampling.samples[bi], pt, sampling.T);
          if (grid.box_of(img))
            images.push_back(std::move(img));
          else
            esc = true;
        } catch (const Diverged&) {
          esc = true;
        }
      }
      auto& out = g.succ[id];
      detail::collect_successors(g, sampling.step_map[bi], images, out);
      if (esc) {
        g.escaped[id] = 1;
        if (g.has_outside) {
          out.push_back(static_cast<uint32_t>(plain));
          std::sort(out.begin(), out.end());
          out.erase(std::unique(out.begin(), out.end()), out.end());
        }
      }
    }
  };

  workers = std::max(1, workers);
  if (workers == 1 || plain < 256) {
    work(0, plain);
  } else {
    std::vector<std::thread> pool;
    uint64_t chunk = (plain + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      uint64_t lo = std::min<uint64_t>(w * chunk, plain);
      uint64_t hi = std::min<uint64_t>(lo + chunk, plain);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Portable graph file, format CNDS1: text header of key=value lines, then
// one line per node `id: succ succ ...`, escaped nodes flagged `id!:`.

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void save_graph(const TransitionGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "CNDS1\n";
  out << "system=" << g.meta.system << "\n";
  out << "dim=" << g.grid.dim() << "\n";
  for (int a = 0; a < g.grid.dim(); ++a) {
    const auto& ax = g.grid.axes[a];
    out << "axis." << a << "=" << detail::fmt_double(ax.lo) << " "
        << detail::fmt_double(ax.hi) << " " << ax.depth << " " << (ax.circular ? 1 : 0)
        << "\n";
  }
  out << "base.kind=" << static_cast<int>(g.sampling.base.kind) << "\n";
  out << "base.period=" << detail::fmt_double(g.sampling.base.period) << "\n";
  out << "base.size=" << g.sampling.base.size << "\n";
  out << "base.window=" << detail::fmt_double(g.sampling.base.window_lo) << " "
      << detail::fmt_double(g.sampling.base.window_hi) << "\n";
  if (g.sampling.base.kind == BaseKind::FiniteSet) {
    out << "base.permutation=";
    for (size_t i = 0; i < g.sampling.base.permutation.size(); ++i)
      out << (i ? " " : "") << g.sampling.base.permutation[i];
    out << "\n";
  }
  out << "m=" << g.sampling.m << "\n";
  out << "T=" << detail::fmt_double(g.sampling.T) << "\n";
  out << "eps_pad=" << detail::fmt_double(g.meta.eps_pad) << "\n";
  out << "scheme=" << g.meta.scheme << "\n";
  out << "policy=" << (g.meta.policy == EscapePolicy::Absorb ? "absorb" : "drop") << "\n";
  out << "h=" << detail::fmt_double(g.meta.h) << "\n";
  out << "seed=" << g.meta.seed << "\n";
  out << "nodes=" << g.node_count() << "\n";
  size_t edges = 0;
  for (const auto& s : g.succ) edges += s.size();
  out << "edges=" << edges << "\n";
  out << "@\n";
  for (size_t id = 0; id < g.node_count(); ++id) {
    out << id;
    if (g.escaped[id]) out << "!";
    out << ":";
    for (uint32_t s : g.succ[id]) out << " " << s;
    out << "\n";
  }
  if (!out) throw ConfigError("write failure: " + path);
}

inline TransitionGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw CorruptHeader("empty graph file: " + path);
  if (line != "CNDS1") {
    if (line.rfind("CNDS", 0) == 0)
      throw FormatVersionMismatch("unsupported graph format version: " + line);
    throw CorruptHeader("bad magic in graph file: " + path);
  }

  TransitionGraph g;
  int dim = -1;
  size_t nodes = 0, edges = 0;
  bool have_nodes = false;
  std::vector<GridAxis> axes;
  BaseFlow base;
  int base_kind = 0;
  std::vector<int> perm;
  int m = 1;
  double T = 0.0;

  while (std::getline(in, line)) {
    if (line == "@") break;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw CorruptHeader("malformed header line: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    std::istringstream iss(val);
    if (key == "system") {
      g.meta.system = val;
    } else if (key == "dim") {
      iss >> dim;
      axes.resize(dim);
    } else if (key.rfind("axis.", 0) == 0) {
      int a = std::stoi(key.substr(5));
      if (a < 0 || a >= dim) throw CorruptHeader("axis index out of range");
      int circ = 0;
      iss >> axes[a].lo >> axes[a].hi >> axes[a].depth >> circ;
      axes[a].circular = circ != 0;
    } else if (key == "base.kind") {
      iss >> base_kind;
    } else if (key == "base.period") {
      iss >> base.period;
    } else if (key == "base.size") {
      iss >> base.size;
    } else if (key == "base.window") {
      iss >> base.window_lo >> base.window_hi;
    } else if (key == "base.permutation") {
      int v;
      while (iss >> v) perm.push_back(v);
    } else if (key == "m") {
      iss >> m;
    } else if (key == "T") {
      iss >> T;
    } else if (key == "eps_pad") {
      iss >> g.meta.eps_pad;
    } else if (key == "scheme") {
      iss >> g.meta.scheme;
    } else if (key == "policy") {
      g.meta.policy = val == "absorb" ? EscapePolicy::Absorb : EscapePolicy::Drop;
    } else if (key == "h") {
      iss >> g.meta.h;
    } else if (key == "seed") {
      iss >> g.meta.seed;
    } else if (key == "nodes") {
      iss >> nodes;
      have_nodes = true;
    } else if (key == "edges") {
      iss >> edges;
    } else {
      throw CorruptHeader("unknown header key: " + key);
    }
  }
  if (!have_nodes || dim <= 0) throw CorruptHeader("incomplete header in " + path);

  base.kind = static_cast<BaseKind>(base_kind);
  base.permutation = perm;
  g.grid.axes = axes;
  switch (base.kind) {
    case BaseKind::TrivialPoint:
      g.sampling = sample_base(base, m, T);
      break;
    case BaseKind::FiniteSet:
      g.sampling = sample_base(base, m, T);
      break;
    default:
      g.sampling = sample_base(base, m);
      break;
  }
  g.meta.T = g.sampling.T;

  const uint64_t plain = static_cast<uint64_t>(m) * g.grid.box_count();
  g.has_outside = nodes == plain + 1;
  if (nodes != plain && !g.has_outside)
    throw CorruptHeader("node count inconsistent with grid/sampling header");

  g.succ.assign(nodes, {});
  g.escaped.assign(nodes, 0);
  size_t seen = 0, edge_seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw CorruptHeader("malformed node line: " + line);
    std::string head = line.substr(0, colon);
    bool esc = !head.empty() && head.back() == '!';
    if (esc) head.pop_back();
    size_t id = std::stoull(head);
    if (id >= nodes) throw CorruptHeader("node id out of range: " + head);
    g.escaped[id] = esc ? 1 : 0;
    std::istringstream iss(line.substr(colon + 1));
    uint32_t s;
    while (iss >> s) {
      if (s >= nodes) throw CorruptHeader("successor id out of range");
      g.succ[id].push_back(s);
      ++edge_seen;
    }
    ++seen;
  }
  if (seen != nodes) throw CorruptHeader("truncated graph file: " + path);
  if (edge_seen != edges) throw CorruptHeader("edge count mismatch in " + path);
  return g;
}

}  // namespace cnds
