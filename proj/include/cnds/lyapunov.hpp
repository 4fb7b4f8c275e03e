#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cnds/cocycle.hpp"
#include "cnds/conley.hpp"
#include "cnds/errors.hpp"
#include "cnds/grid.hpp"

namespace cnds {

// Discrete pair function: 0 on A, 1 on the coarse repeller X-B, and a
// longest-path rank normalized into (0,1) on the transient set B-A. The
// transient set is acyclic with edges only into itself or A, so the rank
// is well defined; a cycle there means the basin computation is broken.
inline std::vector<double> pair_function(const Digraph& g, const MorseDecomposition& md,
                                         const AttractorRepellerPair& pair,
                                         uint64_t* rank_max_out = nullptr) {
  const uint32_t n = static_cast<uint32_t>(g.size());
  std::vector<double> l(n, 0.0);
  std::vector<uint32_t> trans;
  std::vector<uint8_t> in_trans(n, 0);
  for (uint32_t v = 0; v < n; ++v) {
    if (!pair.B[v]) {
      l[v] = 1.0;
    } else if (!pair.A[v]) {
      trans.push_back(v);
      in_trans[v] = 1;
    }
  }
  if (rank_max_out) *rank_max_out = 0;
  if (trans.empty()) return l;

  // Longest path to A, peeling from rank-1 nodes (all successors in A).
  std::vector<uint32_t> out_count(n, 0);
  std::vector<std::vector<uint32_t>> preds(n);
  std::vector<uint64_t> rank(n, 0);
  for (uint32_t v : trans) {
    for (uint32_t w : g[v]) {
      if (in_trans[w]) {
        ++out_count[v];
        preds[w].push_back(v);
      } else if (!pair.A[w]) {
        throw CycleInTransientSet("transient node has a successor outside B");
      }
    }
  }
  std::vector<uint32_t> queue;
  for (uint32_t v : trans) {
    if (out_count[v] == 0) {
      rank[v] = 1;
      queue.push_back(v);
    }
  }
  size_t head = 0;
  uint64_t rank_max = 0;
  while (head < queue.size()) {
    uint32_t v = queue[head++];
    rank_max = std::max(rank_max, rank[v]);
    for (uint32_t u : preds[v]) {
      rank[u] = std::max(rank[u], rank[v] + 1);
      if (--out_count[u] == 0) queue.push_back(u);
    }
  }
  if (head != trans.size())
    throw CycleInTransientSet("cycle detected in the transient set B-A");
  if (rank_max_out) *rank_max_out = rank_max;
  for (uint32_t v : trans)
    l[v] = static_cast<double>(rank[v]) / static_cast<double>(rank_max + 1);
  return l;
}

struct LyapunovField {
  std::vector<AttractorRepellerPair> pairs;
  std::vector<std::vector<double>> l_n;  // per pair, per node
  std::vector<double> L;                 // per node
  std::vector<uint64_t> rank_max;        // per pair
  double truncation_error = 0.0;         // 3^-N for the N enumerated pairs
};

// L(v) = sum over pairs of 2 l_n(v) / 3^n, truncated at the pair count.
inline LyapunovField complete_lyapunov(const Digraph& g, const MorseDecomposition& md,
                                       std::vector<AttractorRepellerPair> pairs) {
  LyapunovField field;
  field.pairs = std::move(pairs);
  const uint32_t n = static_cast<uint32_t>(g.size());
  field.L.assign(n, 0.0);
  double weight = 1.0;
  for (const auto& pr : field.pairs) {
    weight /= 3.0;
    uint64_t rmax = 0;
    auto l = pair_function(g, md, pr, &rmax);
    for (uint32_t v = 0; v < n; ++v) field.L[v] += 2.0 * weight * l[v];
    field.l_n.push_back(std::move(l));
    field.rank_max.push_back(rmax);
  }
  field.truncation_error = std::pow(3.0, -static_cast<double>(field.pairs.size()));
  return field;
}

// Property checks of Def 2.6 on the graph Lyapunov function:
// (a) constant on SCCs, (b) non-increasing along every edge and strictly
// decreasing between SCCs when some pair function drops, (c) ternary
// digits {0,2} on chain-recurrent nodes, (d) injective on cyclic SCCs.
struct LyapunovReport {
  size_t edge_increase_violations = 0;
  size_t scc_constant_violations = 0;
  size_t strict_decrease_violations = 0;
  size_t cantor_violations = 0;
  size_t injectivity_violations = 0;

  bool all_pass() const {
    return edge_increase_violations == 0 && scc_constant_violations == 0 &&
           strict_decrease_violations == 0 && cantor_violations == 0 &&
           injectivity_violations == 0;
  }
};

inline LyapunovReport check_lyapunov(const Digraph& g, const MorseDecomposition& md,
                                     const LyapunovField& field) {
  LyapunovReport rep;
  const uint32_t n = static_cast<uint32_t>(g.size());
  const size_t N = field.pairs.size();
  for (uint32_t v = 0; v < n; ++v) {
    for (uint32_t w : g[v]) {
      if (field.L[w] > field.L[v]) ++rep.edge_increase_violations;
      if (md.scc_id[v] == md.scc_id[w] && field.L[v] != field.L[w])
        ++rep.scc_constant_violations;
      if (md.scc_id[v] != md.scc_id[w]) {
        bool drops = false;
        for (size_t k = 0; k < N; ++k)
          if (field.l_n[k][w] < field.l_n[k][v]) drops = true;
        if (drops && !(field.L[w] < field.L[v])) ++rep.strict_decrease_violations;
      }
    }
  }
  // (c): on chain-recurrent nodes every pair function must be exactly 0 or
  // 1, and L must match the resulting digit expansion bit for bit.
  for (uint32_t v = 0; v < n; ++v) {
    if (!md.node_cyclic(v)) continue;
    double rebuilt = 0.0;
    double weight = 1.0;
    bool digits_ok = true;
    for (size_t k = 0; k < N; ++k) {
      weight /= 3.0;
      double lv = field.l_n[k][v];
      if (lv != 0.0 && lv != 1.0) digits_ok = false;
      rebuilt += 2.0 * weight * lv;
    }
    if (!digits_ok || rebuilt != field.L[v]) ++rep.cantor_violations;
  }
  // (d): distinct cyclic SCCs get distinct values.
  std::vector<double> values;
  for (uint32_t c = 0; c < md.scc_count(); ++c) {
    if (!md.cyclic[c]) continue;
    values.push_back(field.L[md.scc_nodes[c].front()]);
  }
  std::sort(values.begin(), values.end());
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] == values[i - 1]) ++rep.injectivity_violations;
  return rep;
}

// Euclidean distance from a point to a box union; the Lemma 4.3 proof
// convention sets the distance to 1 when the set is empty.
inline double dist_to_box_set(const Grid& grid, const Vec& x,
                              const std::vector<BoxId>& boxes) {
  if (boxes.empty()) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (BoxId b : boxes) best = std::min(best, grid.dist_to_box(x, b));
  return best;
}

inline double lambda_ratio(const Grid& grid, const Vec& x, const std::vector<BoxId>& A_boxes,
                           const std::vector<BoxId>& R_boxes) {
  double da = dist_to_box_set(grid, x, A_boxes);
  if (da == 0.0) return 0.0;
  double dr = dist_to_box_set(grid, x, R_boxes);
  return da / (da + dr);
}

struct LyapunovTrace {
  std::vector<double> t;
  std::vector<double> lambda;     // lambda along the orbit
  std::vector<double> g;          // suffix sup of lambda
  std::vector<double> l_partial;  // running quadrature of e^{-t} g
  double l_value = 0.0;
  double tail_bound = 0.0;
};

// Samples lambda along the orbit of (p, x) at step dt up to the horizon,
// forms g as the suffix supremum, and integrates e^{-t} g by the
// composite trapezoid rule. The tail of the integral is bounded by
// e^{-horizon} since 0 <= g <= 1.
inline LyapunovTrace lyapunov_trace(const CocycleSystem& sys, double p, const Vec& x0,
                                    double horizon, double dt,
                                    const Grid& grid, const std::vector<BoxId>& A_boxes,
                                    const std::vector<BoxId>& R_boxes) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw ConfigError("horizon and dt must be positive");
  LyapunovTrace tr;
  const int steps = static_cast<int>(std::ceil(horizon / dt - 1e-12));
  Vec x = x0;
  double pc = p;
  for (int k = 0; k <= steps; ++k) {
    double tk = std::min(k * dt, horizon);
    for (int a = 0; a < sys.dim; ++a) {
      if (!grid.axes[a].circular && (x[a] < sys.window_lo[a] || x[a] > sys.window_hi[a]))
        throw Diverged("trajectory left the state window at t = " + std::to_string(tk));
    }
    tr.t.push_back(tk);
    tr.lambda.push_back(lambda_ratio(grid, x, A_boxes, R_boxes));
    if (k < steps) {
      double step = std::min(dt, horizon - tk);
      x = evolve(sys, pc, x, step);
      pc = shift(sys.base, pc, step);
    }
  }
  tr.g.resize(tr.lambda.size());
  double running = 0.0;
  for (size_t i = tr.lambda.size(); i-- > 0;) {
    running = std::max(running, tr.lambda[i]);
    tr.g[i] = running;
  }
  tr.l_partial.resize(tr.t.size(), 0.0);
  double acc = 0.0;
  for (size_t i = 1; i < tr.t.size(); ++i) {
    double h = tr.t[i] - tr.t[i - 1];
    acc += 0.5 * h * (std::exp(-tr.t[i - 1]) * tr.g[i - 1] + std::exp(-tr.t[i]) * tr.g[i]);
    tr.l_partial[i] = acc;
  }
  tr.l_value = acc;
  tr.tail_bound = std::exp(-horizon);
  return tr;
}

inline double sup_g(const CocycleSystem& sys, double p, const Vec& x, double horizon,
                    double dt, const Grid& grid, const std::vector<BoxId>& A_boxes,
                    const std::vector<BoxId>& R_boxes) {
  return lyapunov_trace(sys, p, x, horizon, dt, grid, A_boxes, R_boxes).g.front();
}

struct LyapunovValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

inline LyapunovValue lyapunov_l(const CocycleSystem& sys, double p, const Vec& x,
                                double horizon, double dt, const Grid& grid,
                                const std::vector<BoxId>& A_boxes,
                                const std::vector<BoxId>& R_boxes) {
  auto tr = lyapunov_trace(sys, p, x, horizon, dt, grid, A_boxes, R_boxes);
  return {tr.l_value, tr.tail_bound};
}

}  // namespace cnds
