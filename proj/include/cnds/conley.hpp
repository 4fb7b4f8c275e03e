#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "cnds/errors.hpp"

namespace cnds {

// Adjacency lists on node ids; the conley algorithms are purely
// combinatorial and work on any digraph, not just transition graphs.
using Digraph = std::vector<std::vector<uint32_t>>;
using NodeMask = std::vector<uint8_t>;

inline size_t mask_count(const NodeMask& m) {
  size_t n = 0;
  for (uint8_t v : m) n += v;
  return n;
}

inline std::vector<uint32_t> mask_nodes(const NodeMask& m) {
  std::vector<uint32_t> out;
  for (uint32_t v = 0; v < m.size(); ++v)
    if (m[v]) out.push_back(v);
  return out;
}

// Chain-recurrent approximation: SCC partition with cyclic flags, the
// condensation DAG, and a topological order. The chain-recurrent node
// set is the union of cyclic SCCs (size > 1 or self-loop).
struct MorseDecomposition {
  std::vector<uint32_t> scc_id;                    // per node
  std::vector<uint8_t> cyclic;                     // per SCC
  std::vector<std::vector<uint32_t>> scc_nodes;    // per SCC, ascending node ids
  std::vector<std::vector<uint32_t>> condensation; // DAG edges on SCC ids
  std::vector<uint32_t> topo_order;                // SCC ids, sources first

  size_t scc_count() const { return cyclic.size(); }

  bool node_cyclic(uint32_t v) const { return cyclic[scc_id[v]]; }

  NodeMask chain_recurrent_mask(size_t n) const {
    NodeMask m(n, 0);
    for (uint32_t v = 0; v < n; ++v) m[v] = node_cyclic(v) ? 1 : 0;
    return m;
  }

  size_t cyclic_scc_count() const {
    size_t n = 0;
    for (uint8_t c : cyclic) n += c;
    return n;
  }
};

namespace detail {

// Iterative Tarjan over the nodes allowed by `mask` (nullptr = all).
// SCC ids are assigned in completion order, so every SCC has a larger id
// than the SCCs it reaches.
struct SccResult {
  std::vector<uint32_t> scc_id;  // UINT32_MAX for masked-out nodes
  uint32_t count = 0;
};

inline SccResult tarjan_scc(const Digraph& g, const NodeMask* mask = nullptr) {
  const uint32_t n = static_cast<uint32_t>(g.size());
  constexpr uint32_t kUnset = UINT32_MAX;
  SccResult res;
  res.scc_id.assign(n, kUnset);
  std::vector<uint32_t> index(n, kUnset), lowlink(n, 0);
  std::vector<uint8_t> on_stack(n, 0);
  std::vector<uint32_t> stack;
  uint32_t next_index = 0;

  struct Frame {
    uint32_t v;
    size_t edge;
  };
  std::vector<Frame> call;

  auto allowed = [&](uint32_t v) { return !mask || (*mask)[v]; };

  for (uint32_t root = 0; root < n; ++root) {
    if (!allowed(root) || index[root] != kUnset) continue;
    call.push_back({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& fr = call.back();
      uint32_t v = fr.v;
      if (fr.edge < g[v].size()) {
        uint32_t w = g[v][fr.edge++];
        if (!allowed(w)) continue;
        if (index[w] == kUnset) {
          call.push_back({w, 0});
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
      } else {
        if (lowlink[v] == index[v]) {
          while (true) {
            uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            res.scc_id[w] = res.count;
            if (w == v) break;
          }
          ++res.count;
        }
        call.pop_back();
        if (!call.empty()) {
          uint32_t parent = call.back().v;
          lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
        }
      }
    }
  }
  return res;
}

}  // namespace detail

inline MorseDecomposition morse(const Digraph& g) {
  const uint32_t n = static_cast<uint32_t>(g.size());
  auto scc = detail::tarjan_scc(g);
  MorseDecomposition md;
  md.scc_id = std::move(scc.scc_id);
  md.cyclic.assign(scc.count, 0);
  md.scc_nodes.assign(scc.count, {});
  md.condensation.assign(scc.count, {});
  for (uint32_t v = 0; v < n; ++v) md.scc_nodes[md.scc_id[v]].push_back(v);
  for (auto& nodes : md.scc_nodes) std::sort(nodes.begin(), nodes.end());
  for (uint32_t v = 0; v < n; ++v) {
    for (uint32_t w : g[v]) {
      if (md.scc_id[w] == md.scc_id[v]) {
        md.cyclic[md.scc_id[v]] = 1;  // size > 1 or self-loop
      } else {
        md.condensation[md.scc_id[v]].push_back(md.scc_id[w]);
      }
    }
  }
  for (auto& e : md.condensation) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  // Tarjan completion order is a reverse topological order of the condensation.
  md.topo_order.resize(scc.count);
  for (uint32_t c = 0; c < scc.count; ++c) md.topo_order[c] = scc.count - 1 - c;
  return md;
}

// Smallest forward-invariant node set containing the seed SCC: the union
// of SCCs reachable from the seed in the condensation (the end-point set
// of all chains starting there).
inline NodeMask attractor_from_seed(const Digraph& g, const MorseDecomposition& md,
                                    uint32_t seed_scc) {
  if (seed_scc >= md.scc_count()) throw ConfigError("attractor seed SCC out of range");
  std::vector<uint8_t> scc_in(md.scc_count(), 0);
  std::vector<uint32_t> stack{seed_scc};
  scc_in[seed_scc] = 1;
  while (!stack.empty()) {
    uint32_t c = stack.back();
    stack.pop_back();
    for (uint32_t d : md.condensation[c]) {
      if (!scc_in[d]) {
        scc_in[d] = 1;
        stack.push_back(d);
      }
    }
  }
  NodeMask mask(g.size(), 0);
  for (uint32_t c = 0; c < md.scc_count(); ++c)
    if (scc_in[c])
      for (uint32_t v : md.scc_nodes[c]) mask[v] = 1;
  return mask;
}

namespace detail {

inline Digraph reverse_graph(const Digraph& g) {
  Digraph r(g.size());
  for (uint32_t v = 0; v < g.size(); ++v)
    for (uint32_t w : g[v]) r[w].push_back(v);
  return r;
}

// Nodes reachable from `sources` within `mask` (sources included).
inline NodeMask reach_within(const Digraph& g, const NodeMask& mask,
                             const std::vector<uint32_t>& sources) {
  NodeMask seen(g.size(), 0);
  std::vector<uint32_t> stack;
  for (uint32_t s : sources) {
    if (mask[s] && !seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t w : g[v]) {
      if (mask[w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

// Cyclic nodes of the subgraph induced on `mask`.
inline std::vector<uint32_t> cyclic_nodes_within(const Digraph& g, const NodeMask& mask) {
  auto scc = tarjan_scc(g, &mask);
  std::vector<uint8_t> cyc(scc.count, 0);
  for (uint32_t v = 0; v < g.size(); ++v) {
    if (!mask[v]) continue;
    for (uint32_t w : g[v])
      if (mask[w] && scc.scc_id[w] == scc.scc_id[v]) cyc[scc.scc_id[v]] = 1;
  }
  std::vector<uint32_t> out;
  for (uint32_t v = 0; v < g.size(); ++v)
    if (mask[v] && cyc[scc.scc_id[v]]) out.push_back(v);
  return out;
}

}  // namespace detail

// Basin of a forward-invariant set A: the nodes from which every infinite
// walk eventually enters A. Equivalently, the complement of the nodes
// that reach a cyclic SCC of the subgraph with A's nodes deleted.
inline NodeMask basin(const Digraph& g, const MorseDecomposition& md, const NodeMask& A) {
  for (uint32_t v = 0; v < g.size(); ++v) {
    if (!A[v]) continue;
    for (uint32_t w : g[v])
      if (!A[w])
        throw NotForwardInvariant("basin: attractor set is not forward invariant");
  }
  NodeMask rest(g.size(), 0);
  for (uint32_t v = 0; v < g.size(); ++v) rest[v] = A[v] ? 0 : 1;
  auto cyc = detail::cyclic_nodes_within(g, rest);
  auto rg = detail::reverse_graph(g);
  auto bad = detail::reach_within(rg, rest, cyc);  // reaches a cycle avoiding A
  NodeMask B(g.size(), 0);
  for (uint32_t v = 0; v < g.size(); ++v) B[v] = bad[v] ? 0 : 1;
  return B;
}

struct RepellerResult {
  NodeMask coarse;     // X minus B, the paper's repeller
  NodeMask invariant;  // nodes of X minus B on bi-infinite walks inside it
};

// The coarse repeller X-B plus its invariant core: nodes both forward-
// and backward-reachable from cyclic SCCs of the subgraph on X-B.
inline RepellerResult repeller(const Digraph& g, const MorseDecomposition& md,
                               const NodeMask& A, const NodeMask& B) {
  RepellerResult res;
  res.coarse.assign(g.size(), 0);
  for (uint32_t v = 0; v < g.size(); ++v) res.coarse[v] = B[v] ? 0 : 1;
  auto cyc = detail::cyclic_nodes_within(g, res.coarse);
  auto fwd = detail::reach_within(g, res.coarse, cyc);
  auto rg = detail::reverse_graph(g);
  auto bwd = detail::reach_within(rg, res.coarse, cyc);
  res.invariant.assign(g.size(), 0);
  for (uint32_t v = 0; v < g.size(); ++v) res.invariant[v] = fwd[v] && bwd[v] ? 1 : 0;
  return res;
}

struct AttractorRepellerPair {
  NodeMask A;
  NodeMask B;
  NodeMask R;         // invariant core
  NodeMask R_coarse;  // X minus B
  uint32_t origin_scc = 0;
  bool cyclic_seed = true;
};

// One pair per cyclic SCC seed (forward closure), deduplicated, in
// canonical order (condensation topological order of the seed). With
// `transient_seeds`, every non-cyclic SCC also seeds a pair through the
// forward closure of its successors; that larger family is what makes
// the decomposition identities exact on arbitrary digraphs.
inline std::vector<AttractorRepellerPair> enumerate_pairs(const Digraph& g,
                                                          const MorseDecomposition& md,
                                                          bool transient_seeds = false) {
  std::vector<AttractorRepellerPair> pairs;
  std::set<std::vector<uint32_t>> seen;
  auto add_pair = [&](NodeMask A, uint32_t origin, bool cyclic_seed) {
    auto key = mask_nodes(A);
    if (!seen.insert(std::move(key)).second) return;
    AttractorRepellerPair pr;
    pr.A = std::move(A);
    pr.B = basin(g, md, pr.A);
    auto rep = repeller(g, md, pr.A, pr.B);
    pr.R = std::move(rep.invariant);
    pr.R_coarse = std::move(rep.coarse);
    pr.origin_scc = origin;
    pr.cyclic_seed = cyclic_seed;
    pairs.push_back(std::move(pr));
  };

  for (uint32_t c : md.topo_order) {
    if (!md.cyclic[c]) continue;
    add_pair(attractor_from_seed(g, md, c), c, true);
  }
  if (transient_seeds) {
    for (uint32_t c : md.topo_order) {
      if (md.cyclic[c]) continue;
      // forward closure of the seed node's successors (end points of
      // chains of length >= 1 starting there)
      NodeMask A(g.size(), 0);
      for (uint32_t v : md.scc_nodes[c])
        for (uint32_t w : g[v]) {
          auto closure = attractor_from_seed(g, md, md.scc_id[w]);
          for (uint32_t u = 0; u < g.size(); ++u) A[u] |= closure[u];
        }
      add_pair(std::move(A), c, false);
    }
  }
  return pairs;
}

struct DecompositionReport {
  std::vector<uint32_t> residual_gradient;   // (X-CR) symdiff union(B-A)
  std::vector<uint32_t> residual_recurrent;  // CR symdiff intersection(A u R)
  size_t pair_count = 0;

  bool exact() const {
    return residual_gradient.empty() && residual_recurrent.empty();
  }
};

// Checks the two decomposition identities on the given pair family:
// the gradient-like part X-CR against the union of B-A, and CR against
// the intersection of A u R (coarse repeller). Both are exact when the
// family includes the transient-seeded pairs.
inline DecompositionReport verify_decomposition(
    const Digraph& g, const MorseDecomposition& md,
    const std::vector<AttractorRepellerPair>& pairs) {
  const uint32_t n = static_cast<uint32_t>(g.size());
  auto cr = md.chain_recurrent_mask(n);
  NodeMask uni(n, 0);
  NodeMask inter(n, 1);
  if (pairs.empty()) inter.assign(n, 0);  // empty-family convention
  for (const auto& pr : pairs) {
    for (uint32_t v = 0; v < n; ++v) {
      if (pr.B[v] && !pr.A[v]) uni[v] = 1;
      if (!(pr.A[v] || pr.R_coarse[v])) inter[v] = 0;
    }
  }
  DecompositionReport rep;
  rep.pair_count = pairs.size();
  for (uint32_t v = 0; v < n; ++v) {
    if (uni[v] != (cr[v] ? 0 : 1)) rep.residual_gradient.push_back(v);
    if (inter[v] != cr[v]) rep.residual_recurrent.push_back(v);
  }
  return rep;
}

// Directed path witnessing an (eps, T)-chain at box resolution; for
// from == to the path must traverse at least one edge.
inline std::optional<std::vector<uint32_t>> chain_exists(const Digraph& g, uint32_t from,
                                                         uint32_t to) {
  if (from >= g.size() || to >= g.size()) throw ConfigError("chain query node out of range");
  std::vector<int64_t> parent(g.size(), -2);
  std::vector<uint32_t> queue;
  for (uint32_t w : g[from]) {
    if (parent[w] == -2) {
      parent[w] = from;
      queue.push_back(w);
    }
  }
  if (!g[from].empty() && parent[to] != -2) {
    // direct hit on the first leg
  }
  size_t head = 0;
  while (head < queue.size() && parent[to] == -2) {
    uint32_t v = queue[head++];
    for (uint32_t w : g[v]) {
      if (parent[w] == -2) {
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
  if (parent[to] == -2) return std::nullopt;
  std::vector<uint32_t> path{to};
  uint32_t cur = to;
  while (cur != from || path.size() == 1) {
    cur = static_cast<uint32_t>(parent[cur]);
    path.push_back(cur);
    if (cur == from) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace cnds
