// Acceptance suite: one line of output per criterion, nonzero exit if
// any criterion fails. Each check pins its tolerances explicitly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "cnds/cnds.hpp"

using namespace cnds;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("criterion %d (%s): %s [%.1f s]%s%s\n", number, name.c_str(),
              pass ? "PASS" : "FAIL", seconds, detail.empty() ? "" : " ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename F>
void criterion(int number, const std::string& name, double time_limit, F&& body) {
  auto start = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs > time_limit) {
    pass = false;
    detail += " (over time limit)";
  }
  report(number, name, pass, secs, detail);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TransitionGraph build_example_5_1_graph() {
  RunConfig cfg;
  cfg.system_name = "example-5-1";
  cfg.grid_depth = {8};
  cfg.base_m = 8;
  cfg.transition_eps_pad = 0.0;
  cfg.transition_scheme = 2;
  return build_from_config(cfg);
}

TransitionGraph build_example_5_2_graph() {
  RunConfig cfg;
  cfg.system_name = "example-5-2-circle";
  cfg.grid_depth = {8};
  cfg.base_m = 16;
  cfg.transition_eps_pad = 0.45;
  cfg.transition_scheme = 3;
  cfg.transition_policy = "drop";
  return build_from_config(cfg);
}

TransitionGraph build_double_well_graph() {
  RunConfig cfg;
  cfg.system_name = "double-well";
  cfg.grid_depth = {6};
  cfg.transition_scheme = 3;
  return build_from_config(cfg);
}

TransitionGraph build_small_lorenz_graph() {
  RunConfig cfg;
  cfg.system_name = "forced-lorenz";
  cfg.grid_depth = {4};
  cfg.base_m = 2;
  cfg.integrator_h = 5e-3;
  cfg.transition_scheme = 2;
  cfg.transition_policy = "drop";
  return build_from_config(cfg, static_cast<int>(std::thread::hardware_concurrency()));
}

bool check_identities(const Digraph& g, std::string& detail, const char* label) {
  auto md = morse(g);
  auto rep = verify_decomposition(g, md, enumerate_pairs(g, md, true));
  if (!rep.exact()) {
    detail += std::string(" residuals nonempty on ") + label;
    return false;
  }
  return true;
}

}  // namespace

int main() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  // Built once, shared by criteria 1, 4, 5.
  TransitionGraph g51, g52, gdw, glor_small;

  criterion(1, "example 5.1 chain recurrence", 10.0, [&](std::string& detail) {
    g51 = build_example_5_1_graph();
    auto md = morse(g51.succ);
    BoxId zero_box = *g51.grid.box_of({0.0});  // 0 lies on a box boundary
    size_t cr_total = 0;
    for (int i = 0; i < g51.sampling.m; ++i) {
      size_t fiber_cr = 0;
      for (BoxId b = 0; b < g51.box_count(); ++b) {
        if (!md.node_cyclic(g51.node_id(i, b))) continue;
        ++fiber_cr;
        ++cr_total;
        // allowed: the two boxes meeting 0 plus one neighbor each side
        long long db = static_cast<long long>(b) - static_cast<long long>(zero_box);
        if (db < -2 || db > 1) {
          detail = "stray CR box at fiber " + std::to_string(i) + " box " +
                   std::to_string(b);
          return false;
        }
      }
      if (fiber_cr > 3) {
        detail = "more than 3 CR boxes at fiber " + std::to_string(i);
        return false;
      }
    }
    if (cr_total == 0) {
      detail = "no chain recurrent boxes at all";
      return false;
    }
    detail = std::to_string(cr_total) + " CR boxes, all within one box of 0";
    return true;
  });

  criterion(2, "example 5.1 pullback attractor", 5.0, [&](std::string& detail) {
    auto sys = make_example_5_1();
    auto grid = build_grid({-2.0}, {2.0}, {8});
    BoxSet U;
    for (BoxId b = 0; b < grid.box_count(); ++b) {
      double c = grid.center(b)[0];
      if (c > -1.0 && c < 1.0) U.push_back(b);
    }
    auto res = pullback_attractor(sys, grid, 0.0, U, {1.0, 2.0, 3.0, 4.0, 5.0},
                                  grid.diameter(), 3, 0.0);
    if (!res.converged) {
      detail = "not converged";
      return false;
    }
    for (BoxId b : res.A_approx) {
      if (std::abs(grid.center(b)[0]) > grid.diameter()) {
        detail = "attractor box away from 0";
        return false;
      }
    }
    auto series = pullback_convergence(sys, grid, 0.0, U, res.A_approx, {1.0, 2.0}, 3);
    for (size_t k = 0; k < 2; ++k) {
      double envelope = std::exp(-std::pow(k + 1.0, 2.0));  // e^{2ps - s^2}, p = 0
      // one box diameter of quantization on top of the 10% sampling slack
      double slack = 0.1 * envelope + grid.diameter();
      if (std::abs(series[k] - envelope) > slack) {
        detail = "distance series off envelope at s = " + std::to_string(k + 1);
        return false;
      }
    }
    detail = "A within one box diameter of 0; series matches envelope";
    return true;
  });

  criterion(3, "example 5.2 full chain recurrence", 30.0, [&](std::string& detail) {
    g52 = build_example_5_2_graph();
    auto md = morse(g52.succ);
    size_t cyclic_nodes = mask_count(md.chain_recurrent_mask(g52.node_count()));
    double fraction = static_cast<double>(cyclic_nodes) /
                      static_cast<double>(g52.node_count());
    if (fraction != 1.0) {
      detail = "cyclic fraction " + std::to_string(fraction);
      return false;
    }
    auto pairs = enumerate_pairs(g52.succ, md);
    for (const auto& pr : pairs) {
      if (mask_count(pr.R_coarse) != 0) {
        detail = "a pair has a nonempty coarse repeller";
        return false;
      }
    }
    detail = "cyclic fraction 1.0 over " + std::to_string(g52.node_count()) +
             " nodes, " + std::to_string(pairs.size()) + " pair(s), no repeller";
    return true;
  });

  criterion(4, "decomposition identities", 20.0, [&](std::string& detail) {
    // random-digraph oracle
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> size_d(1, 8);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int iter = 0; iter < 500; ++iter) {
      int n = size_d(rng);
      Digraph g(n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (coin(rng) < 0.2) g[a].push_back(static_cast<uint32_t>(b));
      // brute-force chain recurrence by reachability closure
      std::vector<std::vector<uint8_t>> r(n, std::vector<uint8_t>(n, 0));
      for (int a = 0; a < n; ++a)
        for (uint32_t b : g[a]) r[a][b] = 1;
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            if (r[a][k] && r[k][b]) r[a][b] = 1;
      auto md = morse(g);
      for (int v = 0; v < n; ++v) {
        if (md.node_cyclic(v) != (r[v][v] != 0)) {
          detail = "CR mismatch vs brute force at iteration " + std::to_string(iter);
          return false;
        }
      }
      auto rep = verify_decomposition(g, md, enumerate_pairs(g, md, true));
      if (!rep.exact()) {
        detail = "residual nonempty at iteration " + std::to_string(iter);
        return false;
      }
    }
    // builtin graphs
    gdw = build_double_well_graph();
    glor_small = build_small_lorenz_graph();
    if (!check_identities(g51.succ, detail, "example-5-1")) return false;
    if (!check_identities(g52.succ, detail, "example-5-2")) return false;
    if (!check_identities(gdw.succ, detail, "double-well")) return false;
    if (!check_identities(glor_small.succ, detail, "forced-lorenz")) return false;
    detail = "500 random digraphs and 4 builtin graphs, residuals empty";
    return true;
  });

  criterion(5, "complete Lyapunov properties", 40.0, [&](std::string& detail) {
    struct Entry {
      const char* name;
      const TransitionGraph* g;
    };
    Entry entries[] = {{"example-5-1", &g51},
                       {"example-5-2", &g52},
                       {"double-well", &gdw},
                       {"forced-lorenz", &glor_small}};
    for (const auto& e : entries) {
      auto t0 = Clock::now();
      auto md = morse(e.g->succ);
      auto field = complete_lyapunov(e.g->succ, md, enumerate_pairs(e.g->succ, md));
      auto check = check_lyapunov(e.g->succ, md, field);
      double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      if (!check.all_pass()) {
        detail = std::string("property violation on ") + e.name;
        return false;
      }
      if (secs > 10.0) {
        detail = std::string("per-graph time limit exceeded on ") + e.name;
        return false;
      }
    }
    detail = "Def 2.6 (a)-(d) hold on all 4 builtin graphs";
    return true;
  });

  criterion(6, "continuous Lyapunov monotonicity", 10.0, [&](std::string& detail) {
    auto sys = make_double_well();
    auto grid = build_grid({-2.0}, {2.0}, {7});
    std::vector<BoxId> A, R;
    for (BoxId b = 0; b < grid.box_count(); ++b) {
      double c = grid.center(b)[0];
      if (std::abs(std::abs(c) - 1.0) <= 0.05) A.push_back(b);
      if (std::abs(c) <= 0.05) R.push_back(b);
    }
    const double horizon = 12.0, dt = 0.005;
    const double slack = std::exp(-horizon) + 2.0 * dt;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    int pass_count = 0;
    for (int i = 0; i < 50; ++i) {
      double x0 = u(rng);
      double l0 = lyapunov_l(sys, 0.0, {x0}, horizon, dt, grid, A, R).value;
      double x1 = evolve(sys, 0.0, {x0}, 1.0)[0];
      double l1 = lyapunov_l(sys, 0.0, {x1}, horizon, dt, grid, A, R).value;
      bool ok = l1 <= l0 + slack;
      if (std::abs(x0) > 0.1 && std::abs(x0) < 0.9) ok = ok && (l0 - l1 > slack);
      if (ok) ++pass_count;
    }
    detail = std::to_string(pass_count) + "/50 starts pass";
    return pass_count >= 49;
  });

  criterion(7, "cocycle law residuals", 5.0, [&](std::string& detail) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto e51 = make_example_5_1();
    auto e52 = make_example_5_2_circle();
    auto dw = make_double_well();
    auto lor = make_forced_lorenz();
    double worst_closed = 0.0, worst_field = 0.0;
    for (int i = 0; i < 100; ++i) {
      double p = -1.0 + 2.0 * u01(rng);
      double x = -1.0 + 2.0 * u01(rng);
      double r = cocycle_residual(e51, p, {x}, 0.3 * u01(rng), 0.3 * u01(rng));
      worst_closed = std::max(worst_closed, r / (1.0 + std::abs(x)));

      double r2 = cocycle_residual(e52, 2.0 * M_PI * u01(rng), {2.0 * M_PI * u01(rng)},
                                   u01(rng), u01(rng));
      r2 = std::min(r2, 2.0 * M_PI - r2);
      worst_closed = std::max(worst_closed, r2);

      worst_field =
          std::max(worst_field, cocycle_residual(dw, 0.0, {-1.5 + 3.0 * u01(rng)}, 0.5, 0.5));
      Vec xl = {-5.0 + 10.0 * u01(rng), -5.0 + 10.0 * u01(rng), -5.0 + 10.0 * u01(rng)};
      worst_field = std::max(worst_field, cocycle_residual(lor, u01(rng), xl, 0.5, 0.5));
    }
    std::ostringstream o;
    o << "closed-form worst " << worst_closed << ", vector-field worst " << worst_field;
    detail = o.str();
    return worst_closed <= 1e-12 && worst_field <= 1e-5;
  });

  criterion(8, "forced Lorenz decomposition", 300.0, [&](std::string& detail) {
    auto spec = make_shifted_lorenz_spec();
    auto energy = check_energy_conditions(spec, {0.0, 0.25, 0.5, 0.75}, 200, 17);
    if (energy.antisymmetry_defect > 1e-10) {
      detail = "antisymmetry defect too large";
      return false;
    }
    RunConfig cfg;
    cfg.system_name = "forced-lorenz";
    cfg.grid_depth = {6, 6, 6};
    cfg.base_m = 4;
    cfg.integrator_h = 5e-3;
    cfg.transition_scheme = 1;  // center map; corner sampling blows past memory here
    cfg.transition_eps_pad = 1.2;
    cfg.transition_policy = "drop";
    auto g = build_from_config(cfg, static_cast<int>(hw));
    auto md = morse(g.succ);
    size_t cr = mask_count(md.chain_recurrent_mask(g.node_count()));
    if (cr == 0) {
      detail = "empty chain recurrent set";
      return false;
    }
    auto pairs = enumerate_pairs(g.succ, md);
    bool full_basin = false;
    for (const auto& pr : pairs)
      if (mask_count(pr.B) == g.node_count()) full_basin = true;
    std::ostringstream o;
    o << cr << " CR nodes, " << pairs.size() << " pair(s), full basin "
      << (full_basin ? "yes" : "no");
    detail = o.str();
    return full_basin;
  });

  criterion(9, "determinism across workers", 60.0, [&](std::string& detail) {
    RunConfig cfg;
    cfg.system_name = "double-well";
    cfg.grid_depth = {9};
    cfg.transition_scheme = 3;
    auto dir = std::filesystem::temp_directory_path();
    std::string bytes[3];
    std::string summaries[3];
    int worker_counts[3] = {1, 4, static_cast<int>(hw)};
    for (int run = 0; run < 3; ++run) {
      auto g = build_from_config(cfg, worker_counts[run]);
      auto path = (dir / ("cnds_det" + std::to_string(run) + ".cnds")).string();
      save_graph(g, path);
      bytes[run] = slurp(path);
      std::remove(path.c_str());
      auto md = morse(g.succ);
      auto rep = verify_decomposition(g.succ, md, enumerate_pairs(g.succ, md, true));
      std::ostringstream s;
      s << g.node_count() << "/" << md.scc_count() << "/" << md.cyclic_scc_count() << "/"
        << rep.pair_count << "/" << rep.exact();
      summaries[run] = s.str();
    }
    if (bytes[0] != bytes[1] || bytes[1] != bytes[2]) {
      detail = "graph files differ across worker counts";
      return false;
    }
    if (summaries[0] != summaries[1] || summaries[1] != summaries[2]) {
      detail = "summaries differ across worker counts";
      return false;
    }
    detail = "byte-identical files and summaries for workers {1, 4, " +
             std::to_string(hw) + "}";
    return true;
  });

  std::printf("%s: %d/9 criteria passed\n", failures == 0 ? "PASS" : "FAIL", 9 - failures);
  return failures == 0 ? 0 : 1;
}
