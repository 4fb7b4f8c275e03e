#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cnds/cnds.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitResource = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitFormat = 4;

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cnds::ConfigError("cannot open for writing: " + path.string());
  out << text;
}

json decomposition_summary(const cnds::TransitionGraph& g, const cnds::MorseDecomposition& md,
                           const std::vector<cnds::AttractorRepellerPair>& pairs,
                           const cnds::DecompositionReport& rep) {
  size_t edges = 0;
  for (const auto& s : g.succ) edges += s.size();
  size_t cr = 0;
  for (uint32_t v = 0; v < g.node_count(); ++v)
    if (md.node_cyclic(static_cast<uint32_t>(v))) ++cr;
  size_t pairs_with_repeller = 0;
  for (const auto& pr : pairs)
    if (cnds::mask_count(pr.R_coarse) > 0) ++pairs_with_repeller;
  json j;
  j["nodes"] = g.node_count();
  j["edges"] = edges;
  j["scc_count"] = md.scc_count();
  j["cyclic_scc_count"] = md.cyclic_scc_count();
  j["chain_recurrent_nodes"] = cr;
  j["cyclic_fraction"] = static_cast<double>(cr) / static_cast<double>(g.node_count());
  j["pair_count"] = pairs.size();
  j["pairs_with_nonempty_repeller"] = pairs_with_repeller;
  j["residual_gradient_like"] = rep.residual_gradient.size();
  j["residual_chain_recurrent"] = rep.residual_recurrent.size();
  j["identities_exact"] = rep.exact();
  return j;
}

std::string condensation_dot(const cnds::MorseDecomposition& md) {
  std::ostringstream o;
  o << "digraph condensation {\n";
  for (uint32_t c = 0; c < md.scc_count(); ++c) {
    o << "  s" << c << " [label=\"scc " << c << " (" << md.scc_nodes[c].size() << ")\""
      << (md.cyclic[c] ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  for (uint32_t c = 0; c < md.scc_count(); ++c)
    for (uint32_t d : md.condensation[c]) o << "  s" << c << " -> s" << d << ";\n";
  o << "}\n";
  return o.str();
}

std::string nodes_csv(const cnds::TransitionGraph& g, const cnds::MorseDecomposition& md,
                      const std::vector<cnds::AttractorRepellerPair>& pairs,
                      const cnds::LyapunovField* field) {
  std::ostringstream o;
  o << "base_index,box_index,scc_id,cyclic";
  for (size_t k = 0; k < pairs.size(); ++k) o << ",in_A_" << k;
  for (size_t k = 0; k < pairs.size(); ++k) o << ",in_R_" << k;
  if (field) {
    o << ",L";
    for (size_t k = 0; k < field->pairs.size(); ++k) o << ",l_" << k;
  }
  o << "\n";
  char buf[40];
  for (uint32_t v = 0; v < g.node_count(); ++v) {
    if (g.is_outside(v)) {
      o << "-1,-1";
    } else {
      auto n = g.node_of(v);
      o << n.base_index << "," << n.box_index;
    }
    o << "," << md.scc_id[v] << "," << (md.node_cyclic(v) ? 1 : 0);
    for (const auto& pr : pairs) o << "," << (pr.A[v] ? 1 : 0);
    for (const auto& pr : pairs) o << "," << (pr.R[v] ? 1 : 0);
    if (field) {
      std::snprintf(buf, sizeof(buf), "%.17g", field->L[v]);
      o << "," << buf;
      for (const auto& ln : field->l_n) {
        std::snprintf(buf, sizeof(buf), "%.17g", ln[v]);
        o << "," << buf;
      }
    }
    o << "\n";
  }
  return o.str();
}

// Random digraph oracle: compare the conley outputs against brute-force
// reachability definitions and check both decomposition identities.
struct OracleFailure {
  uint64_t seed;
  std::string what;
};

std::optional<OracleFailure> run_oracle(int count, uint64_t seed0) {
  for (int iter = 0; iter < count; ++iter) {
    uint64_t seed = seed0 + iter;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size_d(1, 8);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int n = size_d(rng);
    cnds::Digraph g(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (coin(rng) < 0.2) g[a].push_back(static_cast<uint32_t>(b));

    // brute-force reachability closure
    std::vector<std::vector<uint8_t>> reach(n, std::vector<uint8_t>(n, 0));
    for (int a = 0; a < n; ++a)
      for (uint32_t b : g[a]) reach[a][b] = 1;
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (reach[a][k] && reach[k][b]) reach[a][b] = 1;

    auto md = cnds::morse(g);
    for (int a = 0; a < n; ++a) {
      bool brute_cyclic = reach[a][a] != 0;
      if (brute_cyclic != md.node_cyclic(static_cast<uint32_t>(a)))
        return OracleFailure{seed, "cyclic flag mismatch at node " + std::to_string(a)};
      for (int b = 0; b < n; ++b) {
        bool same = md.scc_id[a] == md.scc_id[b];
        bool brute_same = a == b || (reach[a][b] && reach[b][a]);
        if (same != brute_same)
          return OracleFailure{seed, "scc partition mismatch"};
      }
    }
    auto pairs = cnds::enumerate_pairs(g, md, true);
    auto rep = cnds::verify_decomposition(g, md, pairs);
    if (!rep.exact())
      return OracleFailure{seed, "decomposition identity residual nonempty"};
  }
  return std::nullopt;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"set-oriented decomposition of nonautonomous dynamical systems"};
  app.require_subcommand(0, 1);

  std::string config_path, graph_path, out_path;
  int workers = 1;
  uint64_t seed = 0;
  bool seed_set = false, print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "print default config and exit");

  auto add_common = [&](CLI::App* sub, bool needs_config, bool needs_graph) {
    if (needs_config) sub->add_option("--config", config_path, "run config file")->required();
    if (needs_graph) sub->add_option("--graph", graph_path, "graph file (CNDS1)")->required();
    sub->add_option("--out", out_path, "output file or directory");
    sub->add_option("--workers", workers, "worker thread count");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  auto* cmd_build = app.add_subcommand("build-map", "build and save a transition graph");
  add_common(cmd_build, true, false);
  auto* cmd_conley = app.add_subcommand("conley", "decompose a saved graph");
  add_common(cmd_conley, false, true);
  auto* cmd_lyap = app.add_subcommand("lyapunov", "complete Lyapunov function on a graph");
  add_common(cmd_lyap, false, true);
  auto* cmd_pull = app.add_subcommand("pullback", "pullback attractor run");
  add_common(cmd_pull, true, false);

  auto* cmd_chain = app.add_subcommand("chain", "chain query between skew nodes");
  std::vector<int> from_node, to_node;
  add_common(cmd_chain, false, true);
  cmd_chain->add_option("--from", from_node, "base_index box_index")->expected(2)->required();
  cmd_chain->add_option("--to", to_node, "base_index box_index")->expected(2)->required();

  auto* cmd_verify = app.add_subcommand("verify", "decomposition identity checks");
  std::string verify_graph;
  int oracle_count = 500;
  cmd_verify->add_option("--graph", verify_graph, "graph file to verify");
  cmd_verify->add_option("--oracle", oracle_count, "random-graph oracle instance count");
  cmd_verify->add_option("--seed", seed, "oracle seed")->each([&](const std::string&) {
    seed_set = true;
  });
  cmd_verify->add_option("--out", out_path, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (print_defaults) {
    std::cout << cnds::print_defaults();
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  if (cmd_build->parsed()) {
    auto cfg = cnds::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    auto g = cnds::build_from_config(cfg, workers);
    fs::path target = out_path.empty() ? fs::path(cfg.output_dir) / "graph.cnds"
                                       : fs::path(out_path);
    if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
    cnds::save_graph(g, target.string());
    size_t edges = 0;
    for (const auto& s : g.succ) edges += s.size();
    std::cout << "graph " << target.string() << ": " << g.node_count() << " nodes, "
              << edges << " edges\n";
    return kExitOk;
  }

  if (cmd_conley->parsed() || cmd_lyap->parsed()) {
    auto g = cnds::load_graph(graph_path);
    auto md = cnds::morse(g.succ);
    auto pairs = cnds::enumerate_pairs(g.succ, md, false);
    auto augmented = cnds::enumerate_pairs(g.succ, md, true);
    auto rep = cnds::verify_decomposition(g.succ, md, augmented);
    fs::path dir = out_path.empty() ? fs::path("out") : fs::path(out_path);
    fs::create_directories(dir);

    if (cmd_conley->parsed()) {
      auto summary = decomposition_summary(g, md, pairs, rep);
      write_text(dir / "summary.json", summary.dump(2) + "\n");
      write_text(dir / "condensation.dot", condensation_dot(md));
      write_text(dir / "nodes.csv", nodes_csv(g, md, pairs, nullptr));
      std::cout << summary.dump(2) << "\n";
      return kExitOk;
    }

    auto field = cnds::complete_lyapunov(g.succ, md, pairs);
    auto check = cnds::check_lyapunov(g.succ, md, field);
    json j;
    j["pair_count"] = field.pairs.size();
    j["truncation_error"] = field.truncation_error;
    j["edge_increase_violations"] = check.edge_increase_violations;
    j["scc_constant_violations"] = check.scc_constant_violations;
    j["strict_decrease_violations"] = check.strict_decrease_violations;
    j["cantor_violations"] = check.cantor_violations;
    j["injectivity_violations"] = check.injectivity_violations;
    j["all_pass"] = check.all_pass();
    write_text(dir / "lyapunov.json", j.dump(2) + "\n");
    write_text(dir / "lyapunov.csv", nodes_csv(g, md, field.pairs, &field));
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  if (cmd_pull->parsed()) {
    auto cfg = cnds::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    auto sys = cnds::make_system(cfg);
    auto grid = cnds::make_grid(cfg, sys);
    if (cfg.pullback_u_lo.size() != static_cast<size_t>(sys.dim) ||
        cfg.pullback_u_hi.size() != static_cast<size_t>(sys.dim))
      throw cnds::ConfigError("pullback.u_lo/u_hi must match the system dimension");
    cnds::BoxSet U;
    for (cnds::BoxId b = 0; b < grid.box_count(); ++b) {
      auto c = grid.center(b);
      bool inside = true;
      for (int a = 0; a < sys.dim; ++a)
        if (c[a] < cfg.pullback_u_lo[a] || c[a] > cfg.pullback_u_hi[a]) inside = false;
      if (inside) U.push_back(b);
    }
    std::vector<double> schedule;
    for (int k = 1; k <= cfg.pullback_count; ++k) schedule.push_back(cfg.pullback_tau * k);
    double tol = cfg.pullback_tol < 0.0 ? grid.diameter() : cfg.pullback_tol;
    double eps_pad = cfg.transition_eps_pad < 0.0 ? 0.0 : cfg.transition_eps_pad;

    fs::path dir = out_path.empty() ? fs::path(cfg.output_dir) : fs::path(out_path);
    fs::create_directories(dir);
    json j;
    j["p"] = cfg.pullback_p;
    j["schedule"] = schedule;
    try {
      auto res = cnds::pullback_attractor(sys, grid, cfg.pullback_p, U, schedule, tol,
                                          cfg.transition_scheme, eps_pad);
      std::vector<size_t> sizes;
      for (const auto& c : res.coverings) sizes.push_back(c.size());
      j["covering_sizes"] = sizes;
      j["nested"] = true;
      j["nested_from"] = *res.nested_from;
      j["converged"] = res.converged;
      j["final_distance"] = res.final_distance;
      j["attractor_boxes"] = res.A_approx.size();
      auto series = cnds::pullback_convergence(sys, grid, cfg.pullback_p, U, res.A_approx,
                                               schedule, cfg.transition_scheme);
      std::ostringstream csv;
      csv << "s,distance\n";
      for (size_t i = 0; i < schedule.size(); ++i)
        csv << schedule[i] << "," << series[i] << "\n";
      write_text(dir / "pullback_distance.csv", csv.str());
    } catch (const cnds::NotNested& e) {
      j["nested"] = false;
      j["message"] = e.what();
    }
    write_text(dir / "pullback.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  if (cmd_chain->parsed()) {
    auto g = cnds::load_graph(graph_path);
    uint32_t from = g.node_id(from_node[0], static_cast<cnds::BoxId>(from_node[1]));
    uint32_t to = g.node_id(to_node[0], static_cast<cnds::BoxId>(to_node[1]));
    auto path = cnds::chain_exists(g.succ, from, to);
    if (!path) {
      std::cout << "not found\n";
      return kExitOk;
    }
    std::cout << "chain of " << path->size() - 1 << " legs:";
    for (uint32_t v : *path) {
      auto n = g.node_of(v);
      std::cout << " (" << n.base_index << "," << n.box_index << ")";
    }
    std::cout << "\n";
    return kExitOk;
  }

  if (cmd_verify->parsed()) {
    json j;
    if (!verify_graph.empty()) {
      auto g = cnds::load_graph(verify_graph);
      auto md = cnds::morse(g.succ);
      auto pairs = cnds::enumerate_pairs(g.succ, md, true);
      auto rep = cnds::verify_decomposition(g.succ, md, pairs);
      j["mode"] = "graph";
      j["pair_count"] = rep.pair_count;
      j["residual_gradient_like"] = rep.residual_gradient.size();
      j["residual_chain_recurrent"] = rep.residual_recurrent.size();
      j["identities_exact"] = rep.exact();
      std::cout << j.dump(2) << "\n";
      if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
      return rep.exact() ? kExitOk : kExitUsage;
    }
    uint64_t s0 = seed_set ? seed : 1;
    auto failure = run_oracle(oracle_count, s0);
    j["mode"] = "oracle";
    j["instances"] = oracle_count;
    j["seed"] = s0;
    j["all_pass"] = !failure.has_value();
    if (failure) {
      j["failing_seed"] = failure->seed;
      j["failure"] = failure->what;
    }
    std::cout << j.dump(2) << "\n";
    if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
    return failure ? kExitUsage : kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const cnds::TooManyBoxes& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const cnds::Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const cnds::FormatVersionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const cnds::CorruptHeader& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
