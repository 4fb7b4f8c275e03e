#pragma once

#include <string>
#include <vector>

#include "cnds/config.hpp"
#include "cnds/energy.hpp"
#include "cnds/errors.hpp"
#include "cnds/grid.hpp"
#include "cnds/systems.hpp"
#include "cnds/transition.hpp"

namespace cnds {

inline CocycleSystem make_system(const RunConfig& cfg) {
  CocycleSystem sys;
  if (cfg.system_name == "forced-lorenz") {
    LorenzParams prm;
    prm.sigma = cfg.lorenz_sigma;
    prm.rho = cfg.lorenz_rho;
    prm.beta = cfg.lorenz_beta;
    prm.amp = cfg.lorenz_amp;
    prm.tau = cfg.lorenz_tau;
    sys = make_forced_lorenz(prm);
  } else {
    sys = make_builtin(cfg.system_name);
  }
  if (!(cfg.integrator_h > 0.0)) throw ConfigError("integrator.h must be positive");
  sys.integrator.h = cfg.integrator_h;
  return sys;
}

inline Grid make_grid(const RunConfig& cfg, const CocycleSystem& sys) {
  Vec lo = cfg.grid_lo.empty() ? sys.window_lo : cfg.grid_lo;
  Vec hi = cfg.grid_hi.empty() ? sys.window_hi : cfg.grid_hi;
  if (static_cast<int>(lo.size()) != sys.dim || static_cast<int>(hi.size()) != sys.dim)
    throw ConfigError("grid window dimension does not match the system");
  std::vector<int> depth = cfg.grid_depth;
  if (depth.size() == 1 && sys.dim > 1) depth.assign(sys.dim, depth[0]);
  std::vector<bool> circ(sys.dim, sys.state_circular);
  if (!cfg.grid_circular.empty()) {
    if (static_cast<int>(cfg.grid_circular.size()) != sys.dim)
      throw ConfigError("grid.circular dimension does not match the system");
    for (int a = 0; a < sys.dim; ++a) circ[a] = cfg.grid_circular[a] != 0;
  }
  return build_grid(lo, hi, depth, circ);
}

inline BaseSampling make_sampling(const RunConfig& cfg, const CocycleSystem& sys) {
  int m = cfg.base_m;
  switch (sys.base.kind) {
    case BaseKind::TrivialPoint:
      if (m == 0) m = 1;
      return sample_base(sys.base, m, cfg.base_T);
    case BaseKind::FiniteSet:
      if (m == 0) m = sys.base.size;
      return sample_base(sys.base, m, cfg.base_T);
    default:
      if (m == 0) m = 8;
      return sample_base(sys.base, m);
  }
}

inline double effective_eps_pad(const RunConfig& cfg, const Grid& grid) {
  return cfg.transition_eps_pad < 0.0 ? grid.diameter() : cfg.transition_eps_pad;
}

inline TransitionGraph build_from_config(const RunConfig& cfg, int workers = 1) {
  auto sys = make_system(cfg);
  auto grid = make_grid(cfg, sys);
  auto sampling = make_sampling(cfg, sys);
  TransitionMeta meta;
  meta.eps_pad = effective_eps_pad(cfg, grid);
  meta.scheme = cfg.transition_scheme;
  meta.policy = cfg.transition_policy == "drop" ? EscapePolicy::Drop : EscapePolicy::Absorb;
  meta.seed = cfg.seed;
  return build_transition(sys, grid, sampling, meta, workers);
}

}  // namespace cnds
