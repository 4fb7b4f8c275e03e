#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cnds/cocycle.hpp"
#include "cnds/errors.hpp"

namespace cnds {

// u' = A(w)u + B(w)(u,u) + f(w): the dissipative bilinear normal form.
struct BilinearSystemSpec {
  int dim = 3;
  std::function<std::vector<double>(double)> A;  // row-major dim x dim
  std::function<Vec(double, const Vec&, const Vec&)> B;
  std::function<Vec(double)> f;
};

struct EnergyReport {
  double alpha_estimate = 0.0;       // min over probes of -<Au,u>/|u|^2
  double antisymmetry_defect = 0.0;  // max |<B(u,v),w> + <B(u,w),v>|
  double c_b_estimate = 0.0;         // max |B(u,v)| over unit probes
  double f_norm = 0.0;               // max |f(w)| over base samples
  double condition_ratio = 0.0;      // (|f| C_B) / alpha^2, if alpha > 0
  bool condition_holds = false;      // ratio < 1 with alpha > 0
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec mat_apply(const std::vector<double>& m, const Vec& x) {
  size_t d = x.size();
  Vec y(d, 0.0);
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) y[i] += m[i * d + j] * x[j];
  return y;
}

inline EnergyReport check_energy_conditions(const BilinearSystemSpec& spec,
                                            const std::vector<double>& base_samples,
                                            int probe_count, uint64_t seed = 1) {
  if (probe_count < 1) throw ConfigError("probe count must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_unit = [&](int dim) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Vec u(dim);
      for (auto& v : u) v = gauss(rng);
      double n = norm2(u);
      if (n > 1e-12) {
        for (auto& v : u) v /= n;
        return u;
      }
    }
    throw DegenerateProbe("random probe generator produced only zero vectors");
  };

  EnergyReport rep;
  rep.alpha_estimate = std::numeric_limits<double>::infinity();
  for (double w : base_samples) {
    auto m = spec.A(w);
    Vec fw = spec.f(w);
    rep.f_norm = std::max(rep.f_norm, norm2(fw));
    for (int k = 0; k < probe_count; ++k) {
      Vec u = draw_unit(spec.dim);
      Vec v = draw_unit(spec.dim);
      Vec x = draw_unit(spec.dim);
      rep.alpha_estimate = std::min(rep.alpha_estimate, -dot(mat_apply(m, u), u));
      double defect = std::abs(dot(spec.B(w, u, v), x) + dot(spec.B(w, u, x), v));
      rep.antisymmetry_defect = std::max(rep.antisymmetry_defect, defect);
      rep.c_b_estimate = std::max(rep.c_b_estimate, norm2(spec.B(w, u, v)));
    }
  }
  if (rep.alpha_estimate > 0.0) {
    rep.condition_ratio = rep.f_norm * rep.c_b_estimate /
                          (rep.alpha_estimate * rep.alpha_estimate);
    rep.condition_holds = rep.condition_ratio < 1.0;
  }
  return rep;
}

// Lorenz in the shifted variable v = z - rho - sigma, where the quadratic
// part becomes energy-preserving:
//   x' = sigma(y - x), y' = -sigma x - y - x v, v' = x y - beta v - beta(rho+sigma).
inline BilinearSystemSpec make_shifted_lorenz_spec(double sigma = 10.0, double rho = 28.0,
                                                   double beta = 8.0 / 3.0) {
  BilinearSystemSpec spec;
  spec.dim = 3;
  spec.A = [sigma, beta](double) {
    return std::vector<double>{-sigma, sigma, 0.0,
                               -sigma, -1.0,  0.0,
                               0.0,    0.0,   -beta};
  };
  spec.B = [](double, const Vec& u, const Vec& v) {
    return Vec{0.0, -u[0] * v[2], u[0] * v[1]};
  };
  spec.f = [sigma, rho, beta](double) { return Vec{0.0, 0.0, -beta * (rho + sigma)}; };
  return spec;
}

}  // namespace cnds
