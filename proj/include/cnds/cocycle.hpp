#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cnds/base_flow.hpp"
#include "cnds/errors.hpp"

namespace cnds {

constexpr int kMaxDim = 8;

using Vec = std::vector<double>;

inline double norm2(const double* x, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

inline double norm2(const Vec& x) { return norm2(x.data(), static_cast<int>(x.size())); }

inline double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// phi(t, p, x) given in closed form.
using ClosedFormMap = std::function<void(double t, double p, const double* x, double* out)>;

// Right-hand side f(p_t, x) of a time-dependent vector field; p_t is the
// current base point theta_s p.
using VectorField = std::function<void(double p_t, const double* x, double* dx)>;

struct IntegratorSettings {
  double h = 1e-3;           // fixed step, final partial step
  double blowup = 1e8;       // Diverged beyond this state norm
};

// A cocycle over a driving base flow. Exactly one of closed_form /
// vector_field is set.
struct CocycleSystem {
  BaseFlow base;
  int dim = 1;
  std::string name;
  ClosedFormMap closed_form;
  VectorField vector_field;
  IntegratorSettings integrator;
  Vec window_lo, window_hi;  // declared state window (per axis)
  bool state_circular = false;  // circle-valued state (all axes)

  bool is_closed_form() const { return static_cast<bool>(closed_form); }
};

namespace detail {

// Classical 4th-order Runge-Kutta step for dx/ds = f(theta_s p, x).
inline void rk4_step(const CocycleSystem& sys, double p, double s, double h,
                     std::array<double, kMaxDim>& x) {
  const int d = sys.dim;
  std::array<double, kMaxDim> k1, k2, k3, k4, tmp;
  sys.vector_field(shift(sys.base, p, s), x.data(), k1.data());
  for (int i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  sys.vector_field(shift(sys.base, p, s + 0.5 * h), tmp.data(), k2.data());
  for (int i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  sys.vector_field(shift(sys.base, p, s + 0.5 * h), tmp.data(), k3.data());
  for (int i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
  sys.vector_field(shift(sys.base, p, s + h), tmp.data(), k4.data());
  for (int i = 0; i < d; ++i)
    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace detail

// phi(t, p, x). Closed forms are evaluated directly; vector fields are
// integrated with a fixed step and a final partial step.
inline void evolve_into(const CocycleSystem& sys, double p, const double* x, double t,
                        double* out) {
  const int d = sys.dim;
  if (sys.is_closed_form()) {
    sys.closed_form(t, p, x, out);
    if (norm2(out, d) > sys.integrator.blowup)
      throw Diverged(sys.name + ": state norm exceeded blow-up bound");
    return;
  }
  std::array<double, kMaxDim> cur;
  for (int i = 0; i < d; ++i) cur[i] = x[i];
  const double h = sys.integrator.h;
  double s = 0.0;
  while (s < t) {
    double step = std::min(h, t - s);
    detail::rk4_step(sys, p, s, step, cur);
    s += step;
    if (norm2(cur.data(), d) > sys.integrator.blowup)
      throw Diverged(sys.name + ": state norm exceeded blow-up bound");
  }
  for (int i = 0; i < d; ++i) out[i] = cur[i];
}

inline Vec evolve(const CocycleSystem& sys, double p, const Vec& x, double t) {
  Vec out(sys.dim);
  evolve_into(sys, p, x.data(), t, out.data());
  return out;
}

// || phi(t+s,p,x) - phi(t, theta_s p, phi(s,p,x)) ||
inline double cocycle_residual(const CocycleSystem& sys, double p, const Vec& x, double s,
                               double t) {
  Vec whole = evolve(sys, p, x, t + s);
  Vec first = evolve(sys, p, x, s);
  Vec second = evolve(sys, shift(sys.base, p, s), first, t);
  return dist2(whole, second);
}

// || phi(t,p,x(p)) - x(theta_t p) ||; zero witnesses stationarity at (p, t).
inline double stationary_residual(const CocycleSystem& sys,
                                  const std::function<Vec(double)>& x_map, double p,
                                  double t) {
  Vec evolved = evolve(sys, p, x_map(p), t);
  Vec target = x_map(shift(sys.base, p, t));
  return dist2(evolved, target);
}

}  // namespace cnds
