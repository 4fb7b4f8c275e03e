#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "cnds/cocycle.hpp"
#include "cnds/errors.hpp"

namespace cnds {

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double amp = 5.0;     // forcing amplitude on the y component
  double tau = 1.0;     // forcing period
};

namespace detail {

constexpr double kPi = std::numbers::pi;

// Semiflow of dx/dt = -cos x on the circle, in closed form via the
// Gudermannian function. Equilibria at +-pi/2; the branch (pi/2, 3pi/2)
// maps onto (-pi/2, pi/2) through y -> pi - y, which satisfies the same
// equation.
inline double cosine_semiflow(double t, double y) {
  double z = wrap_mod(y + kPi / 2.0, 2.0 * kPi) - kPi / 2.0;  // [-pi/2, 3pi/2)
  if (std::abs(z - kPi / 2.0) < 1e-14 || std::abs(z + kPi / 2.0) < 1e-14) return z;
  bool flip = z > kPi / 2.0;
  if (flip) z = kPi - z;
  double u = std::asinh(std::tan(z));
  double z2 = std::atan(std::sinh(u - t));
  return flip ? kPi - z2 : z2;
}

}  // namespace detail

// dx/dt = 2tx with driving space R (p = t0); phi(t, t0, x) = x e^{t^2 + 2 t t0}.
// The base window scopes sampling only; forward orbits escape in finite time,
// handled by the blow-up bound.
inline CocycleSystem make_example_5_1(double window = 2.0) {
  CocycleSystem sys;
  sys.name = "example-5-1";
  sys.base = BaseFlow::real_line(-window, window);
  sys.dim = 1;
  sys.window_lo = {-window};
  sys.window_hi = {window};
  sys.closed_form = [](double t, double p, const double* x, double* out) {
    out[0] = x[0] * std::exp(t * t + 2.0 * t * p);
  };
  return sys;
}

// Rotating-frame conjugation of dx/dt = -cos x on the circle:
// phi(t,p) = psi(theta_t p) o phi0(t) o psi^{-1}(p) with psi(p)x = x + p.
inline CocycleSystem make_example_5_2_circle() {
  CocycleSystem sys;
  sys.name = "example-5-2-circle";
  sys.base = BaseFlow::periodic_circle(2.0 * detail::kPi);
  sys.dim = 1;
  sys.window_lo = {0.0};
  sys.window_hi = {2.0 * detail::kPi};
  sys.state_circular = true;
  sys.closed_form = [](double t, double p, const double* x, double* out) {
    double y = detail::cosine_semiflow(t, x[0] - p);
    out[0] = wrap_mod(p + t + y, 2.0 * detail::kPi);
  };
  return sys;
}

// Classical Lorenz vector field with additive periodic forcing on y.
// Base point is the forcing phase in [0, tau).
inline CocycleSystem make_forced_lorenz(const LorenzParams& prm = {}) {
  if (!(prm.tau > 0.0)) throw ConfigError("forced-lorenz requires tau > 0");
  CocycleSystem sys;
  sys.name = "forced-lorenz";
  sys.base = BaseFlow::periodic_circle(prm.tau);
  sys.dim = 3;
  sys.window_lo = {-30.0, -30.0, -10.0};
  sys.window_hi = {30.0, 30.0, 60.0};
  const double sigma = prm.sigma, rho = prm.rho, beta = prm.beta;
  const double amp = prm.amp, tau = prm.tau;
  sys.vector_field = [sigma, rho, beta, amp, tau](double pt, const double* x, double* dx) {
    dx[0] = sigma * (x[1] - x[0]);
    dx[1] = rho * x[0] - x[1] - x[0] * x[2] + amp * std::sin(2.0 * detail::kPi * pt / tau);
    dx[2] = x[0] * x[1] - beta * x[2];
  };
  return sys;
}

// Autonomous dx/dt = x - x^3 over the trivial base; equilibria {-1, 0, 1}.
inline CocycleSystem make_double_well() {
  CocycleSystem sys;
  sys.name = "double-well";
  sys.base = BaseFlow::trivial_point();
  sys.dim = 1;
  sys.window_lo = {-2.0};
  sys.window_hi = {2.0};
  sys.vector_field = [](double, const double* x, double* dx) {
    dx[0] = x[0] - x[0] * x[0] * x[0];
  };
  return sys;
}

inline CocycleSystem make_builtin(const std::string& name) {
  if (name == "example-5-1") return make_example_5_1();
  if (name == "example-5-2-circle") return make_example_5_2_circle();
  if (name == "forced-lorenz") return make_forced_lorenz();
  if (name == "double-well") return make_double_well();
  throw UnknownName("unknown builtin system: " + name);
}

}  // namespace cnds
