#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cnds/errors.hpp"

namespace cnds {

// Driving flow on the base space. A base point is carried as a double:
// the phase for a periodic circle, the time value for the real line,
// the element index for a finite set, and 0 for the trivial point.
enum class BaseKind : uint8_t {
  TrivialPoint,
  PeriodicCircle,
  FiniteSet,
  RealLine,
};

struct BaseFlow {
  BaseKind kind = BaseKind::TrivialPoint;
  double period = 0.0;                  // PeriodicCircle
  int size = 0;                         // FiniteSet
  std::vector<int> permutation;         // FiniteSet one-step shift (bijection)
  double window_lo = 0.0;               // RealLine sampling window
  double window_hi = 0.0;
  std::string description;

  static BaseFlow trivial_point() {
    BaseFlow b;
    b.kind = BaseKind::TrivialPoint;
    b.description = "trivial-point";
    return b;
  }

  static BaseFlow periodic_circle(double period) {
    if (!(period > 0.0)) throw ConfigError("periodic-circle base requires period > 0");
    BaseFlow b;
    b.kind = BaseKind::PeriodicCircle;
    b.period = period;
    b.description = "periodic-circle";
    return b;
  }

  static BaseFlow finite_set(int size, std::vector<int> permutation) {
    if (size < 1) throw ConfigError("finite-set base requires size >= 1");
    if (static_cast<int>(permutation.size()) != size)
      throw ConfigError("finite-set permutation size mismatch");
    std::vector<char> seen(size, 0);
    for (int v : permutation) {
      if (v < 0 || v >= size || seen[v]) throw ConfigError("finite-set shift is not a bijection");
      seen[v] = 1;
    }
    BaseFlow b;
    b.kind = BaseKind::FiniteSet;
    b.size = size;
    b.permutation = std::move(permutation);
    b.description = "finite-set";
    return b;
  }

  // Cyclic +1 shift, the common case.
  static BaseFlow finite_cycle(int size) {
    std::vector<int> perm(size);
    for (int i = 0; i < size; ++i) perm[i] = (i + 1) % size;
    return finite_set(size, std::move(perm));
  }

  // The real line as driving space; the window only scopes sampling.
  static BaseFlow real_line(double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("real-line base requires lo < hi");
    BaseFlow b;
    b.kind = BaseKind::RealLine;
    b.window_lo = lo;
    b.window_hi = hi;
    b.description = "real-line";
    return b;
  }
};

inline double wrap_mod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

// theta_t p. Total on valid base points; t may be negative (group action).
inline double shift(const BaseFlow& base, double p, double t) {
  switch (base.kind) {
    case BaseKind::TrivialPoint:
      return 0.0;
    case BaseKind::PeriodicCircle:
      return wrap_mod(p + t, base.period);
    case BaseKind::RealLine:
      return p + t;
    case BaseKind::FiniteSet: {
      long long steps = std::llround(t);
      int idx = static_cast<int>(std::llround(p));
      if (idx < 0 || idx >= base.size) throw ConfigError("finite-set base point out of range");
      if (steps >= 0) {
        for (long long k = 0; k < steps; ++k) idx = base.permutation[idx];
      } else {
        // inverse permutation applied |steps| times
        std::vector<int> inv(base.size);
        for (int i = 0; i < base.size; ++i) inv[base.permutation[i]] = i;
        for (long long k = 0; k < -steps; ++k) idx = inv[idx];
      }
      return static_cast<double>(idx);
    }
  }
  return p;
}

}  // namespace cnds
