#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cnds/cocycle.hpp"
#include "cnds/errors.hpp"
#include "cnds/grid.hpp"
#include "cnds/transition.hpp"

namespace cnds {

using BoxSet = std::vector<BoxId>;  // sorted, unique

inline bool boxset_subset(const BoxSet& a, const BoxSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline BoxSet boxset_intersect(const BoxSet& a, const BoxSet& b) {
  BoxSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace detail {

// Representative points of a box set: center and corners of every box.
inline std::vector<Vec> boxset_points(const Grid& grid, const BoxSet& boxes) {
  std::vector<Vec> pts;
  const int d = grid.dim();
  for (BoxId b : boxes) {
    pts.push_back(grid.center(b));
    auto lo = grid.box_lo(b);
    for (uint64_t mask = 0; mask < (uint64_t{1} << d); ++mask) {
      Vec c(d);
      for (int a = 0; a < d; ++a)
        c[a] = lo[a] + ((mask >> a) & 1 ? grid.width(a) : 0.0);
      pts.push_back(std::move(c));
    }
  }
  return pts;
}

// sup over sampled points of the distance to the target box union;
// empty source or target gives 0 by the stated convention.
inline double semi_dist_points(const Grid& grid, const std::vector<Vec>& pts,
                               const BoxSet& target) {
  if (pts.empty() || target.empty()) return 0.0;
  double sup = 0.0;
  for (const auto& x : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (BoxId b : target) best = std::min(best, grid.dist_to_box(x, b));
    sup = std::max(sup, best);
  }
  return sup;
}

}  // namespace detail

// Hausdorff semi-metric dist(A, B) = sup_{a in A} inf_{b in B} d(a, b)
// between box unions, sampled on centers and corners; precision is one
// box diameter.
inline double boxset_semi_dist(const Grid& grid, const BoxSet& from, const BoxSet& to) {
  return detail::semi_dist_points(grid, detail::boxset_points(grid, from), to);
}

inline double boxset_hausdorff(const Grid& grid, const BoxSet& a, const BoxSet& b) {
  return std::max(boxset_semi_dist(grid, a, b), boxset_semi_dist(grid, b, a));
}

// Box covering of phi(s, theta_{-s} p) applied to the box union U: the
// pullback image at time s, padded like the transition map.
inline BoxSet pullback_image(const CocycleSystem& sys, const Grid& grid, double p,
                             const BoxSet& U_boxes, double s, int scheme,
                             double eps_pad) {
  if (s < 0.0) throw ConfigError("pullback time must be >= 0");
  double q = shift(sys.base, p, -s);
  std::vector<Vec> images;
  std::vector<Vec> box_pts;
  BoxSet out, cover;
  // cover per source box so the spread dilation stays local to each box
  for (BoxId b : U_boxes) {
    detail::box_sample_points(grid, b, scheme, box_pts);
    images.clear();
    for (auto& pt : box_pts) images.push_back(evolve(sys, q, pt, s));
    detail::cover_boxes(grid, images, eps_pad, cover);
    out.insert(out.end(), cover.begin(), cover.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct PullbackResult {
  double p = 0.0;
  std::vector<double> schedule;
  std::vector<BoxSet> coverings;
  BoxSet A_approx;
  std::optional<size_t> nested_from;
  bool converged = false;
  double final_distance = 0.0;  // Hausdorff between the last two coverings
};

// Fiberwise local attractor by iterated pullback images over the
// schedule: intersect the coverings once they are monotone nonincreasing
// and have re-entered U (the pre-attractor containment of Eq 2.1).
inline PullbackResult pullback_attractor(const CocycleSystem& sys, const Grid& grid,
                                         double p, const BoxSet& U_boxes,
                                         const std::vector<double>& schedule, double tol,
                                         int scheme = 3, double eps_pad = 0.0) {
  if (schedule.empty()) throw ConfigError("pullback schedule is empty");
  for (size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1]))
      throw ConfigError("pullback schedule must be strictly increasing");

  PullbackResult res;
  res.p = p;
  res.schedule = schedule;
  for (double s : schedule)
    res.coverings.push_back(pullback_image(sys, grid, p, U_boxes, s, scheme, eps_pad));

  const size_t K = res.coverings.size();
  for (size_t k = 0; k < K; ++k) {
    if (!boxset_subset(res.coverings[k], U_boxes)) continue;
    bool monotone = true;
    for (size_t j = k + 1; j < K; ++j)
      if (!boxset_subset(res.coverings[j], res.coverings[j - 1])) monotone = false;
    if (monotone) {
      res.nested_from = k;
      break;
    }
  }
  if (!res.nested_from)
    throw NotNested("pullback coverings never stabilize inside U over the schedule");

  res.A_approx = res.coverings[*res.nested_from];
  for (size_t k = *res.nested_from + 1; k < K; ++k)
    res.A_approx = boxset_intersect(res.A_approx, res.coverings[k]);
  if (K >= 2) {
    res.final_distance = boxset_hausdorff(grid, res.coverings[K - 1], res.coverings[K - 2]);
    res.converged = res.final_distance <= tol;
  }
  return res;
}

// Pullback convergence series of Def 2.2: the semi-metric distance from
// the sampled pullback image of D to the box union A, per schedule time.
inline std::vector<double> pullback_convergence(const CocycleSystem& sys, const Grid& grid,
                                                double p, const BoxSet& D_boxes,
                                                const BoxSet& A_boxes,
                                                const std::vector<double>& schedule,
                                                int scheme = 3) {
  for (size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1]))
      throw ConfigError("pullback schedule must be strictly increasing");
  std::vector<double> series;
  std::vector<Vec> box_pts;
  for (double s : schedule) {
    double q = shift(sys.base, p, -s);
    std::vector<Vec> images;
    for (BoxId b : D_boxes) {
      detail::box_sample_points(grid, b, scheme, box_pts);
      for (auto& pt : box_pts) images.push_back(evolve(sys, q, pt, s));
    }
    series.push_back(detail::semi_dist_points(grid, images, A_boxes));
  }
  return series;
}

}  // namespace cnds
