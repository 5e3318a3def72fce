#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "nsn/follower_layer.hpp"
#include "nsn/game_model.hpp"
#include "nsn/worst_case.hpp"

// Brute-force reference computations used to cross-check the closed forms.
namespace nsn::testing {

// Follower j's LP with y_{-j} fixed: eliminate v2 through the equality and
// scan v1 >= 0 on a uniform grid without assuming the sign of the v1 slope.
inline double follower_lp_oracle(const LqGameSpec& s, std::size_t j, const LeaderProfile& x, double w,
                                 const Eigen::VectorXd& y) {
  const FollowerSpec& f = s.followers[j];
  double rhs = w;
  for (std::size_t l = 0; l < s.num_followers(); ++l) {
    if (l != j) rhs += f.coupling(j, l) * y[static_cast<Eigen::Index>(l)];
  }
  for (std::size_t i = 0; i < s.num_leaders(); ++i) rhs -= f.g[i].dot(x.x[i]);
  double best = -INFINITY;
  for (int k = 0; k <= 2000; ++k) {
    const double v1 = 0.05 * k;
    const double v2 = (rhs - f.h[0] * v1) / f.h[1];
    best = std::max(best, f.e[0] * v1 + f.e[1] * v2);
  }
  return best;
}

inline double weighted_at(const LqGameSpec& s, const ReactionMap& map, const LeaderProfile& x,
                          const Eigen::VectorXd& weights, double w) {
  return weights.dot(eval_payoffs(s, x, follower_reaction(map, x, w), w));
}

// Dense-grid minimiser of the weighted payoff over W(x); first minimum wins.
inline double grid_argmin(const LqGameSpec& s, const ReactionMap& map, const LeaderProfile& x,
                          const Eigen::VectorXd& weights, int n) {
  const Interval iv = uncertainty_interval(s, x);
  double best_w = iv.lo, best = weighted_at(s, map, x, weights, iv.lo);
  for (int k = 1; k < n; ++k) {
    const double w = iv.lo + (iv.hi - iv.lo) * k / (n - 1);
    const double v = weighted_at(s, map, x, weights, w);
    if (v < best) {
      best = v;
      best_w = w;
    }
  }
  return best_w;
}

// O(n^2) nondominance written directly from the definition (minimisation, tol 1e-9).
inline std::vector<bool> brute_force_nondominated(const std::vector<ParetoPoint>& pts) {
  std::vector<bool> out(pts.size(), true);
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = 0; b < pts.size() && out[a]; ++b) {
      if (a == b) continue;
      bool all_le = true, some_lt = false;
      for (Eigen::Index i = 0; i < pts[a].f.size(); ++i) {
        if (pts[b].f[i] > pts[a].f[i] + 1e-9) all_le = false;
        if (pts[b].f[i] < pts[a].f[i] - 1e-9) some_lt = true;
      }
      if (all_le && some_lt) out[a] = false;
    }
  }
  return out;
}

}  // namespace nsn::testing
