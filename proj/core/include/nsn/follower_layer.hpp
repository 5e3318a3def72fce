#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nsn/game_model.hpp"

namespace nsn {

enum class Provenance { kAnalytic, kVerified };

// Affine follower equilibrium map y(x, w) = A x + b w + c0, with x the
// flattened leader profile. theta_j = e_j2 / h_j2 is follower j's gain.
struct ReactionMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c0;
  Eigen::VectorXd theta;
  Provenance provenance = Provenance::kAnalytic;
};

// Solves the coupled best-response system (I - T) y = diag(theta) (w 1 - gamma(x))
// symbolically in (x, w).
//   kFollowerUnbounded      some follower's inner LP is unbounded (or h_2 = 0)
//   kFollowerIndeterminate  I - T is singular
ReactionMap build_reaction_map(const LqGameSpec& spec);

Eigen::VectorXd follower_reaction(const ReactionMap& map, const LeaderProfile& x, double w);

// Optimal value of follower j's LP with the other followers' outputs held at y.
// Attained at v_1 = 0; ties in the v_1 coefficient resolve to v_1 = 0 as well.
double follower_best_value(const LqGameSpec& spec, std::size_t j, const LeaderProfile& x,
                           double w, const Eigen::VectorXd& y);

struct FollowerMargins {
  std::vector<double> margin;  // |y_j - best value|, per follower
  bool certified = false;      // every margin <= tol

  double worst() const;
};

FollowerMargins verify_follower_gne(const LqGameSpec& spec, const LeaderProfile& x, double w,
                                    const Eigen::VectorXd& y, double tol);

struct FollowerSweepResult {
  double worst_margin = 0.0;
  std::size_t samples = 0;
  bool certified = false;
};

// Draws `samples` feasible (x, w) pairs with w in the base set W and checks the
// map output against each follower's own LP. Upgrades `map` to kVerified on success.
FollowerSweepResult follower_consistency_sweep(const LqGameSpec& spec, ReactionMap& map,
                                               std::size_t samples, double tol,
                                               std::uint64_t seed);

}  // namespace nsn
