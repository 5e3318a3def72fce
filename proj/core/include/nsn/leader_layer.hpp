#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nsn/config.hpp"
#include "nsn/follower_layer.hpp"
#include "nsn/game_model.hpp"

namespace nsn {

struct BrOptions {
  BrMode mode = BrMode::kAnticipating;
  TieBreak tiebreak = TieBreak::kLexLow;
  AnticipatingSearch search = AnticipatingSearch::kLatticeGolden;
  int dense_grid_n = 101;
};

struct BestResponseResult {
  Eigen::VectorXd x_i;
  Eigen::VectorXd y_anticipated;
  double value = 0.0;
  double w_used = 0.0;
  std::vector<std::size_t> tie_coordinates;  // 0-based, ascending
  BrMode mode = BrMode::kAnticipating;
};

// Best response of leader i to x_{-i} (x's own block for i is ignored).
//
// Myopic: w is fixed, the payoff is affine in x_i after substituting G, so each
// coordinate sits at the box end picked by the sign of its reduced coefficient.
// Coordinates with |coefficient| <= 1e-12 are resolved by the tie-break policy.
//
// Anticipating: each candidate x_i is scored at the virtual player's
// weighted worst case over W((x_i, x_{-i})). Candidates whose W is empty are
// discarded. The search enumerates the box corners, then refines one
// coordinate at a time with golden-section passes split at the clamp
// breakpoints of the inner minimiser (or uses a dense grid when configured).
//
// Errors: kInfeasibleProfile when x_{-i} leaves its box or w is unreachable in
// myopic mode; kEmptyUncertaintySet when no candidate has a nonempty W.
BestResponseResult leader_best_response(const LqGameSpec& spec, const ReactionMap& map,
                                        std::size_t i, const LeaderProfile& x, double w,
                                        const Eigen::VectorXd& weights, const BrOptions& options);

// Reduced coefficient of each coordinate of x_i in f_i(x, G(x, w), w); w-independent.
Eigen::VectorXd myopic_coefficients(const LqGameSpec& spec, const ReactionMap& map, std::size_t i);

struct LeaderCheck {
  bool pass = true;
  std::optional<Eigen::VectorXd> witness_x;
  double margin = 0.0;  // best grid improvement over the candidate, clipped at 0
};

// Grid search (grid_n points per coordinate) over leader i's box with w fixed.
LeaderCheck check_leader_optimality(const LqGameSpec& spec, const ReactionMap& map, std::size_t i,
                                    const LeaderProfile& x, double w, int grid_n, double tol);

}  // namespace nsn
