#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nsn/follower_layer.hpp"
#include "nsn/game_model.hpp"

namespace nsn {

enum class Boundary { kInterior, kAtLo, kAtHi };
const char* to_string(Boundary b);

// The virtual player's weighted objective after substituting y = G(x, w):
//   J(w) = quad w^2 + lin w + constant.
struct ScalarizedObjective {
  double quad = 0.0;
  double lin = 0.0;
  double constant = 0.0;

  double operator()(double w) const { return (quad * w + lin) * w + constant; }
};

ScalarizedObjective scalarized_objective(const LqGameSpec& spec, const ReactionMap& map,
                                         const LeaderProfile& x, const Eigen::VectorXd& weights);

struct WorstCaseResult {
  double w_star = 0.0;
  Eigen::VectorXd y_star;
  double objective = 0.0;
  Eigen::VectorXd payoffs;
  Boundary boundary = Boundary::kInterior;
  Interval interval;
  // Set when J is constant on W(x); w_star is then lo by convention.
  bool degenerate = false;
};

// Throws kInvalidValue for bad weights (negative, wrong length, sum != 1).
void validate_weights(const LqGameSpec& spec, const Eigen::VectorXd& weights);

// Weights (lambda, 1 - lambda) for a two-leader game.
Eigen::VectorXd lambda_weights(double lambda);

// Exact minimiser of J over W(x).
WorstCaseResult scalarized_worst_case(const LqGameSpec& spec, const ReactionMap& map,
                                      const LeaderProfile& x, const Eigen::VectorXd& weights);

struct ParetoPoint {
  double w = 0.0;
  Eigen::VectorXd f;
  bool nondominated = true;
};

constexpr double kDominanceTol = 1e-9;

// f' dominates f (minimisation): f' <= f + tol everywhere and f' < f - tol somewhere.
bool dominates(const Eigen::VectorXd& f_prime, const Eigen::VectorXd& f, double tol = kDominanceTol);

std::vector<ParetoPoint> pareto_front(const LqGameSpec& spec, const ReactionMap& map,
                                      const LeaderProfile& x, int grid_n);

struct ParetoCheck {
  bool pass = true;
  std::optional<double> witness_w;
  Eigen::VectorXd witness_margins;  // f(x, y*, w*) - f(x, G(x, w), w) at the witness
  double violation = 0.0;           // 0 on pass
};

// No grid sample lowers every leader's payoff by more than tol.
ParetoCheck check_weak_pareto(const LqGameSpec& spec, const ReactionMap& map, const LeaderProfile& x,
                              double w_star, const Eigen::VectorXd& y_star, int grid_n, double tol);

// No grid sample lowers some leader's payoff by more than tol while raising
// none by more than tol.
ParetoCheck check_strong_pareto(const LqGameSpec& spec, const ReactionMap& map,
                                const LeaderProfile& x, double w_star,
                                const Eigen::VectorXd& y_star, int grid_n, double tol);

// Uniform grid of n points spanning [lo, hi], both ends included exactly.
std::vector<double> uniform_grid(double lo, double hi, int n);

}  // namespace nsn
