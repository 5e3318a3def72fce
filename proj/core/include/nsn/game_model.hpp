#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nsn/config.hpp"

namespace nsn {

// One leader of the linear-quadratic family:
//   f_i(x, y, w) = a . x_i + b . y + c (d - w)^2,  x_i in [box_lo, box_hi].
// sigma is the per-unit shrink that x_i applies to each side of W(x).
struct LeaderSpec {
  Eigen::VectorXd box_lo;
  Eigen::VectorXd box_hi;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double c = 0.0;
  double d = 0.0;
  Eigen::VectorXd sigma;

  std::size_t dim() const { return static_cast<std::size_t>(box_lo.size()); }
};

// Follower j solves
//   max_v  e . v   s.t.  v_1 >= 0,  sum_i g[i] . x_i + h . v = w + sum_{l != j} alpha_l y_l
// and reports its optimal value as y_j. alpha lists the other followers in
// increasing index order (length m - 1).
struct FollowerSpec {
  Eigen::Vector2d e = Eigen::Vector2d::Zero();
  Eigen::Vector2d h = Eigen::Vector2d::Zero();
  std::vector<Eigen::VectorXd> g;
  Eigen::VectorXd alpha;

  // alpha_{j,l} for l != j; `self` is this follower's own index.
  double coupling(std::size_t self, std::size_t other) const;
};

struct LqGameSpec {
  std::vector<LeaderSpec> leaders;
  std::vector<FollowerSpec> followers;
  double w_base_lo = 0.0;
  double w_base_hi = 0.0;
  bool ddu_enabled = true;
  SolverDefaults defaults;

  std::size_t num_leaders() const { return leaders.size(); }
  std::size_t num_followers() const { return followers.size(); }
  // Total strategy dimension sum_i p_i.
  std::size_t strategy_dim() const;
  // Offset of leader i's block in the flattened strategy vector.
  std::size_t offset(std::size_t i) const;
};

// Throws Error{kSchema|kDimension|kInvalidValue} naming the offending field.
void validate(const LqGameSpec& spec);

struct LeaderProfile {
  std::vector<Eigen::VectorXd> x;

  Eigen::VectorXd flatten() const;
  static LeaderProfile unflatten(const LqGameSpec& spec, const Eigen::VectorXd& flat);
  // Copy with leader i's block replaced.
  LeaderProfile with(std::size_t i, const Eigen::VectorXd& x_i) const;
};

LeaderProfile zero_profile(const LqGameSpec& spec);
// Every combination of box corners, leaders in order, coordinates low-first.
std::vector<LeaderProfile> corner_profiles(const LqGameSpec& spec);

// Parses the JSON scenario document and validates it.
LqGameSpec load_scenario(std::string_view text);
LqGameSpec load_scenario_file(const std::string& path);
std::string dump_scenario(const LqGameSpec& spec);

double eval_payoff(const LqGameSpec& spec, std::size_t i, const LeaderProfile& x,
                   const Eigen::VectorXd& y, double w);
Eigen::VectorXd eval_payoffs(const LqGameSpec& spec, const LeaderProfile& x,
                             const Eigen::VectorXd& y, double w);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double w, double tol = 0.0) const { return w >= lo - tol && w <= hi + tol; }
  // Distance from w to the interval, 0 inside.
  double violation(double w) const;
};

// Total restriction sum_i sigma_i . x_i that the profile applies to each side.
double restriction(const LqGameSpec& spec, const LeaderProfile& x);

// W(x). Throws Error{kEmptyUncertaintySet} when lo > hi + 1e-12.
Interval uncertainty_interval(const LqGameSpec& spec, const LeaderProfile& x);

struct LeaderFeasibility {
  bool feasible = true;
  double violation = 0.0;
};

struct FeasibilityReport {
  std::vector<LeaderFeasibility> leaders;

  bool all_feasible() const;
  double worst_violation() const;
};

FeasibilityReport check_profile_feasible(const LqGameSpec& spec, const LeaderProfile& x);
void check_dimensions(const LqGameSpec& spec, const LeaderProfile& x);

}  // namespace nsn
