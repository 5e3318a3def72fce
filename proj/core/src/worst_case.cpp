#include "nsn/worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsn/error.hpp"

namespace nsn {

namespace {

constexpr double kWeightSumTol = 1e-9;
constexpr double kConvexityEps = 1e-15;

struct GridSample {
  double w;
  Eigen::VectorXd diff;
};

std::vector<GridSample> grid_differences(const LqGameSpec& spec, const ReactionMap& map,
                                         const LeaderProfile& x, double w_star,
                                         const Eigen::VectorXd& y_star, int grid_n) {
  if (grid_n < 1) throw Error(ErrorKind::kInvalidValue, "grid_n must be positive");
  const Interval iv = uncertainty_interval(spec, x);
  const Eigen::VectorXd f_star = eval_payoffs(spec, x, y_star, w_star);
  std::vector<GridSample> out;
  const int n = iv.width() > 0.0 ? std::max(grid_n, 2) : 1;
  for (double w : uniform_grid(iv.lo, iv.hi, n)) {
    const Eigen::VectorXd y = follower_reaction(map, x, w);
    out.push_back({w, f_star - eval_payoffs(spec, x, y, w)});
  }
  return out;
}

}  // namespace

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::kInterior: return "interior";
    case Boundary::kAtLo: return "at_lo";
    case Boundary::kAtHi: return "at_hi";
  }
  return "interior";
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 1) throw Error(ErrorKind::kInvalidValue, "grid must have at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / (n - 1);
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = lo + k * step;
  out.back() = hi;
  return out;
}

void validate_weights(const LqGameSpec& spec, const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(weights.size()) != spec.num_leaders()) {
    throw Error(ErrorKind::kDimension, "weights: expected one weight per leader");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw Error(ErrorKind::kInvalidValue, "weights[" + std::to_string(i) + "]: must be nonnegative");
    }
  }
  if (std::abs(weights.sum() - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "weights: must sum to 1, got " << weights.sum();
    throw Error(ErrorKind::kInvalidValue, os.str());
  }
}

Eigen::VectorXd lambda_weights(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kInvalidValue, "lambda must lie in [0, 1]");
  }
  return Eigen::Vector2d(lambda, 1.0 - lambda);
}

ScalarizedObjective scalarized_objective(const LqGameSpec& spec, const ReactionMap& map,
                                         const LeaderProfile& x, const Eigen::VectorXd& weights) {
  validate_weights(spec, weights);
  const Eigen::VectorXd y0 = follower_reaction(map, x, 0.0);
  ScalarizedObjective J;
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
    const double lam = weights[static_cast<Eigen::Index>(i)];
    if (lam == 0.0) continue;
    const auto& l = spec.leaders[i];
    J.quad += lam * l.c;
    J.lin += lam * (l.b.dot(map.b) - 2.0 * l.c * l.d);
    J.constant += lam * (l.a.dot(x.x[i]) + l.b.dot(y0) + l.c * l.d * l.d);
  }
  return J;
}

WorstCaseResult scalarized_worst_case(const LqGameSpec& spec, const ReactionMap& map,
                                      const LeaderProfile& x, const Eigen::VectorXd& weights) {
  const Interval iv = uncertainty_interval(spec, x);
  const ScalarizedObjective J = scalarized_objective(spec, map, x, weights);

  WorstCaseResult out;
  out.interval = iv;
  if (iv.lo == iv.hi) {
    out.w_star = iv.lo;
  } else if (J.quad > kConvexityEps) {
    out.w_star = std::clamp(-J.lin / (2.0 * J.quad), iv.lo, iv.hi);
  } else if (J.quad == 0.0 && J.lin == 0.0) {
    out.w_star = iv.lo;
    out.degenerate = true;
  } else {
    // Affine or concave: the minimum sits at an endpoint; ties go to lo.
    out.w_star = J(iv.hi) < J(iv.lo) ? iv.hi : iv.lo;
  }

  if (out.w_star == iv.lo) {
    out.boundary = Boundary::kAtLo;
  } else if (out.w_star == iv.hi) {
    out.boundary = Boundary::kAtHi;
  } else {
    out.boundary = Boundary::kInterior;
  }
  out.y_star = follower_reaction(map, x, out.w_star);
  out.payoffs = eval_payoffs(spec, x, out.y_star, out.w_star);
  out.objective = weights.dot(out.payoffs);
  return out;
}

bool dominates(const Eigen::VectorXd& f_prime, const Eigen::VectorXd& f, double tol) {
  bool strictly = false;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    if (f_prime[k] > f[k] + tol) return false;
    if (f_prime[k] < f[k] - tol) strictly = true;
  }
  return strictly;
}

std::vector<ParetoPoint> pareto_front(const LqGameSpec& spec, const ReactionMap& map,
                                      const LeaderProfile& x, int grid_n) {
  if (grid_n < 2) throw Error(ErrorKind::kInvalidValue, "pareto_front: grid_n must be at least 2");
  const Interval iv = uncertainty_interval(spec, x);
  std::vector<ParetoPoint> points;
  points.reserve(static_cast<std::size_t>(grid_n));
  for (double w : uniform_grid(iv.lo, iv.hi, grid_n)) {
    const Eigen::VectorXd y = follower_reaction(map, x, w);
    points.push_back({w, eval_payoffs(spec, x, y, w), true});
  }
  for (auto& p : points) {
    for (const auto& q : points) {
      if (dominates(q.f, p.f)) {
        p.nondominated = false;
        break;
      }
    }
  }
  return points;
}

ParetoCheck check_weak_pareto(const LqGameSpec& spec, const ReactionMap& map, const LeaderProfile& x,
                              double w_star, const Eigen::VectorXd& y_star, int grid_n, double tol) {
  ParetoCheck out;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : grid_differences(spec, map, x, w_star, y_star, grid_n)) {
    const double worst_gain = s.diff.minCoeff();
    if (worst_gain > tol && worst_gain > best) {
      best = worst_gain;
      out.pass = false;
      out.witness_w = s.w;
      out.witness_margins = s.diff;
    }
  }
  if (!out.pass) out.violation = best;
  return out;
}

ParetoCheck check_strong_pareto(const LqGameSpec& spec, const ReactionMap& map,
                                const LeaderProfile& x, double w_star,
                                const Eigen::VectorXd& y_star, int grid_n, double tol) {
  ParetoCheck out;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : grid_differences(spec, map, x, w_star, y_star, grid_n)) {
    if (s.diff.minCoeff() < -tol) continue;
    const double gain = s.diff.maxCoeff();
    if (gain > tol && gain > best) {
      best = gain;
      out.pass = false;
      out.witness_w = s.w;
      out.witness_margins = s.diff;
    }
  }
  if (!out.pass) out.violation = best;
  return out;
}

}  // namespace nsn
