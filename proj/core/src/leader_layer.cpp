#include "nsn/leader_layer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "nsn/error.hpp"
#include "nsn/worst_case.hpp"

namespace nsn {

namespace {

constexpr double kFlatCoefficient = 1e-12;
constexpr double kImproveTol = 1e-10;
constexpr int kUniformPieces = 8;
constexpr int kGoldenIterations = 100;
constexpr std::size_t kMaxGridPoints = 20'000'000;

double tie_tol(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }
double flat_tol(double v) { return 1e-10 * std::max(1.0, std::abs(v)); }

Eigen::VectorXd effective_sigma(const LqGameSpec& spec, std::size_t i) {
  const auto& s = spec.leaders[i].sigma;
  return spec.ddu_enabled ? s : Eigen::VectorXd::Zero(s.size());
}

void require_others_feasible(const LqGameSpec& spec, std::size_t i, const LeaderProfile& x) {
  if (i >= spec.num_leaders()) {
    throw Error(ErrorKind::kIndexOutOfRange, "leader index " + std::to_string(i) + " out of range");
  }
  check_dimensions(spec, x);
  const FeasibilityReport report = check_profile_feasible(spec, x);
  for (std::size_t l = 0; l < spec.num_leaders(); ++l) {
    if (l != i && !report.leaders[l].feasible) {
      std::ostringstream os;
      os << "x_{-" << i << "} infeasible: leader " << l << " violates its box by "
         << report.leaders[l].violation;
      throw Error(ErrorKind::kInfeasibleProfile, os.str());
    }
  }
}

// Picks among candidates whose value ties the maximum, per the tie-break policy.
// Candidates are in enumeration (lexicographic) order; infeasible ones carry nullopt.
std::optional<std::size_t> select_best(const std::vector<Eigen::VectorXd>& xs,
                                       const std::vector<std::optional<double>>& values,
                                       const Eigen::VectorXd& sigma, TieBreak tiebreak) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) {
    if (v && *v > best) best = *v;
  }
  if (!std::isfinite(best)) return std::nullopt;
  std::optional<std::size_t> pick;
  double pick_score = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!values[k] || *values[k] < best - tie_tol(best)) continue;
    double score = 0.0;
    if (tiebreak == TieBreak::kPreferRestrict) score = sigma.dot(xs[k]);
    if (tiebreak == TieBreak::kPreferRelax) score = -sigma.dot(xs[k]);
    if (!pick || score > pick_score) {
      pick = k;
      pick_score = score;
    }
  }
  return pick;
}

// Golden-section maximisation on [a, b]; returns the best point seen.
double golden_max(const std::function<double(double)>& phi, double a, double b) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = phi(c);
  double fd = phi(d);
  for (int it = 0; it < kGoldenIterations && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = phi(d);
    }
  }
  return fc >= fd ? c : d;
}

class AnticipatingScorer {
 public:
  AnticipatingScorer(const LqGameSpec& spec, const ReactionMap& map, std::size_t i,
                     const LeaderProfile& x, const Eigen::VectorXd& weights)
      : spec_(spec), map_(map), i_(i), base_(x), weights_(weights) {}

  std::optional<double> value(const Eigen::VectorXd& x_i) const {
    const LeaderProfile cand = base_.with(i_, x_i);
    try {
      const WorstCaseResult wc = scalarized_worst_case(spec_, map_, cand, weights_);
      return eval_payoff(spec_, i_, cand, wc.y_star, wc.w_star);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kEmptyUncertaintySet) return std::nullopt;
      throw;
    }
  }

  double score(const Eigen::VectorXd& x_i) const {
    return value(x_i).value_or(-std::numeric_limits<double>::infinity());
  }

  // Coordinate values where the inner minimiser switches regime along coordinate k.
  std::vector<double> breakpoints(const Eigen::VectorXd& x_i, std::size_t k) const {
    std::vector<double> out;
    const auto kk = static_cast<Eigen::Index>(k);
    const double sigma_k = spec_.leaders[i_].sigma[kk];
    if (!spec_.ddu_enabled || sigma_k == 0.0) return out;
    Eigen::VectorXd zeroed = x_i;
    zeroed[kk] = 0.0;
    const double r0 = restriction(spec_, base_.with(i_, zeroed));
    const double lo = spec_.w_base_lo;
    const double hi = spec_.w_base_hi;
    out.push_back((0.5 * (hi - lo) - r0) / sigma_k);
    const ScalarizedObjective J = scalarized_objective(spec_, map_, base_.with(i_, x_i), weights_);
    if (J.quad > 0.0) {
      const double ws = -J.lin / (2.0 * J.quad);
      out.push_back((ws - lo - r0) / sigma_k);
      out.push_back((hi - r0 - ws) / sigma_k);
    }
    return out;
  }

 private:
  const LqGameSpec& spec_;
  const ReactionMap& map_;
  std::size_t i_;
  LeaderProfile base_;
  Eigen::VectorXd weights_;
};

std::vector<Eigen::VectorXd> box_corners(const LeaderSpec& l) {
  const auto p = l.box_lo.size();
  if (p >= 24) throw Error(ErrorKind::kInvalidValue, "leader dimension too large for corner lattice");
  std::vector<Eigen::VectorXd> out;
  const std::size_t count = std::size_t{1} << p;
  for (std::size_t mask = 0; mask < count; ++mask) {
    Eigen::VectorXd c(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      const bool high = (mask >> (p - 1 - k)) & 1U;
      c[k] = high ? l.box_hi[k] : l.box_lo[k];
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Calls visit(point) for every point of a per-coordinate uniform grid, lexicographic order.
void for_each_grid_point(const LeaderSpec& l, int grid_n,
                         const std::function<void(const Eigen::VectorXd&)>& visit) {
  const auto p = l.box_lo.size();
  std::vector<std::vector<double>> axes;
  std::size_t total = 1;
  for (Eigen::Index k = 0; k < p; ++k) {
    const int n = l.box_lo[k] == l.box_hi[k] ? 1 : grid_n;
    axes.push_back(uniform_grid(l.box_lo[k], l.box_hi[k], n));
    total *= axes.back().size();
    if (total > kMaxGridPoints) throw Error(ErrorKind::kInvalidValue, "leader grid too large");
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  Eigen::VectorXd point(p);
  for (std::size_t n = 0; n < total; ++n) {
    for (Eigen::Index k = 0; k < p; ++k) point[k] = axes[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
    visit(point);
    for (auto k = static_cast<std::ptrdiff_t>(p) - 1; k >= 0; --k) {
      const auto kk = static_cast<std::size_t>(k);
      if (++idx[kk] < axes[kk].size()) break;
      idx[kk] = 0;
    }
  }
}

BestResponseResult myopic_response(const LqGameSpec& spec, const ReactionMap& map, std::size_t i,
                                   const LeaderProfile& x, double w, TieBreak tiebreak) {
  const auto& l = spec.leaders[i];
  if (spec.ddu_enabled) {
    double r_others = 0.0;
    for (std::size_t o = 0; o < spec.num_leaders(); ++o) {
      if (o != i) r_others += spec.leaders[o].sigma.dot(x.x[o]);
    }
    double r_min = 0.0;
    for (Eigen::Index k = 0; k < l.sigma.size(); ++k) {
      r_min += std::min(l.sigma[k] * l.box_lo[k], l.sigma[k] * l.box_hi[k]);
    }
    const double slack = std::min(spec.w_base_hi - w, w - spec.w_base_lo) - r_others - r_min;
    if (slack < -1e-12) {
      std::ostringstream os;
      os << "w=" << w << " is not in W((x_i, x_{-i})) for any x_i of leader " << i;
      throw Error(ErrorKind::kInfeasibleProfile, os.str());
    }
  } else if (w < spec.w_base_lo - 1e-12 || w > spec.w_base_hi + 1e-12) {
    throw Error(ErrorKind::kInfeasibleProfile, "w lies outside the uncertainty set W");
  }

  const Eigen::VectorXd coef = myopic_coefficients(spec, map, i);
  const Eigen::VectorXd sigma = effective_sigma(spec, i);
  BestResponseResult out;
  out.mode = BrMode::kMyopic;
  out.x_i.resize(l.box_lo.size());
  for (Eigen::Index k = 0; k < coef.size(); ++k) {
    if (coef[k] > kFlatCoefficient) {
      out.x_i[k] = l.box_hi[k];
    } else if (coef[k] < -kFlatCoefficient) {
      out.x_i[k] = l.box_lo[k];
    } else {
      out.tie_coordinates.push_back(static_cast<std::size_t>(k));
      bool high = false;
      if (tiebreak == TieBreak::kPreferRestrict) high = sigma[k] > 0.0;
      if (tiebreak == TieBreak::kPreferRelax) high = sigma[k] < 0.0;
      out.x_i[k] = high ? l.box_hi[k] : l.box_lo[k];
    }
  }
  const LeaderProfile chosen = x.with(i, out.x_i);
  out.w_used = w;
  out.y_anticipated = follower_reaction(map, chosen, w);
  out.value = eval_payoff(spec, i, chosen, out.y_anticipated, w);
  return out;
}

BestResponseResult anticipating_response(const LqGameSpec& spec, const ReactionMap& map,
                                         std::size_t i, const LeaderProfile& x,
                                         const Eigen::VectorXd& weights, const BrOptions& options) {
  validate_weights(spec, weights);
  const auto& l = spec.leaders[i];
  const Eigen::VectorXd sigma = effective_sigma(spec, i);
  const AnticipatingScorer scorer(spec, map, i, x, weights);

  auto search_grid = [&](int grid_n) -> std::optional<Eigen::VectorXd> {
    std::vector<Eigen::VectorXd> xs;
    std::vector<std::optional<double>> values;
    for_each_grid_point(l, grid_n, [&](const Eigen::VectorXd& p) {
      xs.push_back(p);
      values.push_back(scorer.value(p));
    });
    auto pick = select_best(xs, values, sigma, options.tiebreak);
    if (!pick) return std::nullopt;
    return xs[*pick];
  };

  Eigen::VectorXd best;
  if (options.search == AnticipatingSearch::kDenseGrid) {
    auto found = search_grid(options.dense_grid_n);
    if (!found) {
      throw Error(ErrorKind::kEmptyUncertaintySet,
                  "every candidate strategy of leader " + std::to_string(i) + " empties W(x)");
    }
    best = *found;
  } else {
    const std::vector<Eigen::VectorXd> corners = box_corners(l);
    std::vector<std::optional<double>> values;
    for (const auto& c : corners) values.push_back(scorer.value(c));
    if (auto pick = select_best(corners, values, sigma, options.tiebreak)) {
      best = corners[*pick];
    } else {
      auto found = search_grid(options.dense_grid_n);
      if (!found) {
        throw Error(ErrorKind::kEmptyUncertaintySet,
                    "every candidate strategy of leader " + std::to_string(i) + " empties W(x)");
      }
      best = *found;
    }

    // Coordinate refinement: the score is piecewise quadratic along each
    // coordinate, so golden-section runs on each piece between breakpoints.
    double best_value = scorer.score(best);
    for (int pass = 0; pass < 8; ++pass) {
      bool moved = false;
      for (Eigen::Index k = 0; k < best.size(); ++k) {
        const double lo = l.box_lo[k];
        const double hi = l.box_hi[k];
        if (lo == hi) continue;
        std::vector<double> cuts{lo, hi};
        for (int u = 1; u < kUniformPieces; ++u) cuts.push_back(lo + (hi - lo) * u / kUniformPieces);
        for (double t : scorer.breakpoints(best, static_cast<std::size_t>(k))) {
          if (std::isfinite(t) && t > lo && t < hi) cuts.push_back(t);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        Eigen::VectorXd probe = best;
        auto phi = [&](double t) {
          probe[k] = t;
          return scorer.score(probe);
        };
        double arg = best[k];
        double val = best_value;
        auto consider = [&](double t) {
          const double v = phi(t);
          if (v > val + kImproveTol * std::max(1.0, std::abs(val))) {
            val = v;
            arg = t;
          }
        };
        for (double t : cuts) consider(t);
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) consider(golden_max(phi, cuts[s], cuts[s + 1]));
        if (arg != best[k]) {
          best[k] = arg;
          best_value = val;
          moved = true;
        }
      }
      if (!moved) break;
    }
  }

  BestResponseResult out;
  out.mode = BrMode::kAnticipating;
  out.x_i = best;
  const LeaderProfile chosen = x.with(i, best);
  const WorstCaseResult wc = scalarized_worst_case(spec, map, chosen, weights);
  out.w_used = wc.w_star;
  out.y_anticipated = wc.y_star;
  out.value = eval_payoff(spec, i, chosen, wc.y_star, wc.w_star);

  for (Eigen::Index k = 0; k < best.size(); ++k) {
    if (l.box_lo[k] == l.box_hi[k]) continue;
    bool flat = true;
    Eigen::VectorXd probe = best;
    for (int s = 0; s <= 4 && flat; ++s) {
      probe[k] = l.box_lo[k] + (l.box_hi[k] - l.box_lo[k]) * s / 4.0;
      const auto v = scorer.value(probe);
      flat = v && std::abs(*v - out.value) <= flat_tol(out.value);
    }
    if (flat) out.tie_coordinates.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

}  // namespace

Eigen::VectorXd myopic_coefficients(const LqGameSpec& spec, const ReactionMap& map, std::size_t i) {
  const auto& l = spec.leaders.at(i);
  const auto off = static_cast<Eigen::Index>(spec.offset(i));
  const auto p = static_cast<Eigen::Index>(l.dim());
  return l.a + (l.b.transpose() * map.A.middleCols(off, p)).transpose();
}

BestResponseResult leader_best_response(const LqGameSpec& spec, const ReactionMap& map,
                                        std::size_t i, const LeaderProfile& x, double w,
                                        const Eigen::VectorXd& weights, const BrOptions& options) {
  require_others_feasible(spec, i, x);
  if (options.mode == BrMode::kMyopic) return myopic_response(spec, map, i, x, w, options.tiebreak);
  return anticipating_response(spec, map, i, x, weights, options);
}

LeaderCheck check_leader_optimality(const LqGameSpec& spec, const ReactionMap& map, std::size_t i,
                                    const LeaderProfile& x, double w, int grid_n, double tol) {
  if (i >= spec.num_leaders()) {
    throw Error(ErrorKind::kIndexOutOfRange, "leader index " + std::to_string(i) + " out of range");
  }
  if (grid_n < 2) throw Error(ErrorKind::kInvalidValue, "grid_n must be at least 2");
  const double current = eval_payoff(spec, i, x, follower_reaction(map, x, w), w);
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd arg;
  for_each_grid_point(spec.leaders[i], grid_n, [&](const Eigen::VectorXd& p) {
    const LeaderProfile cand = x.with(i, p);
    const double v = eval_payoff(spec, i, cand, follower_reaction(map, cand, w), w);
    if (v > best) {
      best = v;
      arg = p;
    }
  });
  LeaderCheck out;
  out.margin = std::max(0.0, best - current);
  out.pass = best - current <= tol;
  if (!out.pass) out.witness_x = arg;
  return out;
}

}  // namespace nsn
