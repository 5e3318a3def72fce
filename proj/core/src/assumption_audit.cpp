#include "nsn/assumption_audit.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "nsn/error.hpp"

namespace nsn {

namespace {

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + unit_(rng_) * (hi - lo); }

  Eigen::VectorXd in_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd out(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) out[k] = uniform(lo[k], hi[k]);
    return out;
  }

  LeaderProfile profile(const LqGameSpec& spec) {
    LeaderProfile x;
    for (const auto& l : spec.leaders) x.x.push_back(in_box(l.box_lo, l.box_hi));
    return x;
  }

  double w(const LqGameSpec& spec) { return uniform(spec.w_base_lo, spec.w_base_hi); }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// Bounding box of G(X, W); the map is affine, so the extremes sit at vertices.
Box follower_image(const LqGameSpec& spec, const ReactionMap& map) {
  const Eigen::Index m = map.b.size();
  Box box{map.c0, map.c0};
  Eigen::VectorXd lo_all(map.A.cols()), hi_all(map.A.cols());
  Eigen::Index off = 0;
  for (const auto& l : spec.leaders) {
    lo_all.segment(off, l.box_lo.size()) = l.box_lo;
    hi_all.segment(off, l.box_hi.size()) = l.box_hi;
    off += l.box_lo.size();
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < map.A.cols(); ++k) {
      const double a = map.A(j, k) * lo_all[k];
      const double b = map.A(j, k) * hi_all[k];
      box.lo[j] += std::min(a, b);
      box.hi[j] += std::max(a, b);
    }
    const double a = map.b[j] * spec.w_base_lo;
    const double b = map.b[j] * spec.w_base_hi;
    box.lo[j] += std::min(a, b);
    box.hi[j] += std::max(a, b);
    if (box.hi[j] - box.lo[j] < 1.0) {
      box.lo[j] -= 1.0;
      box.hi[j] += 1.0;
    }
  }
  return box;
}

void record(SampledCheck& check, double violation, double tol) {
  ++check.samples;
  check.worst_violation = std::max(check.worst_violation, violation);
  if (violation > tol) check.pass = false;
}

}  // namespace

const char* to_string(ExistenceVerdict v) {
  switch (v) {
    case ExistenceVerdict::kStrongExists: return "strong_exists";
    case ExistenceVerdict::kWeakExists: return "weak_exists";
    case ExistenceVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

const char* to_string(ExistenceBasis b) {
  switch (b) {
    case ExistenceBasis::kNone: return "none";
    case ExistenceBasis::kStrongAllConcave: return "strong_all_concave";
    case ExistenceBasis::kWeakSomeConcave: return "weak_some_concave";
    case ExistenceBasis::kWeakSomeQuasiConcave: return "weak_some_quasiconcave";
  }
  return "none";
}

AuditReport audit_assumptions(const LqGameSpec& spec, const ReactionMap& map,
                              std::size_t sample_count, double tol, std::uint64_t seed) {
  if (sample_count < 1) throw Error(ErrorKind::kInvalidValue, "sample_count must be at least 1");
  const std::size_t n = spec.num_leaders();
  AuditReport report;
  report.seed = seed;
  report.sample_count = sample_count;
  report.structural_note =
      "continuity of the strategy boxes, the follower map and W(x) holds structurally "
      "(constant boxes, affine map, affine interval ends); not sampled";
  report.a2a_quasiconcave.resize(n);
  report.a2b_concave.resize(n);
  report.a3_quasiconcave.resize(n);

  Sampler sample(seed);
  const Box ybox = follower_image(spec, map);

  // Graph of G is convex: G(midpoint) equals the midpoint of the images.
  for (std::size_t s = 0; s < sample_count; ++s) {
    const LeaderProfile x1 = sample.profile(spec);
    const LeaderProfile x2 = sample.profile(spec);
    const double w1 = sample.w(spec);
    const double w2 = sample.w(spec);
    const Eigen::VectorXd mid_flat = 0.5 * (x1.flatten() + x2.flatten());
    const LeaderProfile xm = LeaderProfile::unflatten(spec, mid_flat);
    const Eigen::VectorXd ym = follower_reaction(map, xm, 0.5 * (w1 + w2));
    const Eigen::VectorXd avg = 0.5 * (follower_reaction(map, x1, w1) + follower_reaction(map, x2, w2));
    record(report.a1b_graph_convex, (ym - avg).lpNorm<Eigen::Infinity>(), tol);
  }

  // W(x) nonempty on sampled profiles and on every box corner.
  auto check_interval = [&](const LeaderProfile& x) {
    try {
      (void)uncertainty_interval(spec, x);
      record(report.a1c_w_interval, 0.0, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEmptyUncertaintySet) throw;
      const double r = restriction(spec, x);
      ++report.a1c_w_interval.samples;
      report.a1c_w_interval.pass = false;
      report.a1c_w_interval.worst_violation =
          std::max(report.a1c_w_interval.worst_violation,
                   (spec.w_base_lo + r) - (spec.w_base_hi - r));
    }
  };
  for (std::size_t s = 0; s < sample_count; ++s) check_interval(sample.profile(spec));
  if (spec.strategy_dim() <= 16) {
    for (const auto& corner : corner_profiles(spec)) check_interval(corner);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = spec.leaders[i];
    for (std::size_t s = 0; s < sample_count; ++s) {
      // Quasi-concavity in (x_i, y) at fixed (x_{-i}, w).
      const LeaderProfile base = sample.profile(spec);
      const double w = sample.w(spec);
      const Eigen::VectorXd xa = sample.in_box(l.box_lo, l.box_hi);
      const Eigen::VectorXd xb = sample.in_box(l.box_lo, l.box_hi);
      const Eigen::VectorXd ya = sample.in_box(ybox.lo, ybox.hi);
      const Eigen::VectorXd yb = sample.in_box(ybox.lo, ybox.hi);
      const double fa = eval_payoff(spec, i, base.with(i, xa), ya, w);
      const double fb = eval_payoff(spec, i, base.with(i, xb), yb, w);
      const double fm = eval_payoff(spec, i, base.with(i, 0.5 * (xa + xb)), 0.5 * (ya + yb), w);
      record(report.a2a_quasiconcave[i], std::min(fa, fb) - fm, tol);
    }
    for (std::size_t s = 0; s < sample_count; ++s) {
      // Concavity and quasi-concavity of -f_i in (y, w) at fixed x.
      const LeaderProfile x = sample.profile(spec);
      const Eigen::VectorXd ya = sample.in_box(ybox.lo, ybox.hi);
      const Eigen::VectorXd yb = sample.in_box(ybox.lo, ybox.hi);
      const double wa = sample.w(spec);
      const double wb = sample.w(spec);
      const double fa = eval_payoff(spec, i, x, ya, wa);
      const double fb = eval_payoff(spec, i, x, yb, wb);
      const double fm = eval_payoff(spec, i, x, 0.5 * (ya + yb), 0.5 * (wa + wb));
      record(report.a2b_concave[i], fm - 0.5 * (fa + fb), tol);
      record(report.a3_quasiconcave[i], fm - std::max(fa, fb), tol);
    }
    if (report.a2b_concave[i].pass) report.a2b_set.push_back(i);
    if (report.a3_quasiconcave[i].pass) report.a3_set.push_back(i);
  }

  const bool base_ok =
      report.a1a_box && report.a1b_graph_convex.pass && report.a1c_w_interval.pass &&
      std::all_of(report.a2a_quasiconcave.begin(), report.a2a_quasiconcave.end(),
                  [](const auto& c) { return c.pass; });
  if (base_ok && report.a2b_set.size() == n) {
    report.verdict = ExistenceVerdict::kStrongExists;
    report.basis = ExistenceBasis::kStrongAllConcave;
  } else if (base_ok && !report.a2b_set.empty()) {
    report.verdict = ExistenceVerdict::kWeakExists;
    report.basis = ExistenceBasis::kWeakSomeConcave;
  } else if (base_ok && !report.a3_set.empty()) {
    report.verdict = ExistenceVerdict::kWeakExists;
    report.basis = ExistenceBasis::kWeakSomeQuasiConcave;
  }
  return report;
}

std::string existence_statement(const AuditReport& report) {
  auto leaders = [](const std::vector<std::size_t>& set) {
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < set.size(); ++k) os << (k ? "," : "") << set[k] + 1;
    os << "}";
    return os.str();
  };
  std::ostringstream os;
  switch (report.basis) {
    case ExistenceBasis::kStrongAllConcave:
      os << "strong_exists: at least one strong equilibrium point exists. Verified: nonempty "
            "compact convex strategy boxes, follower map with convex graph, nonempty interval "
            "W(x), payoffs quasi-concave in (x_i, y), and -f_i concave in (y, w) for every "
            "leader S = N = "
         << leaders(report.a2b_set) << ".";
      break;
    case ExistenceBasis::kWeakSomeConcave:
      os << "weak_exists: at least one weak equilibrium point exists. Verified: set-valued map "
            "conditions, payoffs quasi-concave in (x_i, y), and -f_i concave in (y, w) for the "
            "nonempty subset S = "
         << leaders(report.a2b_set) << ".";
      break;
    case ExistenceBasis::kWeakSomeQuasiConcave:
      os << "weak_exists: at least one weak equilibrium point exists under the relaxed "
            "condition. Verified: set-valued map conditions, payoffs quasi-concave in (x_i, y), "
            "and -f_i quasi-concave in (y, w) for the nonempty subset S = "
         << leaders(report.a3_set) << ".";
      break;
    case ExistenceBasis::kNone:
      os << "inconclusive: the sampled checks do not establish the sufficient conditions for "
            "existence.";
      break;
  }
  return os.str();
}

}  // namespace nsn
