// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "nsn/assumption_audit.hpp"
#include "nsn/equilibrium.hpp"
#include "nsn/follower_layer.hpp"
#include "nsn/worst_case.hpp"
#include "oracles.hpp"

namespace {

using namespace nsn;
using nsn::testing::profile2;

// Pinned tolerances.
constexpr double kSolutionTol = 1e-6;
constexpr double kOracleTol = 1e-9;
constexpr double kDominanceSlack = 1e-9;
constexpr double kBoundaryTol = 0.01;
constexpr double kMaxSolveSeconds = 1.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double max_abs(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

struct Solved {
  EquilibriumCandidate cand;
  EquilibriumCertificate cert;
  double seconds = 0.0;
};

Solved solve_reference(bool ddu, double lambda) {
  const auto start = std::chrono::steady_clock::now();
  LqGameSpec s = nsn::testing::reference_spec();
  s.ddu_enabled = ddu;
  const ReactionMap map = build_reaction_map(s);
  const JacobiResult r = jacobi_solve(s, map, lambda_weights(lambda), zero_profile(s), JacobiOptions{});
  Solved out{r.candidate, verify_equilibrium(s, map, r.candidate, VerifyOptions{}), 0.0};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void check_solution(Outcome& o, const Solved& r, const LeaderProfile& x, double w, const Eigen::Vector2d& y) {
  o.require(max_abs(r.cand.x.flatten() - x.flatten()) <= kSolutionTol, "x* mismatch");
  o.require(std::abs(r.cand.w - w) <= kSolutionTol, "w* = " + fmt(r.cand.w));
  for (const auto& ya : r.cand.y_anticipations) o.require(max_abs(ya - y) <= kSolutionTol, "y* mismatch");
}

Outcome criterion_ddu_equilibrium() {
  Outcome o;
  const Solved r = solve_reference(true, 0.2);
  check_solution(o, r, profile2(0, 0, 1, 1), 2.0, Eigen::Vector2d(-2, -2));
  o.require(r.cert.verdict == Verdict::kStrong, std::string("verdict ") + to_string(r.cert.verdict));
  o.require(r.seconds < kMaxSolveSeconds, "runtime " + fmt(r.seconds) + " s");
  if (o.pass) o.detail = "x*=((0,0),(1,1)) w*=2 y*=(-2,-2) strong in " + fmt(r.seconds) + " s";
  return o;
}

Outcome criterion_diu_equilibrium() {
  Outcome o;
  const Solved r = solve_reference(false, 0.2);
  check_solution(o, r, profile2(0, 0, 1, 0), 2.8, Eigen::Vector2d(-3.6, -3.6));
  if (o.pass) o.detail = "x*=((0,0),(1,0)) w*=2.8 y*=(-3.6,-3.6), verdict " + std::string(to_string(r.cert.verdict));
  return o;
}

std::vector<SweepRow> reference_sweep() {
  std::vector<double> lambdas;
  for (int k = 0; k <= 100; ++k) lambdas.push_back(k * 0.01);
  SweepOptions opts;
  opts.both_regimes = true;
  opts.jobs = 4;
  return lambda_sweep(nsn::testing::reference_spec(), lambdas, opts);
}

Outcome criterion_regions(const std::vector<SweepRow>& rows) {
  Outcome o;
  const std::vector<LeaderProfile> expected = {profile2(0, 0, 1, 1), profile2(0, 0, 1, 0), profile2(0, 1, 1, 0)};
  std::vector<int> region;
  for (const auto& r : rows) {
    if (!r.ddu) continue;
    if (!r.ok) {
      o.require(false, "row lambda=" + fmt(r.lambda) + " failed: " + r.error);
      return o;
    }
    int id = -1;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (max_abs(r.x.flatten() - expected[k].flatten()) <= kSolutionTol) id = static_cast<int>(k);
    }
    o.require(id >= 0, "unexpected profile at lambda=" + fmt(r.lambda));
    region.push_back(id);
  }
  if (!o.pass) return o;
  std::vector<double> transitions;
  for (std::size_t k = 1; k < region.size(); ++k) {
    if (region[k] != region[k - 1]) {
      o.require(region[k] == region[k - 1] + 1, "regions out of order");
      transitions.push_back(0.5 * (k - 1 + k) * 0.01);
    }
  }
  o.require(region.front() == 0 && region.back() == 2, "regions do not span all three profiles");
  o.require(transitions.size() == 2, std::to_string(transitions.size()) + " transitions");
  if (!o.pass) return o;
  o.require(std::abs(transitions[0] - 0.25) <= kBoundaryTol, "first transition at " + fmt(transitions[0]));
  o.require(std::abs(transitions[1] - 0.50) <= kBoundaryTol, "second transition at " + fmt(transitions[1]));
  if (o.pass) o.detail = "three regions, transitions at " + fmt(transitions[0]) + " and " + fmt(transitions[1]);
  return o;
}

Outcome criterion_dominance(const std::vector<SweepRow>& rows) {
  Outcome o;
  const std::size_t half = rows.size() / 2;
  double worst = INFINITY;
  for (std::size_t k = 0; k < half; ++k) {
    const SweepRow& d = rows[k];
    const SweepRow& u = rows[k + half];
    o.require(d.ddu && !u.ddu && d.lambda == u.lambda && d.ok && u.ok, "sweep rows misaligned");
    if (!o.pass) return o;
    worst = std::min(worst, d.weighted - u.weighted);
    o.require(d.weighted >= u.weighted - kDominanceSlack, "DDU < DIU at lambda=" + fmt(d.lambda));
  }
  const SweepRow& d = rows[20];
  const SweepRow& u = rows[20 + half];
  o.require(std::abs(d.lambda - 0.2) < 1e-12, "lambda grid misaligned");
  o.require(std::abs(d.weighted - 0.72) <= kSolutionTol, "DDU weighted " + fmt(d.weighted));
  o.require(std::abs(u.weighted - 0.592) <= kSolutionTol, "DIU weighted " + fmt(u.weighted));
  if (o.pass) {
    o.detail = "min(DDU-DIU)=" + fmt(worst) + "; lambda=0.2 pair (" + fmt(d.weighted) + ", " + fmt(u.weighted) + ")";
  }
  return o;
}

Outcome criterion_fronts() {
  Outcome o;
  LqGameSpec s = nsn::testing::reference_spec();
  const ReactionMap map = build_reaction_map(s);
  const auto ddu = pareto_front(s, map, solve_reference(true, 0.2).cand.x, 401);
  s.ddu_enabled = false;
  const auto diu = pareto_front(s, map, solve_reference(false, 0.2).cand.x, 401);
  auto near = [](const Eigen::VectorXd& f, double a, double b) {
    return std::abs(f[0] - a) <= kSolutionTol && std::abs(f[1] - b) <= kSolutionTol;
  };
  o.require(near(ddu.front().f, -11.2, 9.3) && near(ddu.back().f, 4.8, -0.3), "DDU endpoints");
  o.require(near(diu.front().f, -16.8, 16.5) && near(diu.back().f, 15.2, -2.7), "DIU endpoints");
  const bool subset = ddu.front().w >= diu.front().w && ddu.back().w <= diu.back().w &&
                      (ddu.front().w > diu.front().w || ddu.back().w < diu.back().w);
  o.require(subset, "DDU w-extent is not a strict subset");
  if (o.pass) {
    o.detail = "DDU w in [" + fmt(ddu.front().w) + "," + fmt(ddu.back().w) + "] inside DIU [" +
               fmt(diu.front().w) + "," + fmt(diu.back().w) + "]";
  }
  return o;
}

Outcome criterion_scalarization_oracle() {
  Outcome o;
  const LqGameSpec s = nsn::testing::reference_spec();
  const ReactionMap map = build_reaction_map(s);
  nsn::testing::SpecGenerator gen(6);
  constexpr int kGrid = 100000;
  double worst_clamp = 0.0, worst_steps = 0.0;
  for (int t = 0; t < 20; ++t) {
    const LeaderProfile x = gen.profile(s);
    const Interval iv = uncertainty_interval(s, x);
    const double step = iv.width() / (kGrid - 1);
    for (int k = 0; k <= 100; ++k) {
      const double lam = k / 100.0;
      const Eigen::VectorXd wts = lambda_weights(lam);
      const double w = scalarized_worst_case(s, map, x, wts).w_star;
      worst_clamp = std::max(worst_clamp, std::abs(w - std::clamp(6.0 - 16.0 * lam, iv.lo, iv.hi)));
      const double g = nsn::testing::grid_argmin(s, map, x, wts, kGrid);
      worst_steps = std::max(worst_steps, std::abs(w - g) / step);
    }
  }
  o.require(worst_clamp <= kOracleTol, "clamp discrepancy " + fmt(worst_clamp));
  o.require(worst_steps <= 1.0, "dense grid discrepancy " + fmt(worst_steps) + " steps");
  if (o.pass) o.detail = "clamp error " + fmt(worst_clamp) + ", grid gap " + fmt(worst_steps) + " steps";
  return o;
}

Outcome criterion_follower_oracle() {
  Outcome o;
  const LqGameSpec s = nsn::testing::reference_spec();
  const ReactionMap map = build_reaction_map(s);
  Eigen::MatrixXd A(2, 4);
  A << 2, 0, 2, 0, 2, 0, 2, 0;
  o.require(map.A == A && map.b == Eigen::Vector2d(-2, -2) && map.c0 == Eigen::Vector2d(0, 0),
            "reaction map coefficients are not exact");
  nsn::testing::SpecGenerator gen(1000);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const LeaderProfile x = gen.profile(s);
    const double w = gen.uniform(s.w_base_lo, s.w_base_hi);
    const Eigen::VectorXd y = follower_reaction(map, x, w);
    for (std::size_t j = 0; j < 2; ++j) {
      worst = std::max(worst, std::abs(y[static_cast<Eigen::Index>(j)] - nsn::testing::follower_lp_oracle(s, j, x, w, y)));
    }
    worst = std::max(worst, verify_follower_gne(s, x, w, y, kOracleTol).worst());
  }
  o.require(worst <= kOracleTol, "worst follower margin " + fmt(worst));
  if (o.pass) o.detail = "exact (2,0,2,0 | -2 | 0) map; worst margin " + fmt(worst) + " over 1000 points";
  return o;
}

Outcome criterion_pareto_inclusions() {
  Outcome o;
  nsn::testing::SpecGenerator gen(50);
  int weak = 0, strong = 0, flags = 0;
  for (int t = 0; t < 50; ++t) {
    const LqGameSpec s = gen.spec();
    const ReactionMap map = build_reaction_map(s);
    const LeaderProfile x = gen.profile(s);
    const WorstCaseResult any = scalarized_worst_case(s, map, x, gen.weights(s.num_leaders()));
    weak += check_weak_pareto(s, map, x, any.w_star, any.y_star, 4001, 1e-6).pass ? 1 : 0;
    const WorstCaseResult pos = scalarized_worst_case(s, map, x, gen.weights(s.num_leaders(), 0.05));
    strong += check_strong_pareto(s, map, x, pos.w_star, pos.y_star, 4001, 1e-6).pass ? 1 : 0;
    const auto pts = pareto_front(s, map, x, 401);
    const auto oracle = nsn::testing::brute_force_nondominated(pts);
    bool same = true;
    for (std::size_t k = 0; k < pts.size(); ++k) same = same && pts[k].nondominated == oracle[k];
    flags += same ? 1 : 0;
  }
  o.require(weak == 50, std::to_string(weak) + "/50 weak");
  o.require(strong == 50, std::to_string(strong) + "/50 strong");
  o.require(flags == 50, std::to_string(flags) + "/50 flag sets match");
  if (o.pass) o.detail = "50/50 weak, 50/50 strong, 50/50 nondominance flag sets";
  return o;
}

Outcome criterion_negative_controls() {
  Outcome o;
  LqGameSpec s = nsn::testing::reference_spec();
  s.leaders[1].b = Eigen::Vector2d(-0.4, -0.4);
  ReactionMap map = build_reaction_map(s);
  const auto x = profile2(0, 0, 1, 1);
  const ParetoCheck flipped = check_weak_pareto(s, map, x, 2.0, follower_reaction(map, x, 2.0), 4001, 1e-6);
  o.require(!flipped.pass && flipped.witness_w.has_value(), "flipped candidate passed the weak check");
  if (!o.pass) return o;
  o.require(std::abs(flipped.witness_margins[0] - 16.0) <= kSolutionTol &&
                std::abs(flipped.witness_margins[1] - 3.2) <= kSolutionTol,
            "flipped margins (" + fmt(flipped.witness_margins[0]) + ", " + fmt(flipped.witness_margins[1]) + ")");

  s = nsn::testing::reference_spec();
  s.leaders[0].c = 0.0;
  s.leaders[0].b.setZero();
  map = build_reaction_map(s);
  const Eigen::VectorXd y0 = follower_reaction(map, x, 0.0);
  const bool weak = check_weak_pareto(s, map, x, 0.0, y0, 4001, 1e-6).pass;
  const ParetoCheck strong = check_strong_pareto(s, map, x, 0.0, y0, 4001, 1e-6);
  o.require(weak, "constant-f1 candidate failed the weak check");
  o.require(!strong.pass && strong.witness_w.has_value(), "constant-f1 candidate passed the strong check");
  if (!o.pass) return o;
  o.require(std::abs(strong.witness_margins[0]) <= kSolutionTol &&
                std::abs(strong.witness_margins[1] - 4.0) <= kSolutionTol,
            "constant-f1 margins (" + fmt(strong.witness_margins[0]) + ", " + fmt(strong.witness_margins[1]) + ")");
  if (o.pass) {
    o.detail = "flipped witness w=" + fmt(*flipped.witness_w) + " margins (16, 3.2); constant-f1 witness w=" +
               fmt(*strong.witness_w) + " margins (0, 4)";
  }
  return o;
}

Outcome criterion_audit() {
  Outcome o;
  LqGameSpec s = nsn::testing::reference_spec();
  const AuditReport ref = audit_assumptions(s, build_reaction_map(s), 10000, 1e-9, 42);
  o.require(ref.verdict == ExistenceVerdict::kStrongExists && ref.basis == ExistenceBasis::kStrongAllConcave,
            std::string("reference verdict ") + to_string(ref.verdict));
  s.leaders[0].c = -0.2;
  const AuditReport neg = audit_assumptions(s, build_reaction_map(s), 10000, 1e-9, 42);
  o.require(neg.verdict == ExistenceVerdict::kWeakExists && neg.a2b_set == std::vector<std::size_t>{1},
            std::string("negative-curvature verdict ") + to_string(neg.verdict));

  nsn::testing::SpecGenerator gen(100);
  nsn::testing::RandomSpecOptions opts;
  opts.c_lo = -1.0;
  opts.c_hi = 1.0;
  int agree = 0, total = 0;
  for (int t = 0; t < 100; ++t) {
    LqGameSpec r = gen.spec(opts);
    for (auto& l : r.leaders) {
      if (l.c != 0.0 && std::abs(l.c) < 0.05) l.c = l.c < 0 ? -0.05 : 0.05;
    }
    const AuditReport rep = audit_assumptions(r, build_reaction_map(r), 2000, 1e-9, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < r.num_leaders(); ++i) {
      ++total;
      agree += rep.a2b_concave[i].pass == (r.leaders[i].c >= 0.0) ? 1 : 0;
    }
  }
  o.require(agree == total, std::to_string(agree) + "/" + std::to_string(total) + " memberships agree");
  if (o.pass) {
    o.detail = "strong_exists; c1=-0.2 gives weak_exists with S={2}; " + std::to_string(agree) + "/" +
               std::to_string(total) + " memberships agree";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<SweepRow> rows = reference_sweep();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"DDU equilibrium at lambda=0.2", criterion_ddu_equilibrium},
      {"DIU equilibrium at lambda=0.2", criterion_diu_equilibrium},
      {"three-region structure", [&] { return criterion_regions(rows); }},
      {"DDU weighted sum dominates DIU", [&] { return criterion_dominance(rows); }},
      {"Pareto front endpoints and extents", criterion_fronts},
      {"scalarization oracle", criterion_scalarization_oracle},
      {"follower oracle", criterion_follower_oracle},
      {"Pareto inclusion properties", criterion_pareto_inclusions},
      {"negative controls", criterion_negative_controls},
      {"assumption audit", criterion_audit},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
