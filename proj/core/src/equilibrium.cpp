#include "nsn/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

namespace nsn {

namespace {

constexpr double kQuantum = 1e-10;

std::vector<std::int64_t> quantize(const Eigen::VectorXd& x, double w) {
  std::vector<std::int64_t> key;
  key.reserve(static_cast<std::size_t>(x.size()) + 1);
  for (Eigen::Index k = 0; k < x.size(); ++k) key.push_back(std::llround(x[k] / kQuantum));
  key.push_back(std::llround(w / kQuantum));
  return key;
}

std::string describe(const Eigen::VectorXd& x, double w) {
  std::ostringstream os;
  os << "x=(";
  for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
  os << "), w=" << w;
  return os.str();
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kNotEquilibrium: return "not_equilibrium";
    case Verdict::kWeak: return "weak";
    case Verdict::kStrong: return "strong";
  }
  return "not_equilibrium";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "not_equilibrium") return Verdict::kNotEquilibrium;
  if (text == "weak") return Verdict::kWeak;
  if (text == "strong") return Verdict::kStrong;
  return std::nullopt;
}

JacobiResult jacobi_solve(const LqGameSpec& spec, const ReactionMap& map,
                          const Eigen::VectorXd& weights, const LeaderProfile& init,
                          const JacobiOptions& options) {
  if (options.max_iter < 1) throw Error(ErrorKind::kInvalidValue, "max_iter must be at least 1");
  validate_weights(spec, weights);
  check_dimensions(spec, init);
  if (!check_profile_feasible(spec, init).all_feasible()) {
    throw Error(ErrorKind::kInfeasibleProfile, "initial profile is outside the leaders' boxes");
  }

  JacobiResult result;
  auto& trace = result.trace;
  LeaderProfile x = init;
  double w = 0.0;
  try {
    w = scalarized_worst_case(spec, map, x, weights).w_star;
  } catch (const Error& e) {
    throw SolveError(e.kind(), std::string("initial profile: ") + e.what(), trace);
  }
  trace.push_back({0, x.flatten(), w, 0.0});

  std::set<std::vector<std::int64_t>> seen;
  seen.insert(quantize(x.flatten(), w));

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    LeaderProfile next = x;
    try {
      for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
        next.x[i] = leader_best_response(spec, map, i, x, w, weights, options.br).x_i;
      }
    } catch (const Error& e) {
      throw SolveError(e.kind(), "iteration " + std::to_string(iter) + ": " + e.what(), trace);
    }
    double w_next = 0.0;
    try {
      w_next = scalarized_worst_case(spec, map, next, weights).w_star;
    } catch (const Error& e) {
      throw SolveError(e.kind(),
                       "iteration " + std::to_string(iter) + " at " +
                           describe(next.flatten(), w) + ": " + e.what(),
                       trace);
    }

    const Eigen::VectorXd flat = next.flatten();
    const double displacement =
        std::max((flat - x.flatten()).lpNorm<Eigen::Infinity>(), std::abs(w_next - w));
    trace.push_back({iter, flat, w_next, displacement});
    x = std::move(next);
    w = w_next;

    if (displacement < options.conv_tol) {
      auto& cand = result.candidate;
      cand.x = x;
      cand.w = w;
      const Eigen::VectorXd y = follower_reaction(map, x, w);
      cand.y_anticipations.assign(spec.num_leaders() + 1, y);
      cand.weights = weights;
      cand.mode = options.br.mode;
      cand.tiebreak = options.br.tiebreak;
      cand.iterations = iter;
      cand.converged = true;
      return result;
    }
    if (!seen.insert(quantize(flat, w)).second) {
      throw SolveError(ErrorKind::kCycling,
                       "best-response iteration revisited " + describe(flat, w) + " at iteration " +
                           std::to_string(iter) + " without converging",
                       trace);
    }
  }
  throw SolveError(ErrorKind::kNoConvergence,
                   "no convergence within " + std::to_string(options.max_iter) + " iterations",
                   trace);
}

bool EquilibriumCertificate::cond_c_all() const {
  return std::all_of(cond_c.begin(), cond_c.end(), [](const auto& c) { return c.pass; });
}

EquilibriumCertificate verify_equilibrium(const LqGameSpec& spec, const ReactionMap& map,
                                          const EquilibriumCandidate& candidate,
                                          const VerifyOptions& options) {
  check_dimensions(spec, candidate.x);
  EquilibriumCertificate cert;
  cert.candidate = candidate;
  const auto& x = candidate.x;
  const double w = candidate.w;
  const double tol = options.tol;

  const FeasibilityReport feas = check_profile_feasible(spec, x);
  cert.cond_a = {feas.worst_violation() <= tol, feas.worst_violation()};

  std::optional<Interval> iv;
  try {
    iv = uncertainty_interval(spec, x);
    const double v = iv->violation(w);
    cert.cond_b = {v <= tol, v};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kEmptyUncertaintySet) throw;
    const double r = restriction(spec, x);
    cert.cond_b = {false, (spec.w_base_lo + r) - (spec.w_base_hi - r)};
  }

  const Eigen::VectorXd y_g = follower_reaction(map, x, w);
  double antic = 0.0;
  for (const auto& y : candidate.y_anticipations) {
    if (y.size() != y_g.size()) {
      throw Error(ErrorKind::kDimension, "candidate anticipation has wrong dimension");
    }
    antic = std::max(antic, (y - y_g).lpNorm<Eigen::Infinity>());
  }
  cert.anticipations = {antic <= tol, antic};
  cert.reduced_outcome = cert.anticipations.pass;

  for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
    const LeaderCheck lc = check_leader_optimality(spec, map, i, x, w, options.grid_n_x, tol);
    cert.cond_c.push_back({lc.pass, lc.margin, lc.witness_x});
  }

  if (iv) {
    const Eigen::VectorXd y_w =
        candidate.y_anticipations.empty() ? y_g : candidate.y_anticipations.back();
    cert.cond_d1 = check_weak_pareto(spec, map, x, w, y_w, options.grid_n_w, tol);
    cert.cond_d2 = check_strong_pareto(spec, map, x, w, y_w, options.grid_n_w, tol);
  } else {
    cert.cond_d1.pass = false;
    cert.cond_d2.pass = false;
  }

  const bool base = cert.cond_a.pass && cert.cond_b.pass && cert.anticipations.pass && cert.cond_c_all();
  if (base && cert.cond_d2.pass && cert.cond_d1.pass) {
    cert.verdict = Verdict::kStrong;
  } else if (base && cert.cond_d1.pass) {
    cert.verdict = Verdict::kWeak;
  } else {
    cert.verdict = Verdict::kNotEquilibrium;
  }
  return cert;
}

std::vector<SweepRow> lambda_sweep(const LqGameSpec& spec, const std::vector<double>& lambdas,
                                   const SweepOptions& options) {
  for (double lam : lambdas) {
    if (!(lam >= 0.0 && lam <= 1.0)) throw Error(ErrorKind::kInvalidValue, "lambda values must lie in [0, 1]");
  }
  if (spec.num_leaders() != 2) {
    throw Error(ErrorKind::kInvalidValue, "lambda sweep requires exactly two leaders");
  }
  std::vector<bool> regimes;
  if (options.both_regimes) {
    regimes = {true, false};
  } else {
    regimes = {spec.ddu_enabled};
  }

  struct Job {
    double lambda;
    bool ddu;
  };
  std::vector<Job> jobs;
  for (bool ddu : regimes) {
    for (double lam : lambdas) jobs.push_back({lam, ddu});
  }

  const ReactionMap map = build_reaction_map(spec);
  LqGameSpec ddu_spec = spec;
  ddu_spec.ddu_enabled = true;
  LqGameSpec diu_spec = spec;
  diu_spec.ddu_enabled = false;

  std::vector<SweepRow> rows(jobs.size());
  auto run_row = [&](std::size_t k) {
    const Job& job = jobs[k];
    const LqGameSpec& s = job.ddu ? ddu_spec : diu_spec;
    SweepRow row;
    row.lambda = job.lambda;
    row.ddu = job.ddu;
    try {
      const Eigen::VectorXd weights = lambda_weights(job.lambda);
      const JacobiResult res = jacobi_solve(s, map, weights, zero_profile(s), options.jacobi);
      const EquilibriumCertificate cert = verify_equilibrium(s, map, res.candidate, options.verify);
      row.x = res.candidate.x;
      row.w = res.candidate.w;
      row.y = res.candidate.y_anticipations.back();
      row.f = eval_payoffs(s, row.x, row.y, row.w);
      row.weighted = weights.dot(row.f);
      row.verdict = cert.verdict;
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows[k] = std::move(row);
  };

  const auto workers = static_cast<std::size_t>(std::max(1, options.jobs));
  if (workers == 1 || jobs.size() < 2) {
    for (std::size_t k = 0; k < jobs.size(); ++k) run_row(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < jobs.size(); k += workers) run_row(k);
      });
    }
  }
  return rows;
}

}  // namespace nsn
