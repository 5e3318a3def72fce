#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsn/error.hpp"
#include "nsn/follower_layer.hpp"
#include "nsn/game_model.hpp"
#include "nsn/leader_layer.hpp"
#include "nsn/worst_case.hpp"

namespace nsn {

struct EquilibriumCandidate {
  LeaderProfile x;
  double w = 0.0;
  // y^[1], ..., y^[n], y^[w]: each leader's anticipation, then the virtual player's.
  std::vector<Eigen::VectorXd> y_anticipations;
  Eigen::VectorXd weights;
  BrMode mode = BrMode::kAnticipating;
  TieBreak tiebreak = TieBreak::kLexLow;
  int iterations = 0;
  bool converged = false;
};

struct TraceRow {
  int iter = 0;
  Eigen::VectorXd x;  // flattened profile
  double w = 0.0;
  double displacement = 0.0;
};

struct JacobiOptions {
  BrOptions br;
  int max_iter = 200;
  double conv_tol = 1e-8;
};

struct JacobiResult {
  EquilibriumCandidate candidate;
  std::vector<TraceRow> trace;
};

// Failure of the fixed-point iteration; keeps the iterates for persistence.
class SolveError : public Error {
 public:
  SolveError(ErrorKind kind, const std::string& message, std::vector<TraceRow> trace)
      : Error(kind, message), trace_(std::move(trace)) {}

  const std::vector<TraceRow>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

// Best-response-of-best-response iteration. Each outer step computes every
// leader's best response to the previous profile (Jacobi), then re-solves the
// virtual player's scalarised worst case at the new profile. Converges when
// the max-norm displacement of (x, w) drops below conv_tol. Iterates are
// quantised to 1e-10; revisiting one without converging raises kCycling.
// Throws SolveError{kNoConvergence | kCycling | kEmptyUncertaintySet}.
JacobiResult jacobi_solve(const LqGameSpec& spec, const ReactionMap& map,
                          const Eigen::VectorXd& weights, const LeaderProfile& init,
                          const JacobiOptions& options);

enum class Verdict { kNotEquilibrium, kWeak, kStrong };
const char* to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

struct ConditionResult {
  bool pass = true;
  double margin = 0.0;
};

struct LeaderConditionResult {
  bool pass = true;
  double margin = 0.0;
  std::optional<Eigen::VectorXd> witness_x;
};

struct EquilibriumCertificate {
  EquilibriumCandidate candidate;
  ConditionResult cond_a;        // x in the leaders' boxes
  ConditionResult cond_b;        // w in W(x)
  ConditionResult anticipations; // every anticipation equals G(x, w)
  std::vector<LeaderConditionResult> cond_c;
  ParetoCheck cond_d1;
  ParetoCheck cond_d2;
  Verdict verdict = Verdict::kNotEquilibrium;
  bool reduced_outcome = false;

  bool cond_c_all() const;
};

struct VerifyOptions {
  int grid_n_x = 101;
  int grid_n_w = 4001;
  double tol = 1e-6;
};

EquilibriumCertificate verify_equilibrium(const LqGameSpec& spec, const ReactionMap& map,
                                          const EquilibriumCandidate& candidate,
                                          const VerifyOptions& options);

struct SweepRow {
  double lambda = 0.0;
  bool ddu = true;
  bool ok = false;
  std::string error;
  LeaderProfile x;
  double w = 0.0;
  Eigen::VectorXd y;
  Eigen::VectorXd f;
  double weighted = 0.0;
  Verdict verdict = Verdict::kNotEquilibrium;
};

struct SweepOptions {
  JacobiOptions jacobi;
  VerifyOptions verify;
  bool both_regimes = false;
  int jobs = 1;
};

// One row per lambda (per regime when both_regimes: DDU rows first, then DIU).
// Solver failures are recorded in the row and the sweep continues.
std::vector<SweepRow> lambda_sweep(const LqGameSpec& spec, const std::vector<double>& lambdas,
                                   const SweepOptions& options);

}  // namespace nsn
