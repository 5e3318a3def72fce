#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsn/assumption_audit.hpp"
#include "nsn/config.hpp"
#include "nsn/equilibrium.hpp"
#include "nsn/game_model.hpp"

namespace nsn::runner {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Exit-code contract shared by every subcommand.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitSolverFailure = 2;

// Flags common to the subcommands; unset values fall back to the scenario's
// `solver` block and then to built-in defaults.
struct CommonOptions {
  std::optional<double> lambda;
  bool diu = false;
  std::optional<BrMode> mode;
  std::optional<TieBreak> tiebreak;
  std::optional<int> grid_x;
  std::optional<int> grid_w;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<std::string> out;
  bool svg = false;
};

struct SolveArgs {
  std::string scenario;
  CommonOptions common;
  std::optional<std::string> init;  // "x11,x12;x21,x22"
  bool multistart = false;
};

struct SweepArgs {
  std::string scenario;
  CommonOptions common;
  double lambda_from = 0.0;
  double lambda_to = 1.0;
  double lambda_step = 0.01;
  bool both = false;
};

struct ParetoArgs {
  std::string scenario;
  CommonOptions common;
  std::string at = "ddu";
  int grid_n = 401;
};

struct AuditArgs {
  std::string scenario;
  CommonOptions common;
  std::optional<int> samples;
};

struct VerifyArgs {
  std::string scenario;
  std::string certificate;
  CommonOptions common;
};

struct FollowersCheckArgs {
  std::string scenario;
  CommonOptions common;
  int samples = 1000;
};

struct BrArgs {
  std::string scenario;
  CommonOptions common;
  int leader = 1;  // 1-based
  std::string profile;
  std::optional<double> w;
};

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_pareto(const ParetoArgs& args, std::ostream& out, std::ostream& err);
int cmd_audit(const AuditArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_followers_check(const FollowersCheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_br(const BrArgs& args, std::ostream& out, std::ostream& err);

// Parses "0,0;1,1" into a profile of the spec's shape.
LeaderProfile parse_profile(const LqGameSpec& spec, const std::string& text);

// Lambda grid from..to inclusive with step > 0; values are from + k * step.
std::vector<double> lambda_grid(double from, double to, double step);

// --- file formats -------------------------------------------------------

std::string certificate_to_json(const LqGameSpec& spec, const ReactionMap& map,
                                const EquilibriumCertificate& cert);
EquilibriumCandidate candidate_from_json(const LqGameSpec& spec, const std::string& text);

std::string trace_csv(const LqGameSpec& spec, const std::vector<TraceRow>& trace);
// With both regimes the `ddu_ge_diu` column compares each lambda's weighted sums.
std::string sweep_csv(const LqGameSpec& spec, const std::vector<SweepRow>& rows, bool both);
std::string pareto_csv(const std::vector<ParetoPoint>& points, std::size_t n);
std::string audit_json(const AuditReport& report);

std::string format_real(double v);

// Resolves the run directory: --out verbatim, else $NSN_DDU_OUT or ./runs plus
// a timestamped subdirectory.
std::filesystem::path make_run_dir(const std::optional<std::string>& out, const std::string& command);

}  // namespace nsn::runner
