#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "runner.hpp"

namespace {

using namespace nsn::runner;

struct CommonFlags {
  std::string mode;
  std::string tiebreak;
};

void add_common(CLI::App* app, CommonOptions& c, CommonFlags& raw) {
  app->add_option("--lambda", c.lambda, "weight on leader 1, in [0, 1]");
  app->add_flag("--diu", c.diu, "use the decision-independent set W");
  app->add_option("--mode", raw.mode, "best-response mode")
      ->check(CLI::IsMember({"myopic", "anticipating"}));
  app->add_option("--tiebreak", raw.tiebreak, "tie-breaking policy")
      ->check(CLI::IsMember({"lex-low", "prefer-restrict", "prefer-relax"}));
  app->add_option("--grid-x", c.grid_x, "grid points per leader coordinate in checks");
  app->add_option("--grid-w", c.grid_w, "grid points over W(x) in checks");
  app->add_option("--tol", c.tol, "verification tolerance");
  app->add_option("--seed", c.seed, "random seed for sampled checks");
  app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "run directory");
  app->add_flag("--svg", c.svg, "also write SVG plots");
}

void finish_common(CommonOptions& c, const CommonFlags& raw) {
  if (!raw.mode.empty()) c.mode = nsn::parse_br_mode(raw.mode);
  if (!raw.tiebreak.empty()) c.tiebreak = nsn::parse_tiebreak(raw.tiebreak);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash-Stackelberg-Nash games under decision-dependent uncertainty"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  SolveArgs solve;
  SweepArgs sweep;
  ParetoArgs pareto;
  AuditArgs audit;
  VerifyArgs verify;
  FollowersCheckArgs followers;
  BrArgs br;
  std::map<std::string, CommonFlags> raw;

  auto* s = app.add_subcommand("solve", "compute and certify an equilibrium");
  s->add_option("scenario", solve.scenario, "scenario JSON")->required();
  s->add_option("--init", solve.init, "initial profile, e.g. 0,0;1,1");
  s->add_flag("--multistart", solve.multistart, "also solve from every box corner");
  add_common(s, solve.common, raw["solve"]);

  auto* sw = app.add_subcommand("sweep", "solve over a grid of lambda values");
  sw->add_option("scenario", sweep.scenario, "scenario JSON")->required();
  sw->add_option("--from", sweep.lambda_from, "first lambda");
  sw->add_option("--to", sweep.lambda_to, "last lambda");
  sw->add_option("--step", sweep.lambda_step, "lambda step");
  sw->add_flag("--both", sweep.both, "run both regimes");
  add_common(sw, sweep.common, raw["sweep"]);

  auto* p = app.add_subcommand("pareto", "Pareto front of the virtual player at the equilibrium");
  p->add_option("scenario", pareto.scenario, "scenario JSON")->required();
  p->add_option("--at", pareto.at, "regime")->check(CLI::IsMember({"ddu", "diu"}));
  p->add_option("--grid", pareto.grid_n, "points on W(x*)");
  add_common(p, pareto.common, raw["pareto"]);

  auto* a = app.add_subcommand("audit", "check the existence conditions by sampling");
  a->add_option("scenario", audit.scenario, "scenario JSON")->required();
  a->add_option("--samples", audit.samples, "samples per check");
  add_common(a, audit.common, raw["audit"]);

  auto* v = app.add_subcommand("verify", "re-certify a stored candidate");
  v->add_option("scenario", verify.scenario, "scenario JSON")->required();
  v->add_option("certificate", verify.certificate, "certificate.json")->required();
  add_common(v, verify.common, raw["verify"]);

  auto* f = app.add_subcommand("followers", "follower-layer utilities");
  f->require_subcommand(1);
  auto* fc = f->add_subcommand("check", "compare the follower map with each follower's LP");
  fc->add_option("scenario", followers.scenario, "scenario JSON")->required();
  fc->add_option("--samples", followers.samples, "random (x, w) samples");
  add_common(fc, followers.common, raw["followers"]);

  auto* b = app.add_subcommand("br", "one leader's best response");
  b->add_option("scenario", br.scenario, "scenario JSON")->required();
  b->add_option("--leader", br.leader, "leader index, 1-based")->required();
  b->add_option("--profile", br.profile, "leader profile, e.g. 0,0;1,1")->required();
  b->add_option("--w", br.w, "uncertainty realisation (myopic mode)");
  add_common(b, br.common, raw["br"]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (*s) {
    finish_common(solve.common, raw["solve"]);
    return cmd_solve(solve, std::cout, std::cerr);
  }
  if (*sw) {
    finish_common(sweep.common, raw["sweep"]);
    return cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*p) {
    finish_common(pareto.common, raw["pareto"]);
    return cmd_pareto(pareto, std::cout, std::cerr);
  }
  if (*a) {
    finish_common(audit.common, raw["audit"]);
    return cmd_audit(audit, std::cout, std::cerr);
  }
  if (*v) {
    finish_common(verify.common, raw["verify"]);
    return cmd_verify(verify, std::cout, std::cerr);
  }
  if (*fc) {
    finish_common(followers.common, raw["followers"]);
    return cmd_followers_check(followers, std::cout, std::cerr);
  }
  finish_common(br.common, raw["br"]);
  return cmd_br(br, std::cout, std::cerr);
}
