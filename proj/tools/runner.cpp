#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nsn/error.hpp"
#include "nsn/follower_layer.hpp"
#include "nsn/leader_layer.hpp"
#include "nsn/worst_case.hpp"
#include "svg_plot.hpp"

namespace nsn::runner {

namespace {

using json = nlohmann::json;

// Input problems (unreadable file, schema) map to exit 1; the rest to exit 2.
bool is_input_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kSchema:
    case ErrorKind::kDimension:
    case ErrorKind::kInvalidValue:
    case ErrorKind::kIndexOutOfRange:
      return true;
    default:
      return false;
  }
}

struct Loaded {
  LqGameSpec spec;
  std::string text;
};

Loaded load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kSchema, path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  Loaded out{load_scenario(buf.str()), buf.str()};
  return out;
}

struct Resolved {
  SolverDefaults d;
  bool ddu = true;
};

Resolved resolve(const LqGameSpec& spec, const CommonOptions& c) {
  Resolved r{spec.defaults, spec.ddu_enabled && !c.diu};
  if (c.lambda) r.d.lambda = *c.lambda;
  if (c.mode) r.d.mode = *c.mode;
  if (c.tiebreak) r.d.tiebreak = *c.tiebreak;
  if (c.grid_x) r.d.grid_x = *c.grid_x;
  if (c.grid_w) r.d.grid_w = *c.grid_w;
  if (c.tol) r.d.tol = *c.tol;
  if (c.seed) r.d.seed = *c.seed;
  if (!(r.d.lambda >= 0.0 && r.d.lambda <= 1.0)) {
    throw Error(ErrorKind::kInvalidValue, "--lambda must lie in [0, 1]");
  }
  if (r.d.grid_x < 2 || r.d.grid_w < 2) throw Error(ErrorKind::kInvalidValue, "grids need at least 2 points");
  if (!(r.d.tol >= 0.0)) throw Error(ErrorKind::kInvalidValue, "--tol must be nonnegative");
  return r;
}

JacobiOptions jacobi_options(const SolverDefaults& d) {
  JacobiOptions o;
  o.br.mode = d.mode;
  o.br.tiebreak = d.tiebreak;
  o.max_iter = d.max_iter;
  o.conv_tol = d.conv_tol;
  return o;
}

VerifyOptions verify_options(const SolverDefaults& d) { return {d.grid_x, d.grid_w, d.tol}; }

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

json profile_json(const LeaderProfile& x) {
  json out = json::array();
  for (const auto& xi : x.x) out.push_back(vec_json(xi));
  return out;
}

json config_json(const Resolved& r, const CommonOptions& c) {
  const auto& d = r.d;
  return {{"lambda", d.lambda},       {"mode", to_string(d.mode)},
          {"tiebreak", to_string(d.tiebreak)},
          {"grid_x", d.grid_x},       {"grid_w", d.grid_w},
          {"tol", d.tol},             {"seed", d.seed},
          {"max_iter", d.max_iter},   {"conv_tol", d.conv_tol},
          {"regime", r.ddu ? "ddu" : "diu"},
          {"jobs", c.jobs}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

// Self-contained run record: echoes the input document and the resolved config.
class RunRecord {
 public:
  RunRecord(std::filesystem::path dir, std::string command, const std::string& scenario_text,
            json config)
      : dir_(std::move(dir)) {
    doc_["artifact_version"] = kArtifactVersion;
    doc_["command"] = std::move(command);
    doc_["scenario"] = json::parse(scenario_text);
    doc_["config"] = std::move(config);
    doc_["started_at"] = timestamp();
    doc_["outputs"] = json::array();
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& body) {
    write_file(dir_ / name, body);
    doc_["outputs"].push_back(name);
  }

  void set(const std::string& key, json value) { doc_[key] = std::move(value); }

  void finish(int exit_code) {
    doc_["exit_code"] = exit_code;
    doc_["finished_at"] = timestamp();
    write_file(dir_ / "run.json", doc_.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  json doc_;
};

std::string format_profile(const LeaderProfile& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.x.size(); ++i) {
    os << (i ? "," : "") << "(";
    for (Eigen::Index k = 0; k < x.x[i].size(); ++k) os << (k ? "," : "") << format_real(x.x[i][k]);
    os << ")";
  }
  os << ")";
  return os.str();
}

std::string format_vec(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) os << (k ? "," : "") << format_real(v[k]);
  os << ")";
  return os.str();
}

void print_certificate(std::ostream& out, const LqGameSpec& spec, const ReactionMap& map,
                       const EquilibriumCertificate& cert) {
  const auto& c = cert.candidate;
  const Eigen::VectorXd y = follower_reaction(map, c.x, c.w);
  out << "x* = " << format_profile(c.x) << "\n";
  out << "w* = " << format_real(c.w) << "\n";
  out << "y* = " << format_vec(y) << "\n";
  out << "payoffs = " << format_vec(eval_payoffs(spec, c.x, y, c.w)) << "\n";
  if (c.converged) out << "iterations = " << c.iterations << "\n";
  auto pf = [](bool p) { return p ? "pass" : "FAIL"; };
  out << "cond (a) feasibility: " << pf(cert.cond_a.pass) << " margin " << format_real(cert.cond_a.margin) << "\n";
  out << "cond (b) w in W(x):   " << pf(cert.cond_b.pass) << " margin " << format_real(cert.cond_b.margin) << "\n";
  out << "anticipations in G:   " << pf(cert.anticipations.pass) << " margin "
      << format_real(cert.anticipations.margin) << "\n";
  for (std::size_t i = 0; i < cert.cond_c.size(); ++i) {
    const auto& lc = cert.cond_c[i];
    out << "cond (c) leader " << i + 1 << ":     " << pf(lc.pass) << " margin " << format_real(lc.margin);
    if (lc.witness_x) out << " witness x_" << i + 1 << "=" << format_vec(*lc.witness_x);
    out << "\n";
  }
  auto pareto_line = [&](const char* name, const ParetoCheck& p) {
    out << name << pf(p.pass) << " margin " << format_real(p.violation);
    if (p.witness_w) out << " witness w=" << format_real(*p.witness_w) << " diff=" << format_vec(p.witness_margins);
    out << "\n";
  };
  pareto_line("cond (d1) weak Pareto:   ", cert.cond_d1);
  pareto_line("cond (d2) strong Pareto: ", cert.cond_d2);
  out << "reduced outcome: " << (cert.reduced_outcome ? "yes" : "no") << "\n";
  out << "verdict: " << to_string(cert.verdict) << "\n";
}

int report_error(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << "\n";
  return code;
}

json check_json(const ParetoCheck& p) {
  json out{{"pass", p.pass}, {"violation", p.violation}};
  out["witness_w"] = p.witness_w ? json(*p.witness_w) : json(nullptr);
  out["witness_margins"] = p.witness_w ? vec_json(p.witness_margins) : json(nullptr);
  return out;
}

json sampled_json(const SampledCheck& c) {
  return {{"pass", c.pass}, {"worst_violation", c.worst_violation}, {"samples", c.samples}};
}

std::string csv_header_x(const LqGameSpec& spec) {
  std::string h;
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
    for (std::size_t k = 0; k < spec.leaders[i].dim(); ++k) {
      h += ",x" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
    }
  }
  return h;
}

}  // namespace

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

LeaderProfile parse_profile(const LqGameSpec& spec, const std::string& text) {
  LeaderProfile x;
  std::stringstream leaders(text);
  std::string block;
  while (std::getline(leaders, block, ';')) {
    std::vector<double> vals;
    std::stringstream coords(block);
    std::string item;
    while (std::getline(coords, item, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(item, &used));
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error(ErrorKind::kSchema, "profile: cannot parse '" + item + "' as a number");
      }
    }
    x.x.push_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  check_dimensions(spec, x);
  return x;
}

std::vector<double> lambda_grid(double from, double to, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::kInvalidValue, "--step must be positive");
  if (!(from <= to)) throw Error(ErrorKind::kInvalidValue, "--from must not exceed --to");
  if (from < 0.0 || to > 1.0) throw Error(ErrorKind::kInvalidValue, "lambda range must lie in [0, 1]");
  const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(std::min(to, from + static_cast<double>(k) * step));
  return out;
}

std::filesystem::path make_run_dir(const std::optional<std::string>& out, const std::string& command) {
  namespace fs = std::filesystem;
  if (out) {
    fs::create_directories(*out);
    return fs::path(*out);
  }
  fs::path root = "runs";
  if (const char* env = std::getenv("NSN_DDU_OUT"); env && *env) root = env;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  fs::path dir = root / (command + "-" + stamp);
  for (int k = 1; fs::exists(dir); ++k) dir = root / (command + "-" + stamp + "-" + std::to_string(k));
  fs::create_directories(dir);
  return dir;
}

std::string certificate_to_json(const LqGameSpec& spec, const ReactionMap& map,
                                const EquilibriumCertificate& cert) {
  const auto& c = cert.candidate;
  json cand;
  cand["x"] = profile_json(c.x);
  cand["w"] = c.w;
  cand["y_anticipations"] = json::array();
  for (const auto& y : c.y_anticipations) cand["y_anticipations"].push_back(vec_json(y));
  cand["weights"] = c.weights.size() ? vec_json(c.weights) : json(nullptr);
  cand["mode"] = to_string(c.mode);
  cand["tiebreak"] = to_string(c.tiebreak);
  cand["iterations"] = c.iterations;
  cand["converged"] = c.converged;

  json conds;
  conds["a"] = {{"pass", cert.cond_a.pass}, {"margin", cert.cond_a.margin}};
  conds["b"] = {{"pass", cert.cond_b.pass}, {"margin", cert.cond_b.margin}};
  conds["anticipations"] = {{"pass", cert.anticipations.pass}, {"margin", cert.anticipations.margin}};
  conds["c"] = json::array();
  for (std::size_t i = 0; i < cert.cond_c.size(); ++i) {
    const auto& lc = cert.cond_c[i];
    conds["c"].push_back({{"leader", i + 1},
                          {"pass", lc.pass},
                          {"margin", lc.margin},
                          {"witness_x", lc.witness_x ? vec_json(*lc.witness_x) : json(nullptr)}});
  }
  conds["d1"] = check_json(cert.cond_d1);
  conds["d2"] = check_json(cert.cond_d2);

  const Eigen::VectorXd y = follower_reaction(map, c.x, c.w);
  json doc;
  doc["candidate"] = cand;
  doc["conditions"] = conds;
  doc["verdict"] = to_string(cert.verdict);
  doc["reduced_outcome"] = cert.reduced_outcome;
  doc["y"] = vec_json(y);
  doc["payoffs"] = vec_json(eval_payoffs(spec, c.x, y, c.w));
  return doc.dump(2) + "\n";
}

EquilibriumCandidate candidate_from_json(const LqGameSpec& spec, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSchema, std::string("certificate: invalid JSON: ") + e.what());
  }
  const json& c = doc.contains("candidate") ? doc["candidate"] : doc;
  auto vec = [](const json& v, const std::string& path) {
    if (!v.is_array()) throw Error(ErrorKind::kSchema, path + ": expected an array");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) throw Error(ErrorKind::kSchema, path + ": expected numbers");
      out[static_cast<Eigen::Index>(k)] = v[k].get<double>();
    }
    return out;
  };
  if (!c.is_object() || !c.contains("x") || !c.contains("w")) {
    throw Error(ErrorKind::kSchema, "certificate.candidate: requires 'x' and 'w'");
  }
  EquilibriumCandidate cand;
  if (!c["x"].is_array()) throw Error(ErrorKind::kSchema, "candidate.x: expected an array of arrays");
  for (std::size_t i = 0; i < c["x"].size(); ++i) {
    cand.x.x.push_back(vec(c["x"][i], "candidate.x[" + std::to_string(i) + "]"));
  }
  check_dimensions(spec, cand.x);
  if (!c["w"].is_number()) throw Error(ErrorKind::kSchema, "candidate.w: expected a number");
  cand.w = c["w"].get<double>();
  if (c.contains("y_anticipations") && c["y_anticipations"].is_array()) {
    for (std::size_t k = 0; k < c["y_anticipations"].size(); ++k) {
      Eigen::VectorXd y = vec(c["y_anticipations"][k], "candidate.y_anticipations[" + std::to_string(k) + "]");
      if (static_cast<std::size_t>(y.size()) != spec.num_followers()) {
        throw Error(ErrorKind::kDimension, "candidate.y_anticipations: wrong dimension");
      }
      cand.y_anticipations.push_back(std::move(y));
    }
  }
  if (c.contains("weights") && c["weights"].is_array()) cand.weights = vec(c["weights"], "candidate.weights");
  if (c.contains("mode") && c["mode"].is_string()) {
    if (auto m = parse_br_mode(c["mode"].get<std::string>())) cand.mode = *m;
  }
  if (c.contains("tiebreak") && c["tiebreak"].is_string()) {
    if (auto t = parse_tiebreak(c["tiebreak"].get<std::string>())) cand.tiebreak = *t;
  }
  if (c.contains("iterations") && c["iterations"].is_number_integer()) cand.iterations = c["iterations"].get<int>();
  if (c.contains("converged") && c["converged"].is_boolean()) cand.converged = c["converged"].get<bool>();
  return cand;
}

std::string trace_csv(const LqGameSpec& spec, const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "iter" << csv_header_x(spec) << ",w,displacement\n";
  for (const auto& row : trace) {
    os << row.iter;
    for (Eigen::Index k = 0; k < row.x.size(); ++k) os << "," << format_real(row.x[k]);
    os << "," << format_real(row.w) << "," << format_real(row.displacement) << "\n";
  }
  return os.str();
}

std::string sweep_csv(const LqGameSpec& spec, const std::vector<SweepRow>& rows, bool both) {
  // Weighted sums by (lambda, regime) for the dominance column.
  std::map<std::pair<double, bool>, const SweepRow*> by_key;
  for (const auto& r : rows) by_key[{r.lambda, r.ddu}] = &r;

  std::ostringstream os;
  os << "lambda,regime" << csv_header_x(spec) << ",w";
  for (std::size_t j = 0; j < spec.num_followers(); ++j) os << ",y" << j + 1;
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) os << ",f" << i + 1;
  os << ",weighted,verdict";
  if (both) os << ",ddu_ge_diu";
  os << "\n";
  const std::size_t cols = spec.strategy_dim() + 1 + spec.num_followers() + spec.num_leaders() + 1;
  for (const auto& r : rows) {
    os << format_real(r.lambda) << "," << (r.ddu ? "ddu" : "diu");
    if (r.ok) {
      const Eigen::VectorXd flat = r.x.flatten();
      for (Eigen::Index k = 0; k < flat.size(); ++k) os << "," << format_real(flat[k]);
      os << "," << format_real(r.w);
      for (Eigen::Index j = 0; j < r.y.size(); ++j) os << "," << format_real(r.y[j]);
      for (Eigen::Index i = 0; i < r.f.size(); ++i) os << "," << format_real(r.f[i]);
      os << "," << format_real(r.weighted) << "," << to_string(r.verdict);
    } else {
      for (std::size_t k = 0; k < cols; ++k) os << ",";
      os << "error";
    }
    if (both) {
      auto d = by_key.find({r.lambda, true});
      auto u = by_key.find({r.lambda, false});
      if (d != by_key.end() && u != by_key.end() && d->second->ok && u->second->ok) {
        os << "," << (d->second->weighted >= u->second->weighted - 1e-9 ? "true" : "false");
      } else {
        os << ",na";
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string pareto_csv(const std::vector<ParetoPoint>& points, std::size_t n) {
  std::ostringstream os;
  os << "w";
  for (std::size_t i = 0; i < n; ++i) os << ",f" << i + 1;
  os << ",nondominated\n";
  for (const auto& p : points) {
    os << format_real(p.w);
    for (Eigen::Index i = 0; i < p.f.size(); ++i) os << "," << format_real(p.f[i]);
    os << "," << (p.nondominated ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string audit_json(const AuditReport& report) {
  json doc;
  doc["a1a_box"] = report.a1a_box;
  doc["a1b_graph_convex"] = sampled_json(report.a1b_graph_convex);
  doc["a1c_w_interval"] = sampled_json(report.a1c_w_interval);
  auto per_leader = [](const std::vector<SampledCheck>& v) {
    json out = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      json row = sampled_json(v[i]);
      row["leader"] = i + 1;
      out.push_back(row);
    }
    return out;
  };
  auto set_json = [](const std::vector<std::size_t>& s) {
    json out = json::array();
    for (auto i : s) out.push_back(i + 1);
    return out;
  };
  doc["a2a_quasiconcave"] = per_leader(report.a2a_quasiconcave);
  doc["a2b_concave"] = per_leader(report.a2b_concave);
  doc["a3_quasiconcave"] = per_leader(report.a3_quasiconcave);
  doc["a2b_set"] = set_json(report.a2b_set);
  doc["a3_set"] = set_json(report.a3_set);
  doc["structural_note"] = report.structural_note;
  doc["verdict"] = to_string(report.verdict);
  doc["basis"] = to_string(report.basis);
  doc["statement"] = existence_statement(report);
  doc["seed"] = report.seed;
  doc["sample_count"] = report.sample_count;
  return doc.dump(2) + "\n";
}

// --- subcommands ----------------------------------------------------------

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  Loaded in;
  Resolved r;
  LeaderProfile init;
  try {
    in = load(args.scenario);
    r = resolve(in.spec, args.common);
    in.spec.ddu_enabled = r.ddu;
    init = args.init ? parse_profile(in.spec, *args.init) : zero_profile(in.spec);
    if (in.spec.num_leaders() != 2) {
      throw Error(ErrorKind::kInvalidValue, "--lambda weighting requires exactly two leaders");
    }
  } catch (const Error& e) {
    return report_error(err, e, kExitInputError);
  }

  const LqGameSpec& spec = in.spec;
  std::filesystem::path dir;
  try {
    dir = make_run_dir(args.common.out, "solve");
  } catch (const std::exception& e) {
    return report_error(err, e, kExitInputError);
  }
  json cfg = config_json(r, args.common);
  cfg["init"] = profile_json(init);
  RunRecord run(dir, "solve", in.text, cfg);

  int code = kExitSolverFailure;
  try {
    const ReactionMap map = build_reaction_map(spec);
    const Eigen::VectorXd weights = lambda_weights(r.d.lambda);
    JacobiResult res;
    try {
      res = jacobi_solve(spec, map, weights, init, jacobi_options(r.d));
    } catch (const SolveError& e) {
      run.write("trace.csv", trace_csv(spec, e.trace()));
      run.set("error", e.what());
      run.finish(kExitSolverFailure);
      err << "error: " << e.what() << "\n";
      out << "run directory: " << dir.string() << "\n";
      return kExitSolverFailure;
    }
    const EquilibriumCertificate cert = verify_equilibrium(spec, map, res.candidate, verify_options(r.d));
    out << "regime: " << (spec.ddu_enabled ? "ddu" : "diu") << ", lambda = " << format_real(r.d.lambda)
        << ", mode = " << to_string(r.d.mode) << ", tiebreak = " << to_string(r.d.tiebreak) << "\n";
    print_certificate(out, spec, map, cert);
    run.write("certificate.json", certificate_to_json(spec, map, cert));
    run.write("trace.csv", trace_csv(spec, res.trace));

    if (args.multistart) {
      std::ostringstream csv;
      csv << "start" << csv_header_x(spec) << ",status" << csv_header_x(spec) << ",w,verdict\n";
      int idx = 0;
      for (const auto& start : corner_profiles(spec)) {
        csv << idx++;
        for (Eigen::Index k = 0; k < start.flatten().size(); ++k) csv << "," << format_real(start.flatten()[k]);
        try {
          const JacobiResult ms = jacobi_solve(spec, map, weights, start, jacobi_options(r.d));
          const auto c = verify_equilibrium(spec, map, ms.candidate, verify_options(r.d));
          csv << ",converged";
          const Eigen::VectorXd fx = ms.candidate.x.flatten();
          for (Eigen::Index k = 0; k < fx.size(); ++k) csv << "," << format_real(fx[k]);
          csv << "," << format_real(ms.candidate.w) << "," << to_string(c.verdict) << "\n";
        } catch (const Error& e) {
          csv << "," << to_string(e.kind());
          for (std::size_t k = 0; k <= spec.strategy_dim(); ++k) csv << ",";
          csv << ",\n";
        }
      }
      run.write("multistart.csv", csv.str());
      out << "multistart: " << idx << " starts written to multistart.csv\n";
    }
    code = cert.verdict == Verdict::kNotEquilibrium ? kExitSolverFailure : kExitCertified;
    run.set("verdict", to_string(cert.verdict));
  } catch (const Error& e) {
    run.set("error", e.what());
    err << "error: " << e.what() << "\n";
    code = is_input_error(e) ? kExitInputError : kExitSolverFailure;
  }
  run.finish(code);
  out << "run directory: " << dir.string() << "\n";
  return code;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  Loaded in;
  Resolved r;
  std::vector<double> lambdas;
  try {
    in = load(args.scenario);
    r = resolve(in.spec, args.common);
    in.spec.ddu_enabled = r.ddu;
    lambdas = lambda_grid(args.lambda_from, args.lambda_to, args.lambda_step);
  } catch (const Error& e) {
    return report_error(err, e, kExitInputError);
  }
  const LqGameSpec& spec = in.spec;
  std::filesystem::path dir;
  try {
    dir = make_run_dir(args.common.out, "sweep");
  } catch (const std::exception& e) {
    return report_error(err, e, kExitInputError);
  }
  json cfg = config_json(r, args.common);
  cfg["lambda_from"] = args.lambda_from;
  cfg["lambda_to"] = args.lambda_to;
  cfg["lambda_step"] = args.lambda_step;
  cfg["both"] = args.both;
  RunRecord run(dir, "sweep", in.text, cfg);

  int code = kExitCertified;
  try {
    SweepOptions opts;
    opts.jacobi = jacobi_options(r.d);
    opts.verify = verify_options(r.d);
    opts.both_regimes = args.both;
    opts.jobs = args.common.jobs;
    const auto rows = lambda_sweep(spec, lambdas, opts);
    run.write("sweep.csv", sweep_csv(spec, rows, args.both));

    std::size_t failed = 0;
    for (const auto& row : rows) {
      if (!row.ok || row.verdict == Verdict::kNotEquilibrium) ++failed;
      if (!row.ok) err << "lambda " << format_real(row.lambda) << " (" << (row.ddu ? "ddu" : "diu") << "): " << row.error << "\n";
    }
    out << "rows: " << rows.size() << ", failed or uncertified: " << failed << "\n";
    if (failed) code = kExitSolverFailure;

    if (args.common.svg) {
      std::vector<PlotSeries> payoffs, weighted;
      const char* colors[] = {"#d62728", "#1f77b4", "#ff7f0e", "#2ca02c"};
      for (bool ddu : {true, false}) {
        PlotSeries ws{std::string("weighted ") + (ddu ? "DDU" : "DIU"), ddu ? "#d62728" : "#1f77b4", {}};
        std::vector<PlotSeries> fs;
        for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
          fs.push_back({"f" + std::to_string(i + 1) + (ddu ? " DDU" : " DIU"), colors[(2 * i + (ddu ? 0 : 1)) % 4], {}});
        }
        for (const auto& row : rows) {
          if (!row.ok || row.ddu != ddu) continue;
          ws.points.emplace_back(row.lambda, row.weighted);
          for (std::size_t i = 0; i < fs.size(); ++i) fs[i].points.emplace_back(row.lambda, row.f[static_cast<Eigen::Index>(i)]);
        }
        if (!ws.points.empty()) {
          weighted.push_back(ws);
          payoffs.insert(payoffs.end(), fs.begin(), fs.end());
        }
      }
      run.write("payoffs.svg", render_svg("Leader payoffs at equilibrium", "lambda", "payoff", payoffs));
      run.write("weighted.svg", render_svg("Weighted sum of leader payoffs", "lambda", "weighted sum", weighted));
    }
  } catch (const Error& e) {
    run.set("error", e.what());
    err << "error: " << e.what() << "\n";
    code = is_input_error(e) ? kExitInputError : kExitSolverFailure;
  }
  run.finish(code);
  out << "run directory: " << dir.string() << "\n";
  return code;
}

int cmd_pareto(const ParetoArgs& args, std::ostream& out, std::ostream& err) {
  Loaded in;
  Resolved r;
  try {
    in = load(args.scenario);
    r = resolve(in.spec, args.common);
    if (args.at != "ddu" && args.at != "diu") throw Error(ErrorKind::kInvalidValue, "--at must be ddu or diu");
    if (args.grid_n < 2) throw Error(ErrorKind::kInvalidValue, "--grid must be at least 2");
    in.spec.ddu_enabled = args.at == "ddu";
  } catch (const Error& e) {
    return report_error(err, e, kExitInputError);
  }
  const LqGameSpec& spec = in.spec;
  std::filesystem::path dir;
  try {
    dir = make_run_dir(args.common.out, "pareto");
  } catch (const std::exception& e) {
    return report_error(err, e, kExitInputError);
  }
  json cfg = config_json(r, args.common);
  cfg["regime"] = args.at;
  cfg["grid_n"] = args.grid_n;
  RunRecord run(dir, "pareto", in.text, cfg);

  int code = kExitCertified;
  try {
    const ReactionMap map = build_reaction_map(spec);
    const Eigen::VectorXd weights = lambda_weights(r.d.lambda);
    const JacobiResult res = jacobi_solve(spec, map, weights, zero_profile(spec), jacobi_options(r.d));
    const auto& x = res.candidate.x;
    const auto points = pareto_front(spec, map, x, args.grid_n);
    run.write("pareto.csv", pareto_csv(points, spec.num_leaders()));

    const WorstCaseResult wc = scalarized_worst_case(spec, map, x, weights);
    std::size_t nearest = 0;
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (std::abs(points[k].w - wc.w_star) < std::abs(points[nearest].w - wc.w_star)) nearest = k;
    }
    json marker{{"w_star", wc.w_star},
                {"f", vec_json(wc.payoffs)},
                {"nearest_row", nearest},
                {"x", profile_json(x)},
                {"lambda", r.d.lambda}};
    run.write("pareto_marker.json", marker.dump(2) + "\n");
    const Interval iv = uncertainty_interval(spec, x);
    std::size_t nd = 0;
    for (const auto& p : points) nd += p.nondominated ? 1 : 0;
    out << "regime: " << args.at << ", x* = " << format_profile(x) << ", W(x*) = [" << format_real(iv.lo)
        << ", " << format_real(iv.hi) << "]\n";
    out << "points: " << points.size() << ", nondominated: " << nd << "\n";
    out << "front endpoints: f(" << format_real(points.front().w) << ") = " << format_vec(points.front().f)
        << ", f(" << format_real(points.back().w) << ") = " << format_vec(points.back().f) << "\n";
    out << "marked minimiser: w* = " << format_real(wc.w_star) << ", f = " << format_vec(wc.payoffs)
        << " (row " << nearest << ")\n";

    if (args.common.svg && spec.num_leaders() == 2) {
      PlotSeries front{std::string("front ") + (spec.ddu_enabled ? "DDU" : "DIU"), "#1f77b4", {}};
      for (const auto& p : points) front.points.emplace_back(p.f[0], p.f[1]);
      PlotSeries star{"minimiser", "#d62728", {{wc.payoffs[0], wc.payoffs[1]}}, true};
      run.write("pareto.svg", render_svg("Pareto front of the virtual player", "f1", "f2", {front, star}));
    }
  } catch (const Error& e) {
    run.set("error", e.what());
    err << "error: " << e.what() << "\n";
    code = is_input_error(e) ? kExitInputError : kExitSolverFailure;
  }
  run.finish(code);
  out << "run directory: " << dir.string() << "\n";
  return code;
}

int cmd_audit(const AuditArgs& args, std::ostream& out, std::ostream& err) {
  Loaded in;
  Resolved r;
  try {
    in = load(args.scenario);
    r = resolve(in.spec, args.common);
    in.spec.ddu_enabled = r.ddu;
    if (args.samples && *args.samples < 1) throw Error(ErrorKind::kInvalidValue, "--samples must be positive");
  } catch (const Error& e) {
    return report_error(err, e, kExitInputError);
  }
  const LqGameSpec& spec = in.spec;
  std::filesystem::path dir;
  try {
    dir = make_run_dir(args.common.out, "audit");
  } catch (const std::exception& e) {
    return report_error(err, e, kExitInputError);
  }
  const int samples = args.samples.value_or(r.d.audit_samples);
  json cfg = config_json(r, args.common);
  cfg["samples"] = samples;
  RunRecord run(dir, "audit", in.text, cfg);

  int code = kExitCertified;
  try {
    const ReactionMap map = build_reaction_map(spec);
    const double tol = args.common.tol.value_or(1e-9);
    const AuditReport report = audit_assumptions(spec, map, static_cast<std::size_t>(samples), tol, r.d.seed);
    auto pf = [](bool p) { return p ? "pass" : "FAIL"; };
    out << "strategy boxes:               " << pf(report.a1a_box) << " (structural)\n";
    out << "follower graph convex:        " << pf(report.a1b_graph_convex.pass) << " worst "
        << format_real(report.a1b_graph_convex.worst_violation) << "\n";
    out << "W(x) nonempty interval:       " << pf(report.a1c_w_interval.pass) << " worst "
        << format_real(report.a1c_w_interval.worst_violation) << "\n";
    for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
      out << "leader " << i + 1 << ": quasi-concave (x_i,y) " << pf(report.a2a_quasiconcave[i].pass)
          << ", -f concave (y,w) " << pf(report.a2b_concave[i].pass) << " worst "
          << format_real(report.a2b_concave[i].worst_violation) << ", -f quasi-concave (y,w) "
          << pf(report.a3_quasiconcave[i].pass) << "\n";
    }
    out << "note: " << report.structural_note << "\n";
    out << "verdict: " << to_string(report.verdict) << "\n";
    out << existence_statement(report) << "\n";
    run.write("audit.json", audit_json(report));
    run.set("verdict", to_string(report.verdict));
    if (report.verdict == ExistenceVerdict::kInconclusive) code = kExitSolverFailure;
  } catch (const Error& e) {
    run.set("error", e.what());
    err << "error: " << e.what() << "\n";
    code = is_input_error(e) ? kExitInputError : kExitSolverFailure;
  }
  run.finish(code);
  out << "run directory: " << dir.string() << "\n";
  return code;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  Loaded in;
  Resolved r;
  EquilibriumCandidate cand;
  try {
    in = load(args.scenario);
    r = resolve(in.spec, args.common);
    in.spec.ddu_enabled = r.ddu;
    std::ifstream cf(args.certificate, std::ios::binary);
    if (!cf) throw Error(ErrorKind::kSchema, args.certificate + ": cannot open certificate file");
    std::ostringstream buf;
    buf << cf.rdbuf();
    cand = candidate_from_json(in.spec, buf.str());
  } catch (const Error& e) {
    return report_error(err, e, kExitInputError);
  }
  const LqGameSpec& spec = in.spec;
  std::filesystem::path dir;
  try {
    dir = make_run_dir(args.common.out, "verify");
  } catch (const std::exception& e) {
    return report_error(err, e, kExitInputError);
  }
  json cfg = config_json(r, args.common);
  cfg["certificate"] = args.certificate;
  RunRecord run(dir, "verify", in.text, cfg);

  int code = kExitSolverFailure;
  try {
    const ReactionMap map = build_reaction_map(spec);
    const EquilibriumCertificate cert = verify_equilibrium(spec, map, cand, verify_options(r.d));
    print_certificate(out, spec, map, cert);
    run.write("certificate.json", certificate_to_json(spec, map, cert));
    run.set("verdict", to_string(cert.verdict));
    code = cert.verdict == Verdict::kNotEquilibrium ? kExitSolverFailure : kExitCertified;
  } catch (const Error& e) {
    run.set("error", e.what());
    err << "error: " << e.what() << "\n";
    code = is_input_error(e) ? kExitInputError : kExitSolverFailure;
  }
  run.finish(code);
  out << "run directory: " << dir.string() << "\n";
  return code;
}

int cmd_followers_check(const FollowersCheckArgs& args, std::ostream& out, std::ostream& err) {
  try {
    Loaded in = load(args.scenario);
    const Resolved r = resolve(in.spec, args.common);
    if (args.samples < 1) throw Error(ErrorKind::kInvalidValue, "--samples must be positive");
    ReactionMap map = build_reaction_map(in.spec);
    const double tol = args.common.tol.value_or(1e-9);
    const FollowerSweepResult res =
        follower_consistency_sweep(in.spec, map, static_cast<std::size_t>(args.samples), tol, r.d.seed);
    out << "theta = " << format_vec(map.theta) << "\n";
    for (Eigen::Index j = 0; j < map.A.rows(); ++j) {
      out << "y" << j + 1 << " = " << format_vec(map.A.row(j).transpose()) << " . x + "
          << format_real(map.b[j]) << " w + " << format_real(map.c0[j]) << "\n";
    }
    out << "samples = " << res.samples << ", worst margin = " << format_real(res.worst_margin) << "\n";
    out << "provenance = " << (map.provenance == Provenance::kVerified ? "verified" : "analytic") << "\n";
    return res.certified ? kExitCertified : kExitSolverFailure;
  } catch (const Error& e) {
    return report_error(err, e, is_input_error(e) ? kExitInputError : kExitSolverFailure);
  }
}

int cmd_br(const BrArgs& args, std::ostream& out, std::ostream& err) {
  try {
    Loaded in = load(args.scenario);
    const Resolved r = resolve(in.spec, args.common);
    in.spec.ddu_enabled = r.ddu;
    const LqGameSpec& spec = in.spec;
    if (args.leader < 1 || static_cast<std::size_t>(args.leader) > spec.num_leaders()) {
      throw Error(ErrorKind::kIndexOutOfRange, "--leader out of range");
    }
    const LeaderProfile x = parse_profile(spec, args.profile);
    const ReactionMap map = build_reaction_map(spec);
    const Eigen::VectorXd weights = lambda_weights(r.d.lambda);
    BrOptions opts;
    opts.mode = r.d.mode;
    opts.tiebreak = r.d.tiebreak;
    double w = 0.0;
    if (args.w) {
      w = *args.w;
    } else if (opts.mode == BrMode::kMyopic) {
      throw Error(ErrorKind::kInvalidValue, "--w is required in myopic mode");
    }
    const auto i = static_cast<std::size_t>(args.leader - 1);
    const BestResponseResult br = leader_best_response(spec, map, i, x, w, weights, opts);
    out << "mode = " << to_string(br.mode) << ", tiebreak = " << to_string(opts.tiebreak) << "\n";
    out << "x_" << args.leader << " = " << format_vec(br.x_i) << "\n";
    out << "value = " << format_real(br.value) << "\n";
    out << "w used = " << format_real(br.w_used) << "\n";
    out << "y anticipated = " << format_vec(br.y_anticipated) << "\n";
    out << "tie coordinates = {";
    for (std::size_t k = 0; k < br.tie_coordinates.size(); ++k) out << (k ? "," : "") << br.tie_coordinates[k] + 1;
    out << "}\n";
    return kExitCertified;
  } catch (const Error& e) {
    return report_error(err, e, is_input_error(e) ? kExitInputError : kExitSolverFailure);
  }
}

}  // namespace nsn::runner
