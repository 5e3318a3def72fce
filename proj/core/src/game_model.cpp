#include "nsn/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nsn/error.hpp"

namespace nsn {

namespace {

using json = nlohmann::json;

constexpr double kEmptyIntervalTol = 1e-12;
constexpr double kFeasibilityTol = 1e-12;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kSchema, path + ": " + what);
}

[[noreturn]] void dimension_error(const std::string& path, std::size_t want, std::size_t got) {
  std::ostringstream os;
  os << path << ": dimension mismatch, expected " << want << " entries, got " << got;
  throw Error(ErrorKind::kDimension, os.str());
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing required field");
  return *it;
}

double read_real(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) schema_error(path, "expected a finite number");
  return x;
}

Eigen::VectorXd read_vector(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = read_real(v[k], path + "[" + std::to_string(k) + "]");
  }
  return out;
}

void expect_dim(const Eigen::VectorXd& v, std::size_t want, const std::string& path) {
  if (static_cast<std::size_t>(v.size()) != want) {
    dimension_error(path, want, static_cast<std::size_t>(v.size()));
  }
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

void read_solver_defaults(const json& doc, SolverDefaults& d) {
  auto it = doc.find("solver");
  if (it == doc.end()) return;
  const json& s = *it;
  if (!s.is_object()) schema_error("solver", "expected an object");
  if (s.contains("lambda")) d.lambda = read_real(s["lambda"], "solver.lambda");
  if (s.contains("mode")) {
    if (!s["mode"].is_string()) schema_error("solver.mode", "expected a string");
    auto mode = parse_br_mode(s["mode"].get<std::string>());
    if (!mode) schema_error("solver.mode", "expected 'myopic' or 'anticipating'");
    d.mode = *mode;
  }
  if (s.contains("tiebreak")) {
    if (!s["tiebreak"].is_string()) schema_error("solver.tiebreak", "expected a string");
    auto tb = parse_tiebreak(s["tiebreak"].get<std::string>());
    if (!tb) schema_error("solver.tiebreak", "expected lex-low, prefer-restrict or prefer-relax");
    d.tiebreak = *tb;
  }
  auto read_int = [&](const char* key, int& out) {
    if (!s.contains(key)) return;
    if (!s[key].is_number_integer()) schema_error(std::string("solver.") + key, "expected an integer");
    out = s[key].get<int>();
  };
  read_int("max_iter", d.max_iter);
  read_int("grid_x", d.grid_x);
  read_int("grid_w", d.grid_w);
  read_int("audit_samples", d.audit_samples);
  if (s.contains("conv_tol")) d.conv_tol = read_real(s["conv_tol"], "solver.conv_tol");
  if (s.contains("tol")) d.tol = read_real(s["tol"], "solver.tol");
  if (s.contains("seed")) {
    if (!s["seed"].is_number_unsigned()) schema_error("solver.seed", "expected a non-negative integer");
    d.seed = s["seed"].get<std::uint64_t>();
  }
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kInvalidValue: return "invalid_value";
    case ErrorKind::kIndexOutOfRange: return "index_out_of_range";
    case ErrorKind::kEmptyUncertaintySet: return "empty_uncertainty_set";
    case ErrorKind::kInfeasibleProfile: return "infeasible_profile";
    case ErrorKind::kFollowerIndeterminate: return "follower_indeterminate";
    case ErrorKind::kFollowerUnbounded: return "follower_unbounded";
    case ErrorKind::kNoConvergence: return "no_convergence";
    case ErrorKind::kCycling: return "cycling";
  }
  return "unknown";
}

const char* to_string(BrMode mode) {
  return mode == BrMode::kMyopic ? "myopic" : "anticipating";
}

const char* to_string(TieBreak tiebreak) {
  switch (tiebreak) {
    case TieBreak::kLexLow: return "lex-low";
    case TieBreak::kPreferRestrict: return "prefer-restrict";
    case TieBreak::kPreferRelax: return "prefer-relax";
  }
  return "lex-low";
}

std::optional<BrMode> parse_br_mode(std::string_view text) {
  if (text == "myopic") return BrMode::kMyopic;
  if (text == "anticipating") return BrMode::kAnticipating;
  return std::nullopt;
}

std::optional<TieBreak> parse_tiebreak(std::string_view text) {
  if (text == "lex-low") return TieBreak::kLexLow;
  if (text == "prefer-restrict") return TieBreak::kPreferRestrict;
  if (text == "prefer-relax") return TieBreak::kPreferRelax;
  return std::nullopt;
}

double FollowerSpec::coupling(std::size_t self, std::size_t other) const {
  if (other == self) return 0.0;
  const std::size_t k = other < self ? other : other - 1;
  return alpha[static_cast<Eigen::Index>(k)];
}

std::size_t LqGameSpec::strategy_dim() const {
  std::size_t total = 0;
  for (const auto& l : leaders) total += l.dim();
  return total;
}

std::size_t LqGameSpec::offset(std::size_t i) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < i; ++k) off += leaders[k].dim();
  return off;
}

void validate(const LqGameSpec& spec) {
  const std::size_t n = spec.num_leaders();
  const std::size_t m = spec.num_followers();
  if (n == 0) schema_error("leaders", "at least one leader is required");
  if (m == 0) schema_error("followers", "at least one follower is required");
  if (!(spec.w_base_lo <= spec.w_base_hi)) {
    throw Error(ErrorKind::kInvalidValue, "uncertainty: lo must not exceed hi");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = spec.leaders[i];
    const std::string path = "leaders[" + std::to_string(i) + "]";
    const std::size_t p = l.dim();
    if (p == 0) schema_error(path + ".box_lo", "leader strategy must have at least one coordinate");
    expect_dim(l.box_hi, p, path + ".box_hi");
    expect_dim(l.a, p, path + ".a");
    expect_dim(l.b, m, path + ".b");
    expect_dim(l.sigma, p, path + ".sigma");
    for (std::size_t k = 0; k < p; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      if (!(l.box_lo[kk] <= l.box_hi[kk])) {
        throw Error(ErrorKind::kInvalidValue,
                    path + ".box_lo[" + std::to_string(k) + "]: box_lo exceeds box_hi");
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto& f = spec.followers[j];
    const std::string path = "followers[" + std::to_string(j) + "]";
    if (f.g.size() != n) dimension_error(path + ".g", n, f.g.size());
    for (std::size_t i = 0; i < n; ++i) {
      expect_dim(f.g[i], spec.leaders[i].dim(), path + ".g[" + std::to_string(i) + "]");
    }
    expect_dim(f.alpha, m - 1, path + ".alpha");
  }
}

LqGameSpec load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSchema, std::string("document: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("document", "expected a JSON object");

  LqGameSpec spec;
  const json& leaders = require(doc, "leaders", "document");
  if (!leaders.is_array()) schema_error("leaders", "expected an array");
  for (std::size_t i = 0; i < leaders.size(); ++i) {
    const std::string path = "leaders[" + std::to_string(i) + "]";
    const json& l = leaders[i];
    LeaderSpec ls;
    ls.box_lo = read_vector(require(l, "box_lo", path), path + ".box_lo");
    ls.box_hi = read_vector(require(l, "box_hi", path), path + ".box_hi");
    ls.a = read_vector(require(l, "a", path), path + ".a");
    ls.b = read_vector(require(l, "b", path), path + ".b");
    ls.c = read_real(require(l, "c", path), path + ".c");
    ls.d = read_real(require(l, "d", path), path + ".d");
    ls.sigma = read_vector(require(l, "sigma", path), path + ".sigma");
    spec.leaders.push_back(std::move(ls));
  }

  const json& followers = require(doc, "followers", "document");
  if (!followers.is_array()) schema_error("followers", "expected an array");
  for (std::size_t j = 0; j < followers.size(); ++j) {
    const std::string path = "followers[" + std::to_string(j) + "]";
    const json& f = followers[j];
    FollowerSpec fs;
    Eigen::VectorXd e = read_vector(require(f, "e", path), path + ".e");
    Eigen::VectorXd h = read_vector(require(f, "h", path), path + ".h");
    expect_dim(e, 2, path + ".e");
    expect_dim(h, 2, path + ".h");
    fs.e = e;
    fs.h = h;
    const json& g = require(f, "g", path);
    if (!g.is_array()) schema_error(path + ".g", "expected an array of arrays, one per leader");
    for (std::size_t i = 0; i < g.size(); ++i) {
      fs.g.push_back(read_vector(g[i], path + ".g[" + std::to_string(i) + "]"));
    }
    fs.alpha = read_vector(require(f, "alpha", path), path + ".alpha");
    spec.followers.push_back(std::move(fs));
  }

  const json& unc = require(doc, "uncertainty", "document");
  spec.w_base_lo = read_real(require(unc, "lo", "uncertainty"), "uncertainty.lo");
  spec.w_base_hi = read_real(require(unc, "hi", "uncertainty"), "uncertainty.hi");
  if (unc.contains("ddu_enabled")) {
    if (!unc["ddu_enabled"].is_boolean()) schema_error("uncertainty.ddu_enabled", "expected a boolean");
    spec.ddu_enabled = unc["ddu_enabled"].get<bool>();
  }
  read_solver_defaults(doc, spec.defaults);

  validate(spec);
  return spec;
}

LqGameSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kSchema, path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string dump_scenario(const LqGameSpec& spec) {
  json doc;
  doc["leaders"] = json::array();
  for (const auto& l : spec.leaders) {
    doc["leaders"].push_back({{"box_lo", to_json(l.box_lo)},
                              {"box_hi", to_json(l.box_hi)},
                              {"a", to_json(l.a)},
                              {"b", to_json(l.b)},
                              {"c", l.c},
                              {"d", l.d},
                              {"sigma", to_json(l.sigma)}});
  }
  doc["followers"] = json::array();
  for (const auto& f : spec.followers) {
    json g = json::array();
    for (const auto& gi : f.g) g.push_back(to_json(gi));
    doc["followers"].push_back({{"e", to_json(f.e)},
                                {"h", to_json(f.h)},
                                {"g", g},
                                {"alpha", to_json(f.alpha)}});
  }
  doc["uncertainty"] = {{"lo", spec.w_base_lo}, {"hi", spec.w_base_hi}, {"ddu_enabled", spec.ddu_enabled}};
  const auto& d = spec.defaults;
  doc["solver"] = {{"lambda", d.lambda},     {"mode", to_string(d.mode)},
                   {"tiebreak", to_string(d.tiebreak)},
                   {"max_iter", d.max_iter}, {"conv_tol", d.conv_tol},
                   {"grid_x", d.grid_x},     {"grid_w", d.grid_w},
                   {"tol", d.tol},           {"seed", d.seed},
                   {"audit_samples", d.audit_samples}};
  return doc.dump(2);
}

Eigen::VectorXd LeaderProfile::flatten() const {
  Eigen::Index total = 0;
  for (const auto& xi : x) total += xi.size();
  Eigen::VectorXd out(total);
  Eigen::Index off = 0;
  for (const auto& xi : x) {
    out.segment(off, xi.size()) = xi;
    off += xi.size();
  }
  return out;
}

LeaderProfile LeaderProfile::unflatten(const LqGameSpec& spec, const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != spec.strategy_dim()) {
    dimension_error("profile", spec.strategy_dim(), static_cast<std::size_t>(flat.size()));
  }
  LeaderProfile out;
  Eigen::Index off = 0;
  for (const auto& l : spec.leaders) {
    const auto p = static_cast<Eigen::Index>(l.dim());
    out.x.push_back(flat.segment(off, p));
    off += p;
  }
  return out;
}

LeaderProfile LeaderProfile::with(std::size_t i, const Eigen::VectorXd& x_i) const {
  LeaderProfile out = *this;
  out.x.at(i) = x_i;
  return out;
}

LeaderProfile zero_profile(const LqGameSpec& spec) {
  LeaderProfile out;
  for (const auto& l : spec.leaders) out.x.push_back(Eigen::VectorXd::Zero(l.box_lo.size()));
  return out;
}

std::vector<LeaderProfile> corner_profiles(const LqGameSpec& spec) {
  const std::size_t total = spec.strategy_dim();
  if (total >= 24) throw Error(ErrorKind::kInvalidValue, "corner lattice too large to enumerate");
  Eigen::VectorXd lo(static_cast<Eigen::Index>(total)), hi(static_cast<Eigen::Index>(total));
  Eigen::Index off = 0;
  for (const auto& l : spec.leaders) {
    lo.segment(off, l.box_lo.size()) = l.box_lo;
    hi.segment(off, l.box_hi.size()) = l.box_hi;
    off += l.box_lo.size();
  }
  std::vector<LeaderProfile> out;
  const std::size_t count = std::size_t{1} << total;
  for (std::size_t mask = 0; mask < count; ++mask) {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(total));
    for (std::size_t k = 0; k < total; ++k) {
      const bool high = (mask >> (total - 1 - k)) & 1U;
      const auto kk = static_cast<Eigen::Index>(k);
      flat[kk] = high ? hi[kk] : lo[kk];
    }
    out.push_back(LeaderProfile::unflatten(spec, flat));
  }
  return out;
}

void check_dimensions(const LqGameSpec& spec, const LeaderProfile& x) {
  if (x.x.size() != spec.num_leaders()) dimension_error("profile", spec.num_leaders(), x.x.size());
  for (std::size_t i = 0; i < x.x.size(); ++i) {
    if (static_cast<std::size_t>(x.x[i].size()) != spec.leaders[i].dim()) {
      dimension_error("profile[" + std::to_string(i) + "]", spec.leaders[i].dim(),
                      static_cast<std::size_t>(x.x[i].size()));
    }
  }
}

double eval_payoff(const LqGameSpec& spec, std::size_t i, const LeaderProfile& x,
                   const Eigen::VectorXd& y, double w) {
  if (i >= spec.num_leaders()) {
    throw Error(ErrorKind::kIndexOutOfRange, "leader index " + std::to_string(i) + " out of range");
  }
  const auto& l = spec.leaders[i];
  if (static_cast<std::size_t>(x.x.at(i).size()) != l.dim()) {
    dimension_error("x[" + std::to_string(i) + "]", l.dim(), static_cast<std::size_t>(x.x[i].size()));
  }
  if (static_cast<std::size_t>(y.size()) != spec.num_followers()) {
    dimension_error("y", spec.num_followers(), static_cast<std::size_t>(y.size()));
  }
  const double gap = l.d - w;
  return l.a.dot(x.x[i]) + l.b.dot(y) + l.c * gap * gap;
}

Eigen::VectorXd eval_payoffs(const LqGameSpec& spec, const LeaderProfile& x,
                             const Eigen::VectorXd& y, double w) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(spec.num_leaders()));
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
    out[static_cast<Eigen::Index>(i)] = eval_payoff(spec, i, x, y, w);
  }
  return out;
}

double Interval::violation(double w) const {
  if (w < lo) return lo - w;
  if (w > hi) return w - hi;
  return 0.0;
}

double restriction(const LqGameSpec& spec, const LeaderProfile& x) {
  double r = 0.0;
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) r += spec.leaders[i].sigma.dot(x.x.at(i));
  return r;
}

Interval uncertainty_interval(const LqGameSpec& spec, const LeaderProfile& x) {
  check_dimensions(spec, x);
  if (!spec.ddu_enabled) return {spec.w_base_lo, spec.w_base_hi};
  const double r = restriction(spec, x);
  Interval out{spec.w_base_lo + r, spec.w_base_hi - r};
  if (out.lo > out.hi + kEmptyIntervalTol) {
    std::ostringstream os;
    os << "uncertainty set W(x) is empty: lo=" << out.lo << " > hi=" << out.hi;
    throw Error(ErrorKind::kEmptyUncertaintySet, os.str());
  }
  if (out.lo > out.hi) out.lo = out.hi = 0.5 * (out.lo + out.hi);
  return out;
}

bool FeasibilityReport::all_feasible() const {
  return std::all_of(leaders.begin(), leaders.end(), [](const auto& l) { return l.feasible; });
}

double FeasibilityReport::worst_violation() const {
  double worst = 0.0;
  for (const auto& l : leaders) worst = std::max(worst, l.violation);
  return worst;
}

FeasibilityReport check_profile_feasible(const LqGameSpec& spec, const LeaderProfile& x) {
  check_dimensions(spec, x);
  FeasibilityReport report;
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
    const auto& l = spec.leaders[i];
    double worst = 0.0;
    for (Eigen::Index k = 0; k < l.box_lo.size(); ++k) {
      const double v = x.x[i][k];
      worst = std::max({worst, l.box_lo[k] - v, v - l.box_hi[k]});
    }
    report.leaders.push_back({worst <= kFeasibilityTol, worst});
  }
  return report;
}

}  // namespace nsn
