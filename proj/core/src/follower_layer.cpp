#include "nsn/follower_layer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsn/error.hpp"

namespace nsn {

namespace {

// Coefficient of v_1 once v_2 is eliminated through the equality constraint.
double free_direction(const FollowerSpec& f) { return f.e[0] - f.e[1] * f.h[0] / f.h[1]; }

void check_bounded(const FollowerSpec& f, std::size_t j) {
  if (f.h[1] == 0.0) {
    throw Error(ErrorKind::kFollowerUnbounded,
                "follower " + std::to_string(j) + " problem unbounded: h_2 = 0 leaves v_2 free");
  }
  if (free_direction(f) > 0.0) {
    std::ostringstream os;
    os << "follower " << j << " problem unbounded: v_1 coefficient " << free_direction(f) << " > 0";
    throw Error(ErrorKind::kFollowerUnbounded, os.str());
  }
}

double gamma(const LqGameSpec& spec, std::size_t j, const LeaderProfile& x) {
  double s = 0.0;
  const auto& f = spec.followers[j];
  for (std::size_t i = 0; i < spec.num_leaders(); ++i) s += f.g[i].dot(x.x[i]);
  return s;
}

}  // namespace

ReactionMap build_reaction_map(const LqGameSpec& spec) {
  const std::size_t m = spec.num_followers();
  const auto mm = static_cast<Eigen::Index>(m);
  const auto P = static_cast<Eigen::Index>(spec.strategy_dim());

  ReactionMap map;
  map.theta.resize(mm);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& f = spec.followers[j];
    check_bounded(f, j);
    map.theta[static_cast<Eigen::Index>(j)] = f.e[1] / f.h[1];
  }

  // I - T, T_{jl} = theta_j alpha_{jl}.
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(mm, mm);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      if (l == j) continue;
      system(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) -=
          map.theta[static_cast<Eigen::Index>(j)] * spec.followers[j].coupling(j, l);
    }
  }

  // Right-hand side columns: x-coefficients (-theta_j g_j), then w (theta_j).
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(mm, P + 1);
  for (std::size_t j = 0; j < m; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double th = map.theta[jj];
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < spec.num_leaders(); ++i) {
      const auto& g = spec.followers[j].g[i];
      rhs.block(jj, off, 1, g.size()) = -th * g.transpose();
      off += g.size();
    }
    rhs(jj, P) = th;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::kFollowerIndeterminate,
                "follower equilibrium indeterminate: I - T is singular");
  }
  const Eigen::MatrixXd sol = lu.solve(rhs);
  map.A = sol.leftCols(P);
  map.b = sol.col(P);
  map.c0 = Eigen::VectorXd::Zero(mm);
  map.provenance = Provenance::kAnalytic;
  return map;
}

Eigen::VectorXd follower_reaction(const ReactionMap& map, const LeaderProfile& x, double w) {
  const Eigen::VectorXd flat = x.flatten();
  if (flat.size() != map.A.cols()) {
    throw Error(ErrorKind::kDimension, "follower_reaction: profile dimension does not match map");
  }
  return map.A * flat + map.b * w + map.c0;
}

double follower_best_value(const LqGameSpec& spec, std::size_t j, const LeaderProfile& x,
                           double w, const Eigen::VectorXd& y) {
  const auto& f = spec.followers.at(j);
  check_bounded(f, j);
  double rhs = w - gamma(spec, j, x);
  for (std::size_t l = 0; l < spec.num_followers(); ++l) {
    if (l != j) rhs += f.coupling(j, l) * y[static_cast<Eigen::Index>(l)];
  }
  // v_1 = 0, v_2 = rhs / h_2.
  return f.e[1] * rhs / f.h[1];
}

double FollowerMargins::worst() const {
  return margin.empty() ? 0.0 : *std::max_element(margin.begin(), margin.end());
}

FollowerMargins verify_follower_gne(const LqGameSpec& spec, const LeaderProfile& x, double w,
                                    const Eigen::VectorXd& y, double tol) {
  check_dimensions(spec, x);
  if (static_cast<std::size_t>(y.size()) != spec.num_followers()) {
    throw Error(ErrorKind::kDimension, "verify_follower_gne: y has wrong dimension");
  }
  FollowerMargins out;
  for (std::size_t j = 0; j < spec.num_followers(); ++j) {
    const double best = follower_best_value(spec, j, x, w, y);
    out.margin.push_back(std::abs(y[static_cast<Eigen::Index>(j)] - best));
  }
  out.certified = out.worst() <= tol;
  return out;
}

FollowerSweepResult follower_consistency_sweep(const LqGameSpec& spec, ReactionMap& map,
                                               std::size_t samples, double tol,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FollowerSweepResult out;
  for (std::size_t s = 0; s < samples; ++s) {
    LeaderProfile x;
    for (const auto& l : spec.leaders) {
      Eigen::VectorXd xi(l.box_lo.size());
      for (Eigen::Index k = 0; k < xi.size(); ++k) {
        xi[k] = l.box_lo[k] + unit(rng) * (l.box_hi[k] - l.box_lo[k]);
      }
      x.x.push_back(std::move(xi));
    }
    const double w = spec.w_base_lo + unit(rng) * (spec.w_base_hi - spec.w_base_lo);
    const Eigen::VectorXd y = follower_reaction(map, x, w);
    out.worst_margin = std::max(out.worst_margin, verify_follower_gne(spec, x, w, y, tol).worst());
    ++out.samples;
  }
  out.certified = out.worst_margin <= tol;
  if (out.certified) map.provenance = Provenance::kVerified;
  return out;
}

}  // namespace nsn
