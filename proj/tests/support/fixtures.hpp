#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "nsn/game_model.hpp"

#ifndef NSN_SCENARIO_DIR
#error "NSN_SCENARIO_DIR must point at the bundled scenarios"
#endif

namespace nsn::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(NSN_SCENARIO_DIR) + "/" + name;
}

// The bundled two-leader, two-follower reference scenario.
inline LqGameSpec reference_spec() { return load_scenario_file(scenario_path("paper_sec5.json")); }

inline LeaderProfile profile2(double x11, double x12, double x21, double x22) {
  LeaderProfile x;
  x.x.push_back(Eigen::Vector2d(x11, x12));
  x.x.push_back(Eigen::Vector2d(x21, x22));
  return x;
}

struct RandomSpecOptions {
  int max_leaders = 3;
  int max_followers = 3;
  int max_dim = 3;
  double c_lo = 0.0;  // leader curvature range
  double c_hi = 1.0;
  bool allow_zero_c = true;
};

// Random linear-quadratic specs whose follower LPs are bounded and whose
// follower coupling system is well conditioned (spectral radius of T < 1).
class SpecGenerator {
 public:
  explicit SpecGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  LqGameSpec spec(const RandomSpecOptions& o = {}) {
    LqGameSpec s;
    const int n = integer(1, o.max_leaders);
    const int m = integer(1, o.max_followers);
    for (int i = 0; i < n; ++i) {
      const int p = integer(1, o.max_dim);
      LeaderSpec l;
      l.box_lo = vec(p, -1.0, 0.0);
      l.box_hi = l.box_lo + vec(p, 0.5, 1.5);
      l.a = vec(p, -2.0, 2.0);
      l.b = vec(m, -2.0, 2.0);
      l.c = (o.allow_zero_c && integer(0, 9) == 0) ? 0.0 : uniform(o.c_lo, o.c_hi);
      l.d = uniform(-3.0, 3.0);
      l.sigma = vec(p, 0.0, 0.2);
      s.leaders.push_back(l);
    }
    for (int j = 0; j < m; ++j) {
      FollowerSpec f;
      f.h = Eigen::Vector2d(uniform(-2.0, 2.0), uniform(0.5, 2.0) * (integer(0, 1) ? 1.0 : -1.0));
      const double theta = uniform(-1.5, 1.5);
      f.e[1] = theta * f.h[1];
      // Slope of the v1 direction e1 - e2 h1 / h2 must be <= 0.
      f.e[0] = f.e[1] * f.h[0] / f.h[1] - uniform(0.0, 1.0);
      for (int i = 0; i < n; ++i) f.g.push_back(vec(static_cast<int>(s.leaders[i].dim()), -1.0, 1.0));
      f.alpha = vec(m - 1, -0.3, 0.3);
      s.followers.push_back(f);
    }
    s.w_base_lo = uniform(-6.0, -4.0);
    s.w_base_hi = uniform(4.0, 6.0);
    s.ddu_enabled = integer(0, 3) != 0;
    validate(s);
    return s;
  }

  LeaderProfile profile(const LqGameSpec& s) {
    LeaderProfile x;
    for (const auto& l : s.leaders) {
      Eigen::VectorXd xi(l.box_lo.size());
      for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = uniform(l.box_lo[k], l.box_hi[k]);
      x.x.push_back(xi);
    }
    return x;
  }

  Eigen::VectorXd weights(std::size_t n, double floor = 0.0) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = uniform(floor, 1.0);
    return v / v.sum();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  Eigen::VectorXd vec(int size, double lo, double hi) {
    Eigen::VectorXd v(size);
    for (int k = 0; k < size; ++k) v[k] = uniform(lo, hi);
    return v;
  }

  std::mt19937_64 rng_;
};

}  // namespace nsn::testing
