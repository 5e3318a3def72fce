#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "nsn/error.hpp"
#include "nsn/follower_layer.hpp"

namespace nsn {
namespace {

using testing::profile2;
using testing::reference_spec;
using testing::follower_lp_oracle;

TEST(ReactionMap, ReferenceCoefficientsExact) {
  const LqGameSpec s = reference_spec();
  const ReactionMap map = build_reaction_map(s);
  Eigen::MatrixXd A(2, 4);
  A << 2, 0, 2, 0, 2, 0, 2, 0;
  EXPECT_EQ(map.A, A);
  EXPECT_EQ(map.b, Eigen::Vector2d(-2, -2));
  EXPECT_EQ(map.c0, Eigen::Vector2d(0, 0));
  EXPECT_EQ(map.theta, Eigen::Vector2d(2, 2));
  EXPECT_EQ(map.provenance, Provenance::kAnalytic);
}

TEST(ReactionMap, DecoupledFollowers) {
  LqGameSpec s = reference_spec();
  for (auto& f : s.followers) f.alpha[0] = 0.0;
  const ReactionMap map = build_reaction_map(s);
  const auto x = profile2(0.3, 0.9, 0.6, 0.1);
  const double w = 1.7;
  const Eigen::VectorXd y = follower_reaction(map, x, w);
  for (Eigen::Index j = 0; j < 2; ++j) EXPECT_NEAR(y[j], 2 * (w - 0.3 - 0.6), 1e-12);
}

TEST(ReactionMap, SingularCouplingIsIndeterminate) {
  LqGameSpec s = reference_spec();
  for (auto& f : s.followers) f.e = Eigen::Vector2d(0.5, 1.0);  // theta = 1
  try {
    (void)build_reaction_map(s);
    FAIL() << "expected an indeterminate error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFollowerIndeterminate);
  }
}

TEST(ReactionMap, UnboundedInnerProblem) {
  LqGameSpec s = reference_spec();
  s.followers[1].e = Eigen::Vector2d(5.0, 2.0);  // 5 - 2 * 2 / 1 > 0
  try {
    (void)build_reaction_map(s);
    FAIL() << "expected an unbounded error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFollowerUnbounded);
  }
  s = reference_spec();
  s.followers[0].h = Eigen::Vector2d(2.0, 0.0);
  EXPECT_THROW((void)build_reaction_map(s), Error);
}

TEST(FollowerReaction, ReferencePoints) {
  const LqGameSpec s = reference_spec();
  const ReactionMap map = build_reaction_map(s);
  EXPECT_TRUE(follower_reaction(map, profile2(0, 0, 1, 0), 2.8).isApprox(Eigen::Vector2d(-3.6, -3.6), 1e-12));
  EXPECT_EQ(follower_reaction(map, profile2(0, 0, 1, 1), 2.0), Eigen::Vector2d(-2, -2));
  EXPECT_NEAR(follower_reaction(map, profile2(0.25, 0.7, 0.5, 0.2), 0.75).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(FollowerGne, MarginsAtReferencePoint) {
  const LqGameSpec s = reference_spec();
  const ReactionMap map = build_reaction_map(s);
  const auto x = profile2(0, 0, 1, 1);
  FollowerMargins m = verify_follower_gne(s, x, 2.0, Eigen::Vector2d::Zero(), 1e-9);
  ASSERT_EQ(m.margin.size(), 2u);
  EXPECT_NEAR(m.margin[0], 2.0, 1e-12);
  EXPECT_NEAR(m.margin[1], 2.0, 1e-12);
  EXPECT_FALSE(m.certified);
  m = verify_follower_gne(s, x, 2.0, follower_reaction(map, x, 2.0), 1e-9);
  EXPECT_TRUE(m.certified);
  EXPECT_EQ(m.worst(), 0.0);
}

TEST(FollowerGne, ConsistencySweepUpgradesProvenance) {
  const LqGameSpec s = reference_spec();
  ReactionMap map = build_reaction_map(s);
  const FollowerSweepResult r = follower_consistency_sweep(s, map, 1000, 1e-9, 42);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.samples, 1000u);
  EXPECT_LE(r.worst_margin, 1e-9);
  EXPECT_EQ(map.provenance, Provenance::kVerified);
}

TEST(FollowerGne, MapAgreesWithLpOracleOnRandomSpecs) {
  testing::SpecGenerator gen(2024);
  for (int t = 0; t < 60; ++t) {
    const LqGameSpec s = gen.spec();
    const ReactionMap map = build_reaction_map(s);
    for (int k = 0; k < 5; ++k) {
      const LeaderProfile x = gen.profile(s);
      const double w = gen.uniform(s.w_base_lo, s.w_base_hi);
      const Eigen::VectorXd y = follower_reaction(map, x, w);
      EXPECT_TRUE(verify_follower_gne(s, x, w, y, 1e-9).certified);
      for (std::size_t j = 0; j < s.num_followers(); ++j) {
        const double oracle = follower_lp_oracle(s, j, x, w, y);
        EXPECT_NEAR(y[static_cast<Eigen::Index>(j)], oracle, 1e-9);
        EXPECT_NEAR(follower_best_value(s, j, x, w, y), oracle, 1e-9);
      }
    }
  }
}

TEST(ReactionMap, GraphIsConvexAndShiftIsLinear) {
  testing::SpecGenerator gen(5);
  for (int t = 0; t < 40; ++t) {
    const LqGameSpec s = gen.spec();
    const ReactionMap map = build_reaction_map(s);
    const LeaderProfile x1 = gen.profile(s), x2 = gen.profile(s);
    const double w1 = gen.uniform(-3, 3), w2 = gen.uniform(-3, 3), g = gen.uniform(0, 1);
    const LeaderProfile xm = LeaderProfile::unflatten(s, g * x1.flatten() + (1 - g) * x2.flatten());
    const Eigen::VectorXd ym = follower_reaction(map, xm, g * w1 + (1 - g) * w2);
    const Eigen::VectorXd yc = g * follower_reaction(map, x1, w1) + (1 - g) * follower_reaction(map, x2, w2);
    EXPECT_LE((ym - yc).lpNorm<Eigen::Infinity>(), 1e-9);
    const double delta = gen.uniform(-1, 1);
    const Eigen::VectorXd shift = follower_reaction(map, x1, w1 + delta) - follower_reaction(map, x1, w1);
    EXPECT_LE((shift - map.b * delta).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

}  // namespace
}  // namespace nsn
