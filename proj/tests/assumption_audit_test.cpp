#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "nsn/assumption_audit.hpp"

namespace nsn {
namespace {

using testing::reference_spec;

AuditReport audit(const LqGameSpec& s, std::size_t samples = 10000, std::uint64_t seed = 42) {
  return audit_assumptions(s, build_reaction_map(s), samples, 1e-9, seed);
}

TEST(Audit, ReferenceSpecStrongExists) {
  const AuditReport r = audit(reference_spec());
  EXPECT_TRUE(r.a1a_box);
  EXPECT_TRUE(r.a1b_graph_convex.pass);
  EXPECT_TRUE(r.a1c_w_interval.pass);
  EXPECT_EQ(r.a2b_set, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.a3_set, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.verdict, ExistenceVerdict::kStrongExists);
  EXPECT_EQ(r.basis, ExistenceBasis::kStrongAllConcave);
  EXPECT_EQ(r.a1b_graph_convex.samples, 10000u);
  EXPECT_EQ(existence_statement(r).rfind("strong_exists:", 0), 0u);
  EXPECT_FALSE(r.structural_note.empty());
}

TEST(Audit, NegativeCurvatureLeaderDropsOut) {
  LqGameSpec s = reference_spec();
  s.leaders[0].c = -0.2;
  const AuditReport r = audit(s);
  EXPECT_EQ(r.a2b_set, std::vector<std::size_t>{1});
  EXPECT_FALSE(r.a2b_concave[0].pass);
  EXPECT_GT(r.a2b_concave[0].worst_violation, 1e-9);
  EXPECT_EQ(r.verdict, ExistenceVerdict::kWeakExists);
  EXPECT_EQ(r.basis, ExistenceBasis::kWeakSomeConcave);
  const std::string text = existence_statement(r);
  EXPECT_EQ(text.rfind("weak_exists:", 0), 0u);
  EXPECT_NE(text.find("{2}"), std::string::npos) << text;
}

TEST(Audit, ConstantPayoffsPassTrivially) {
  LqGameSpec s = reference_spec();
  for (auto& l : s.leaders) {
    l.a.setZero();
    l.b.setZero();
    l.c = 0.0;
  }
  const AuditReport r = audit(s, 2000);
  EXPECT_EQ(r.verdict, ExistenceVerdict::kStrongExists);
  for (const auto& c : r.a2a_quasiconcave) EXPECT_EQ(c.worst_violation, 0.0);
}

TEST(Audit, OverRestrictingSigmaFailsIntervalCheck) {
  LqGameSpec s = reference_spec();
  s.leaders[0].sigma = Eigen::Vector2d(0, 3);
  const AuditReport r = audit(s, 500);
  EXPECT_FALSE(r.a1c_w_interval.pass);
  EXPECT_EQ(r.verdict, ExistenceVerdict::kInconclusive);
  EXPECT_EQ(existence_statement(r).rfind("inconclusive:", 0), 0u);
}

TEST(Audit, StatementsForEachBasis) {
  AuditReport r;
  r.basis = ExistenceBasis::kWeakSomeQuasiConcave;
  r.verdict = ExistenceVerdict::kWeakExists;
  r.a3_set = {0};
  const std::string text = existence_statement(r);
  EXPECT_EQ(text.rfind("weak_exists:", 0), 0u);
  EXPECT_NE(text.find("quasi-concave in (y, w)"), std::string::npos);
  EXPECT_NE(text.find("{1}"), std::string::npos);
}

TEST(Audit, ConcavityMembershipMatchesCurvatureSign) {
  testing::SpecGenerator gen(1234);
  testing::RandomSpecOptions o;
  o.c_lo = -1.0;
  o.c_hi = 1.0;
  for (int t = 0; t < 100; ++t) {
    LqGameSpec s = gen.spec(o);
    for (auto& l : s.leaders) {
      if (l.c != 0.0 && std::abs(l.c) < 0.05) l.c = l.c < 0 ? -0.05 : 0.05;
    }
    const AuditReport r = audit(s, 1000, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < s.num_leaders(); ++i) {
      EXPECT_EQ(r.a2b_concave[i].pass, s.leaders[i].c >= 0.0) << t << " leader " << i << " c=" << s.leaders[i].c;
      if (r.a2b_concave[i].pass) {
        EXPECT_TRUE(r.a3_quasiconcave[i].pass);
      }
    }
  }
}

TEST(Audit, DeterministicGivenSeed) {
  LqGameSpec s = reference_spec();
  s.leaders[1].c = -0.5;
  const AuditReport a = audit(s, 3000, 9), b = audit(s, 3000, 9);
  EXPECT_EQ(a.a2b_concave[1].worst_violation, b.a2b_concave[1].worst_violation);
  EXPECT_EQ(a.a3_quasiconcave[1].worst_violation, b.a3_quasiconcave[1].worst_violation);
  EXPECT_EQ(a.a1b_graph_convex.worst_violation, b.a1b_graph_convex.worst_violation);
}

}  // namespace
}  // namespace nsn
