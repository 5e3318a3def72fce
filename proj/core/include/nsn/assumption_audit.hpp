#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nsn/follower_layer.hpp"
#include "nsn/game_model.hpp"

namespace nsn {

struct SampledCheck {
  bool pass = true;
  double worst_violation = 0.0;
  std::size_t samples = 0;
};

enum class ExistenceVerdict { kStrongExists, kWeakExists, kInconclusive };

// Which existence result the verdict instantiates.
enum class ExistenceBasis {
  kNone,
  kStrongAllConcave,       // -f_i concave in (y, w) for every leader
  kWeakSomeConcave,        // -f_i concave in (y, w) for a nonempty subset
  kWeakSomeQuasiConcave,   // only the relaxed quasi-concavity holds for a nonempty subset
};

const char* to_string(ExistenceVerdict v);
const char* to_string(ExistenceBasis b);

struct AuditReport {
  // Boxes are nonempty, compact and convex by construction.
  bool a1a_box = true;
  SampledCheck a1b_graph_convex;
  SampledCheck a1c_w_interval;
  std::vector<SampledCheck> a2a_quasiconcave;  // per leader, in (x_i, y)
  std::vector<SampledCheck> a2b_concave;       // per leader, -f_i in (y, w)
  std::vector<SampledCheck> a3_quasiconcave;   // per leader, -f_i in (y, w)
  std::vector<std::size_t> a2b_set;            // 0-based leader indices
  std::vector<std::size_t> a3_set;
  // Continuity of X_i, G and W holds structurally (boxes, affine map, affine
  // interval ends); it is stated, not sampled.
  std::string structural_note;
  ExistenceVerdict verdict = ExistenceVerdict::kInconclusive;
  ExistenceBasis basis = ExistenceBasis::kNone;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
};

// Midpoint tests on random segments. Each leader's concavity and
// quasi-concavity checks share the same segments, so a concavity pass always
// implies a quasi-concavity pass. Deterministic given the seed.
AuditReport audit_assumptions(const LqGameSpec& spec, const ReactionMap& map,
                              std::size_t sample_count, double tol, std::uint64_t seed);

std::string existence_statement(const AuditReport& report);

}  // namespace nsn
