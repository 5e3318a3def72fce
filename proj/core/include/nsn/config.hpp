#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nsn {

// How a leader's best response treats the uncertainty.
//  kMyopic:       w is held fixed (the literal leader-optimality condition).
//  kAnticipating: the virtual player's worst case is re-solved for every
//                 candidate strategy, so shrinking W(x) is priced in.
enum class BrMode { kMyopic, kAnticipating };

// Selection among payoff-flat coordinates / tied candidates.
enum class TieBreak { kLexLow, kPreferRestrict, kPreferRelax };

// Search used by the anticipating best response.
enum class AnticipatingSearch { kLatticeGolden, kDenseGrid };

const char* to_string(BrMode mode);
const char* to_string(TieBreak tiebreak);
std::optional<BrMode> parse_br_mode(std::string_view text);
std::optional<TieBreak> parse_tiebreak(std::string_view text);

struct SolverDefaults {
  double lambda = 0.2;
  BrMode mode = BrMode::kAnticipating;
  TieBreak tiebreak = TieBreak::kLexLow;
  int max_iter = 200;
  double conv_tol = 1e-8;
  int grid_x = 101;
  int grid_w = 4001;
  double tol = 1e-6;
  std::uint64_t seed = 42;
  int audit_samples = 10000;
};

}  // namespace nsn
