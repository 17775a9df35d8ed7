#pragma once

#include <string>
#include <vector>

namespace aeq {

/// One named pass/fail outcome. `condition` names the hypothesis checked
/// (C1..C7, Eq14, equivalence, ...).
struct Verdict {
  std::string condition;
  bool pass = false;
  double worst_value = 0.0;
  double at_t = 0.0;
  std::string note;
};

struct DecayWindows {
  double final_max = 0.0;  ///< sup over the last 10% of the range
  double mid_max = 0.0;    ///< sup over [0.45, 0.5] of the range
  double at_t = 0.0;       ///< where final_max is attained
};

/// Window maxima of a sampled curve, measured from `origin` towards `end`
/// (end may lie left of origin for the negative axis).
DecayWindows decay_windows(const std::vector<double>& t, const std::vector<double>& v, double origin, double end);

/// Finite-horizon proxy for "→ 0": final window below tol and not above the
/// mid window by more than a noise floor of 1e-3·tol.
bool decays(const DecayWindows& w, double tol);

}  // namespace aeq
