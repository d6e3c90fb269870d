#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace anisonorm {

// A registered slowly varying function S on (0, inf).
struct SlowlyVarying {
  std::string id;
  std::function<double(double)> fn;
};

// Built-in registry lookup; returns nullptr for unknown ids.
const SlowlyVarying* find_slowly_varying(const std::string& id);
std::vector<std::string> slowly_varying_ids();

struct SlowVariationCheck {
  bool passes = false;
  // max |S(xz)/S(z) - 1| over the probe multipliers, near 0 and near inf
  double deviation_near_zero = 0.0;
  double deviation_near_inf = 0.0;
};

// Checks S(xz)/S(z) -> 1 at both ends on a geometric z-grid.
SlowVariationCheck check_slow_variation(const std::function<double(double)>& s);

struct CompatibilityCheck {
  bool bounded = false;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

// Checks that M(z) / L(1/z) stays bounded above and below on a logarithmic z-grid.
CompatibilityCheck check_compatibility(const std::function<double(double)>& l,
                                       const std::function<double(double)>& m);

// "L:M" names a pair; a single id "S" means L = M = S.
std::pair<std::string, std::string> split_pair_id(const std::string& id);

}  // namespace anisonorm
