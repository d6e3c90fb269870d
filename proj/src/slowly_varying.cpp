#include "anisonorm/slowly_varying.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace anisonorm {

namespace {

const std::vector<SlowlyVarying>& registry() {
  static const std::vector<SlowlyVarying> entries = {
      {"one", [](double) { return 1.0; }},
      {"log_sym",
       [](double z) { return std::log(std::numbers::e + z) + std::log(std::numbers::e + 1.0 / z); }},
      {"log_e_plus", [](double z) { return std::log(std::numbers::e + z); }},
  };
  return entries;
}

double deviation_at(const std::function<double(double)>& s, double z) {
  double worst = 0.0;
  for (double x : {0.1, 2.0, 10.0}) worst = std::max(worst, std::abs(s(x * z) / s(z) - 1.0));
  return worst;
}

}  // namespace

const SlowlyVarying* find_slowly_varying(const std::string& id) {
  for (const auto& e : registry())
    if (e.id == id) return &e;
  return nullptr;
}

std::vector<std::string> slowly_varying_ids() {
  std::vector<std::string> ids;
  for (const auto& e : registry()) ids.push_back(e.id);
  return ids;
}

SlowVariationCheck check_slow_variation(const std::function<double(double)>& s) {
  SlowVariationCheck out;
  const double mid0 = deviation_at(s, 1e-50), far0 = deviation_at(s, 1e-250);
  const double midi = deviation_at(s, 1e50), fari = deviation_at(s, 1e250);
  out.deviation_near_zero = far0;
  out.deviation_near_inf = fari;
  const bool finite = std::isfinite(far0) && std::isfinite(fari);
  out.passes = finite && far0 < 0.05 && fari < 0.05 && far0 <= mid0 && fari <= midi;
  return out;
}

CompatibilityCheck check_compatibility(const std::function<double(double)>& l,
                                       const std::function<double(double)>& m) {
  CompatibilityCheck out;
  out.ratio_min = std::numeric_limits<double>::infinity();
  out.ratio_max = 0.0;
  auto ratio = [&](int k) {
    const double z = std::pow(10.0, k);
    return m(z) / l(1.0 / z);
  };
  bool finite = true;
  for (int k = -300; k <= 300; ++k) {
    const double r = ratio(k);
    if (!std::isfinite(r) || r <= 0.0) {
      finite = false;
      continue;
    }
    out.ratio_min = std::min(out.ratio_min, r);
    out.ratio_max = std::max(out.ratio_max, r);
  }
  // A bounded ratio levels off: its value barely moves between the last two hundred decades.
  auto level = [&](int near, int far) {
    const double a = ratio(near), b = ratio(far);
    return b / a > 0.5 && b / a < 2.0;
  };
  out.bounded = finite && level(100, 300) && level(-100, -300);
  return out;
}

std::pair<std::string, std::string> split_pair_id(const std::string& id) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) return {id, id};
  return {id.substr(0, colon), id.substr(colon + 1)};
}

}  // namespace anisonorm
