#pragma once

#include "anisonorm/exponents.hpp"

#include <random>
#include <vector>

namespace anisonorm::testing {

// Small hand-rolled generators on a fixed seed; every test that uses them is reproducible.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin(double p_true = 0.5) { return uniform(0.0, 1.0) < p_true; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))]; }

  // Block parameters drawn wide enough that some draws violate the parameter conditions.
  BlockParams block(FamilyKind kind) {
    BlockParams b;
    b.m = integer(1, 3);
    b.alpha = uniform(-0.1, 1.1) * b.m;
    b.beta = uniform(-0.1, 1.0) * b.m;
    if (kind != FamilyKind::FourierWeighted && kind != FamilyKind::FourierSlowVary && kind != FamilyKind::LogRiesz)
      b.gamma = uniform(-0.1, 1.0) * b.m;
    if (kind == FamilyKind::LogRiesz) b.delta = uniform(-0.5, 2.0);
    if (kind == FamilyKind::FourierSlowVary)
      b.slow_vary_id = pick(std::vector<std::string>{"one", "log_sym", "one:log_sym", "log_e_plus", "nope"});
    return b;
  }

  OperatorFamily family(FamilyKind kind) {
    OperatorFamily f;
    f.kind = kind;
    const int l = integer(1, 3);
    if (kind == FamilyKind::Composed) {
      const int n = std::max(l, 2);
      for (int j = 0; j < n; ++j) {
        const bool riesz = j == 0 || (j > 1 && coin());
        BlockParams b = block(riesz ? FamilyKind::RieszFull : FamilyKind::FourierWeighted);
        if (j == 1) b.gamma.reset();
        (riesz ? f.riesz_blocks : f.fourier_blocks).push_back(j);
        f.blocks.push_back(b);
      }
      return f;
    }
    for (int j = 0; j < l; ++j) f.blocks.push_back(block(kind));
    f.domain_radius = uniform(0.5, 2.0);
    return f;
  }

  // Exponent vector inside (1, 8) with the occasional infinity.
  ArrayX p_vector(int l) {
    ArrayX p(l);
    for (int j = 0; j < l; ++j) p[j] = coin(0.1) ? kInf : uniform(1.0, 8.0);
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<FamilyKind>& all_family_kinds() {
  static const std::vector<FamilyKind> k{FamilyKind::RieszFull,       FamilyKind::RieszInterior,
                                         FamilyKind::RieszExterior,   FamilyKind::LogRiesz,
                                         FamilyKind::FourierWeighted, FamilyKind::FourierSlowVary,
                                         FamilyKind::Composed,        FamilyKind::Mixture};
  return k;
}

}  // namespace anisonorm::testing
