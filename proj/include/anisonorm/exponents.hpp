#pragma once

#include "anisonorm/core.hpp"
#include "anisonorm/slowly_varying.hpp"

#include <optional>
#include <utility>
#include <string>
#include <vector>

namespace anisonorm {

enum class FamilyKind {
  RieszFull,
  RieszInterior,
  RieszExterior,
  LogRiesz,
  FourierWeighted,
  FourierSlowVary,
  Composed,
  Mixture,
};

// Kind of a single coordinate block once a family's partition is resolved.
enum class BlockKind { Riesz, RieszInterior, RieszExterior, LogRiesz, Fourier, FourierSlowVary, Mixture };

const char* to_string(FamilyKind kind);
std::optional<FamilyKind> parse_family_kind(const std::string& name);

struct BlockParams {
  int m = 1;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> gamma;
  std::optional<double> delta;
  // Registered slowly varying function S, or a pair "L:M".
  std::optional<std::string> slow_vary_id;
};

struct OperatorFamily {
  FamilyKind kind = FamilyKind::RieszFull;
  std::vector<BlockParams> blocks;
  // Composed only: zero-based block indices of the Riesz and Fourier parts.
  std::vector<int> riesz_blocks;
  std::vector<int> fourier_blocks;
  // Interior and exterior families only.
  double domain_radius = 1.0;

  int rank() const { return static_cast<int>(blocks.size()); }
  int total_dim() const;
  BlockKind block_kind(int j) const;
};

// Throws InvalidArgument when the family's structural invariants fail.
void validate_structure(const OperatorFamily& family);

struct ExponentPoint {
  ArrayX p;
  ArrayX q;
};

struct BlockRange {
  double p_minus = 0.0;
  double p_plus = 0.0;
  double q_minus = 0.0;
  double q_plus = 0.0;
  double kappa = 0.0;
  // Image of the open p-range under q_of_p, ordered low to high.
  double q_image_lo = 0.0;
  double q_image_hi = 0.0;
};

struct Violation {
  int block = -1;  // -1 for family-level conditions
  std::string condition;
  std::string detail;
};

struct AdmissibilityReport {
  bool pass = false;
  std::vector<Violation> violations;
  ArrayX q;                         // NaN where undefined
  std::vector<int> equality_blocks;  // blocks with p_j == q_j (mixture diagnostic)
  std::vector<CompatibilityCheck> compatibility;  // slowly varying blocks only

  std::string summary() const;
};

struct EnvelopeValue {
  double lower_shape = 0.0;
  double upper_shape = 0.0;
};

inline constexpr double kAdmissibilityMargin = 1e-9;

// Blockwise affine relation 1/q = offset + sign * (1/p).
struct BlockRelation {
  double offset = 0.0;
  double sign = 1.0;
};

BlockRelation block_relation(const OperatorFamily& family, int j);

std::vector<BlockRange> endpoints(const OperatorFamily& family);
// Conditions on the block parameters alone (no p); empty when the family is usable.
std::vector<Violation> parameter_violations(const OperatorFamily& family);
// Open interval of p_j on which every range and side condition of block j holds, from the
// linear constraints in 1/p. Empty (lo >= hi) when no p is admissible.
std::pair<double, double> admissible_p_interval(const OperatorFamily& family, int j);
AdmissibilityReport admissible(const OperatorFamily& family, const ArrayX& p,
                               double margin = kAdmissibilityMargin);
ArrayX q_of_p(const OperatorFamily& family, const ArrayX& p, double margin = kAdmissibilityMargin);
// Inverse of q_of_p solved per block by bisection in 1/p, no admissibility check.
ArrayX p_of_q(const OperatorFamily& family, const ArrayX& q);
EnvelopeValue envelope(const OperatorFamily& family, const ArrayX& p,
                       double margin = kAdmissibilityMargin);

}  // namespace anisonorm
