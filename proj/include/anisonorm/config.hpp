#pragma once

#include "anisonorm/estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anisonorm {

// One axis of a sampling grid.
struct AxisSpec {
  enum class Kind { Geometric, Uniform };
  Kind kind = Kind::Geometric;
  // Geometric: symmetric nodes +-inner * 10^(k / per_decade) up to outer, step capped at max_step.
  double inner = 1e-300;
  double outer = 1.0;
  double per_decade = 10.0;
  double max_step = kInf;
  // Uniform: n nodes on [lo, hi].
  double lo = -1.0;
  double hi = 1.0;
  Index n = 101;

  ArrayX build() const;
};

struct ScanSpec {
  // Endpoint ladder on one block; without it the scan runs over the p-grid.
  std::optional<int> block;  // zero-based
  EndpointSide side = EndpointSide::Upper;
  int steps = 6;
  double fraction = 0.2;
};

struct TransferSpec {
  // Power-cutoff exponents, applied on every block.
  std::vector<double> calibration;
  std::vector<double> holdout_cutoffs;
  // Gaussian dilations, applied on every block.
  std::vector<double> holdout_gaussians;
};

// Experiment description. Text form is one "key = value" per line with dotted keys and
// 1-based block indices, e.g. "blocks.1.alpha = 0.5"; '#' starts a comment.
struct ExperimentConfig {
  OperatorFamily family;
  std::vector<AxisSpec> source;
  std::vector<std::optional<AxisSpec>> output;
  std::vector<PGrid::Axis> pgrid;
  TestFamily tests;
  SearchOptions search;
  ScanSpec scan;
  TransferSpec transfer;
  double tolerance = kQuadratureTolerance;
  std::string out_dir = "out";
  std::string label = "default";

  std::vector<ArrayX> source_axes() const;
  ApplyOptions apply_options() const;
  PGrid p_grid() const;
};

// Errors are ErrorKind::Config and name the line and key.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: every field written, keys sorted, numbers at 17 significant digits.
std::map<std::string, std::string> to_key_values(const ExperimentConfig& cfg);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace anisonorm
