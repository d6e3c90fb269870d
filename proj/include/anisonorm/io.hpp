#pragma once

#include "anisonorm/grid_function.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace anisonorm {

// Text container for grid functions, one token group per line:
//   anisonorm-grid 1
//   scalar real|complex
//   rank <l>
//   lengths <n_1> ... <n_l>
//   radii <R_1> ... <R_l>
//   tails <lower_1> <upper_1> ... (nan when absent)
//   axis <j>            followed by n_j coordinates, one per line, for j = 1..l
//   values              followed by the samples, axis 1 fastest; complex samples as "re im"
// Numbers are written with 17 significant digits so a read-back is bit-exact.
void write_grid(std::ostream& os, const AnyGrid& f);
AnyGrid read_grid(std::istream& is);
void save_grid(const std::string& path, const AnyGrid& f);
AnyGrid load_grid(const std::string& path);

// 12 significant digits, "inf" for infinity.
std::string format_number(double v);

// Comma-separated writer; header comment lines start with '#'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
};

// Table of (p_1..p_l, norm) rows.
void write_norm_table(std::ostream& os, const std::vector<ArrayX>& points, const std::vector<double>& norms);

}  // namespace anisonorm
