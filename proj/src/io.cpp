#include "anisonorm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace anisonorm {

namespace {

std::string exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (tok == "inf") return kInf;
  if (tok == "-inf") return -kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Format, "not a number: '" + tok + "'");
  }
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::vector<std::string> expect(const std::string& key, std::size_t args) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      auto t = tokens(line);
      if (t.empty()) continue;
      if (t[0] != key) fail("expected '" + key + "', got '" + t[0] + "'");
      if (args != npos && t.size() != args + 1) fail("'" + key + "' needs " + std::to_string(args) + " fields");
      t.erase(t.begin());
      return t;
    }
    fail("unexpected end of input, expected '" + key + "'");
    return {};
  }

  std::vector<std::string> next_numbers(std::size_t count) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      auto t = tokens(line);
      if (t.empty()) continue;
      if (t.size() != count) fail("expected " + std::to_string(count) + " numbers");
      return t;
    }
    fail("unexpected end of input in data section");
    return {};
  }

  double num(const std::string& tok) const {
    try {
      return parse_double(tok);
    } catch (const Error&) {
      fail("not a number: '" + tok + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Format, "line " + std::to_string(line_no_) + ": " + msg);
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::istream& is_;
  int line_no_ = 0;
};

template <typename T>
void write_impl(std::ostream& os, const GridFunction<T>& f, const char* scalar) {
  os << "anisonorm-grid 1\n";
  os << "scalar " << scalar << "\n";
  os << "rank " << f.rank() << "\n";
  os << "lengths";
  for (Index j = 0; j < f.rank(); ++j) os << ' ' << f.size(j);
  os << "\nradii";
  for (double r : f.truncation_radii()) os << ' ' << exact(r);
  os << "\ntails";
  for (const auto& t : f.tails()) os << ' ' << exact(t.lower) << ' ' << exact(t.upper);
  os << "\n";
  for (Index j = 0; j < f.rank(); ++j) {
    os << "axis " << j + 1 << "\n";
    for (double x : f.axis(j)) os << exact(x) << "\n";
  }
  os << "values\n";
  for (Index i = 0; i < f.total(); ++i) {
    if constexpr (std::is_same_v<T, Complex>)
      os << exact(f.values()[i].real()) << ' ' << exact(f.values()[i].imag()) << "\n";
    else
      os << exact(f.values()[i]) << "\n";
  }
}

}  // namespace

void write_grid(std::ostream& os, const AnyGrid& f) {
  if (const auto* r = std::get_if<RealGrid>(&f)) write_impl(os, *r, "real");
  else write_impl(os, std::get<ComplexGrid>(f), "complex");
}

AnyGrid read_grid(std::istream& is) {
  Reader rd(is);
  const auto magic = rd.expect("anisonorm-grid", 1);
  if (magic[0] != "1") rd.fail("unsupported container version " + magic[0]);
  const std::string scalar = rd.expect("scalar", 1)[0];
  if (scalar != "real" && scalar != "complex") rd.fail("scalar must be real or complex");
  const auto rank_tok = rd.expect("rank", 1);
  const int rank = static_cast<int>(rd.num(rank_tok[0]));
  if (rank < 1 || rank > 16) rd.fail("rank out of range");
  const auto len_tok = rd.expect("lengths", static_cast<std::size_t>(rank));
  std::vector<Index> lengths;
  Index total = 1;
  for (const auto& t : len_tok) {
    const double n = rd.num(t);
    if (!(n >= 1) || n != std::floor(n) || n > 1e8) rd.fail("bad axis length " + t);
    lengths.push_back(static_cast<Index>(n));
    total *= lengths.back();
  }
  if (total > 200000000) rd.fail("grid too large");
  std::vector<double> radii;
  for (const auto& t : rd.expect("radii", static_cast<std::size_t>(rank))) radii.push_back(rd.num(t));
  const auto tail_tok = rd.expect("tails", 2 * static_cast<std::size_t>(rank));
  std::vector<AxisTail> tails(static_cast<std::size_t>(rank));
  for (int j = 0; j < rank; ++j) {
    tails[static_cast<std::size_t>(j)].lower = rd.num(tail_tok[2 * j]);
    tails[static_cast<std::size_t>(j)].upper = rd.num(tail_tok[2 * j + 1]);
  }
  std::vector<ArrayX> axes;
  for (int j = 0; j < rank; ++j) {
    const auto idx = rd.expect("axis", 1);
    if (idx[0] != std::to_string(j + 1)) rd.fail("axes must appear in order");
    ArrayX a(lengths[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < a.size(); ++i) a[i] = rd.num(rd.next_numbers(1)[0]);
    axes.push_back(std::move(a));
  }
  rd.expect("values", 0);
  try {
    if (scalar == "real") {
      ArrayX v(total);
      for (Index i = 0; i < total; ++i) v[i] = rd.num(rd.next_numbers(1)[0]);
      return RealGrid(std::move(axes), std::move(v), std::move(radii), std::move(tails));
    }
    ComplexGrid::Values v(total);
    for (Index i = 0; i < total; ++i) {
      const auto t = rd.next_numbers(2);
      v[i] = Complex(rd.num(t[0]), rd.num(t[1]));
    }
    return ComplexGrid(std::move(axes), std::move(v), std::move(radii), std::move(tails));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw Error(ErrorKind::Format, e.what());
    throw;
  }
}

void save_grid(const std::string& path, const AnyGrid& f) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Format, "cannot write " + path);
  write_grid(os, f);
}

AnyGrid load_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Format, "cannot read " + path);
  return read_grid(is);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void CsvWriter::comment(const std::string& text) { os_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_number(values[i]);
  os_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
  os_ << "\n";
}

void write_norm_table(std::ostream& os, const std::vector<ArrayX>& points, const std::vector<double>& norms) {
  if (points.size() != norms.size()) throw Error(ErrorKind::InvalidArgument, "points and norms differ in length");
  CsvWriter csv(os);
  std::vector<std::string> head;
  const Index l = points.empty() ? 0 : points[0].size();
  for (Index j = 0; j < l; ++j) head.push_back("p_" + std::to_string(j + 1));
  head.push_back("norm");
  csv.header(head);
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<double> r(points[k].begin(), points[k].end());
    r.push_back(norms[k]);
    csv.row(r);
  }
}

}  // namespace anisonorm
