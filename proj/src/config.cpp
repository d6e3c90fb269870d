#include "anisonorm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace anisonorm {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Table = std::map<std::string, Entry>;

[[noreturn]] void fail(int line, const std::string& key, const std::string& msg) {
  std::string where = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
  throw Error(ErrorKind::Config, where + key + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& text, int line, const std::string& key) {
  if (text == "inf") return kInf;
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) fail(line, key, "expected a number, got '" + text + "'");
  return v;
}

long to_int(const std::string& text, int line, const std::string& key) {
  long v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) fail(line, key, "expected an integer, got '" + text + "'");
  return v;
}

class Reader {
 public:
  explicit Reader(Table t) : t_(std::move(t)) {}

  const Entry* find(const std::string& key) {
    auto it = t_.find(key);
    if (it == t_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  std::optional<double> number(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return to_double(e->value, e->line, key);
  }
  std::optional<long> integer(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return to_int(e->value, e->line, key);
  }
  std::optional<std::string> text(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }
  std::vector<double> numbers(const std::string& key) {
    const Entry* e = find(key);
    std::vector<double> out;
    if (!e || e->value.empty()) return out;
    for (const std::string& s : split(e->value, ',')) out.push_back(to_double(s, e->line, key));
    return out;
  }
  int line_of(const std::string& key) const {
    auto it = t_.find(key);
    return it == t_.end() ? 0 : it->second.line;
  }
  // Highest 1-based index N among keys "prefix.N.*".
  int count(const std::string& prefix) const {
    int n = 0;
    for (const auto& [k, e] : t_) {
      if (k.rfind(prefix + ".", 0) != 0) continue;
      const std::string rest = k.substr(prefix.size() + 1);
      const std::string idx = rest.substr(0, rest.find('.'));
      // Non-numeric segments are section-level keys; unknown ones surface in check_all_used.
      if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) continue;
      long v = 0;
      std::from_chars(idx.data(), idx.data() + idx.size(), v);
      if (v < 1) fail(e.line, k, "block indices start at 1");
      n = std::max(n, static_cast<int>(v));
    }
    return n;
  }
  void check_all_used() const {
    for (const auto& [k, e] : t_)
      if (!e.used) fail(e.line, k, "unknown key");
  }

 private:
  Table t_;
};

AxisSpec read_axis(Reader& r, const std::string& prefix) {
  AxisSpec a;
  if (auto k = r.text(prefix + ".kind")) {
    if (*k == "geometric") a.kind = AxisSpec::Kind::Geometric;
    else if (*k == "uniform") a.kind = AxisSpec::Kind::Uniform;
    else fail(r.line_of(prefix + ".kind"), prefix + ".kind", "expected geometric or uniform");
  }
  if (auto v = r.number(prefix + ".inner")) a.inner = *v;
  if (auto v = r.number(prefix + ".outer")) a.outer = *v;
  if (auto v = r.number(prefix + ".per_decade")) a.per_decade = *v;
  if (auto v = r.number(prefix + ".max_step")) a.max_step = *v;
  if (auto v = r.number(prefix + ".lo")) a.lo = *v;
  if (auto v = r.number(prefix + ".hi")) a.hi = *v;
  if (auto v = r.integer(prefix + ".n")) a.n = *v;
  return a;
}

bool axis_keys_present(Reader& r, const std::string& prefix) {
  for (const char* f : {"kind", "inner", "outer", "per_decade", "max_step", "lo", "hi", "n"})
    if (r.line_of(prefix + "." + f) > 0) return true;
  return false;
}

std::vector<int> read_partition(Reader& r, const std::string& key) {
  std::vector<int> out;
  for (double v : r.numbers(key)) {
    if (v != std::floor(v) || v < 1) fail(r.line_of(key), key, "block indices are positive integers");
    out.push_back(static_cast<int>(v) - 1);
  }
  return out;
}

void require_fields(const OperatorFamily& fam) {
  for (int j = 0; j < fam.rank(); ++j) {
    const BlockParams& b = fam.blocks[static_cast<std::size_t>(j)];
    const std::string name = "blocks." + std::to_string(j + 1);
    BlockKind k;
    try {
      k = fam.block_kind(j);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, e.what());
    }
    const bool riesz = k == BlockKind::Riesz || k == BlockKind::RieszInterior || k == BlockKind::RieszExterior ||
                       k == BlockKind::Mixture;
    if (riesz && !b.gamma) fail(0, name + ".gamma", "required for " + std::string(to_string(fam.kind)) + " blocks");
    if (k == BlockKind::LogRiesz && !b.delta) fail(0, name + ".delta", "required for LogRiesz blocks");
    if (k == BlockKind::FourierSlowVary && !b.slow_vary_id) fail(0, name + ".slow_vary", "required");
  }
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::string index_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s;
}

void write_axis(std::map<std::string, std::string>& kv, const std::string& prefix, const AxisSpec& a) {
  if (a.kind == AxisSpec::Kind::Geometric) {
    kv[prefix + ".kind"] = "geometric";
    kv[prefix + ".inner"] = num(a.inner);
    kv[prefix + ".outer"] = num(a.outer);
    kv[prefix + ".per_decade"] = num(a.per_decade);
    kv[prefix + ".max_step"] = num(a.max_step);
  } else {
    kv[prefix + ".kind"] = "uniform";
    kv[prefix + ".lo"] = num(a.lo);
    kv[prefix + ".hi"] = num(a.hi);
    kv[prefix + ".n"] = std::to_string(a.n);
  }
}

}  // namespace

ArrayX AxisSpec::build() const {
  if (kind == Kind::Uniform) return uniform_axis(lo, hi, n);
  GeometricAxis g;
  g.inner = inner;
  g.outer = outer;
  g.per_decade = per_decade;
  g.max_step = max_step;
  return geometric_axis(g);
}

std::vector<ArrayX> ExperimentConfig::source_axes() const {
  std::vector<ArrayX> out;
  for (const AxisSpec& a : source) out.push_back(a.build());
  return out;
}

ApplyOptions ExperimentConfig::apply_options() const {
  ApplyOptions o;
  o.tolerance = tolerance;
  for (const auto& a : output) o.output_axes.push_back(a ? a->build() : ArrayX());
  return o;
}

PGrid ExperimentConfig::p_grid() const { return PGrid::log_spaced(pgrid); }

ExperimentConfig parse_config(std::istream& is) {
  Table table;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "'" + s + "'", "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "''", "empty key");
    if (table.count(key)) fail(line, key, "duplicate key (first on line " + std::to_string(table[key].line) + ")");
    table[key] = Entry{trim(s.substr(eq + 1)), line, false};
  }

  Reader r(std::move(table));
  ExperimentConfig cfg;

  const auto kind = r.text("family.kind");
  if (!kind) fail(0, "family.kind", "missing");
  const auto fk = parse_family_kind(*kind);
  if (!fk) fail(r.line_of("family.kind"), "family.kind", "unknown family '" + *kind + "'");
  cfg.family.kind = *fk;
  if (auto v = r.number("family.radius")) cfg.family.domain_radius = *v;
  cfg.family.riesz_blocks = read_partition(r, "family.riesz_blocks");
  cfg.family.fourier_blocks = read_partition(r, "family.fourier_blocks");

  const int l = r.count("blocks");
  if (l == 0) fail(0, "blocks", "at least one block is required");
  for (int j = 1; j <= l; ++j) {
    const std::string b = "blocks." + std::to_string(j);
    BlockParams p;
    if (auto v = r.integer(b + ".m")) p.m = static_cast<int>(*v);
    if (auto v = r.number(b + ".alpha")) p.alpha = *v;
    if (auto v = r.number(b + ".beta")) p.beta = *v;
    p.gamma = r.number(b + ".gamma");
    p.delta = r.number(b + ".delta");
    p.slow_vary_id = r.text(b + ".slow_vary");
    cfg.family.blocks.push_back(p);
  }
  try {
    validate_structure(cfg.family);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("family: ") + e.what());
  }
  require_fields(cfg.family);
  if (const auto v = parameter_violations(cfg.family); !v.empty()) {
    AdmissibilityReport rep;
    rep.violations = v;
    throw Error(ErrorKind::InadmissibleP, rep.summary());
  }

  for (const std::string section : {"grid", "output", "pgrid", "tests"}) {
    const int n = r.count(section);
    if (n > l) fail(0, section + "." + std::to_string(n), "index exceeds the block count " + std::to_string(l));
  }

  if (auto k = r.text("tests.kind")) {
    const auto tk = parse_test_kind(*k);
    if (!tk) fail(r.line_of("tests.kind"), "tests.kind", "unknown test family '" + *k + "'");
    cfg.tests.kind = *tk;
  }
  for (int j = 1; j <= l; ++j) {
    const std::string js = std::to_string(j);
    cfg.source.push_back(read_axis(r, "grid." + js));
    if (axis_keys_present(r, "output." + js)) cfg.output.push_back(read_axis(r, "output." + js));
    else cfg.output.push_back(std::nullopt);

    PGrid::Axis pa;
    std::tie(pa.lo, pa.hi) = admissible_p_interval(cfg.family, j - 1);
    if (!(pa.lo < pa.hi))
      throw Error(ErrorKind::InadmissibleP, "block " + std::to_string(j) + ": no admissible p");
    const std::string pg = "pgrid." + js;
    if (auto v = r.number(pg + ".lo")) pa.lo = *v;
    if (auto v = r.number(pg + ".hi")) pa.hi = *v;
    if (auto v = r.integer(pg + ".levels")) pa.levels = static_cast<int>(*v);
    if (auto v = r.number(pg + ".min_offset")) pa.min_offset = *v;
    cfg.pgrid.push_back(pa);

    TestBlockSpec tb;
    const std::string t = "tests." + js;
    if (auto v = r.number(t + ".cutoff")) tb.cutoff = *v;
    if (auto v = r.number(t + ".exponent_lo")) tb.exponent.lo = *v;
    if (auto v = r.number(t + ".exponent_hi")) tb.exponent.hi = *v;
    if (auto v = r.number(t + ".exponent_margin")) tb.exponent_margin = *v;
    if (auto v = r.number(t + ".scale_lo")) tb.scale.lo = *v;
    if (auto v = r.number(t + ".scale_hi")) tb.scale.hi = *v;
    if (auto v = r.number(t + ".shift_lo")) tb.shift.lo = *v;
    if (auto v = r.number(t + ".shift_hi")) tb.shift.hi = *v;
    cfg.tests.blocks.push_back(tb);
  }

  if (auto v = r.integer("search.sweeps")) cfg.search.sweeps = static_cast<int>(*v);
  if (auto v = r.integer("search.evaluations")) cfg.search.evaluations = static_cast<int>(*v);
  if (cfg.search.sweeps < 1) fail(r.line_of("search.sweeps"), "search.sweeps", "must be >= 1");
  if (cfg.search.evaluations < 3) fail(r.line_of("search.evaluations"), "search.evaluations", "must be >= 3");

  if (auto v = r.integer("scan.block")) {
    if (*v < 1 || *v > l) fail(r.line_of("scan.block"), "scan.block", "must be a block index in 1.." + std::to_string(l));
    cfg.scan.block = static_cast<int>(*v) - 1;
  }
  if (auto s = r.text("scan.side")) {
    if (*s == "lower") cfg.scan.side = EndpointSide::Lower;
    else if (*s == "upper") cfg.scan.side = EndpointSide::Upper;
    else fail(r.line_of("scan.side"), "scan.side", "expected lower or upper");
  }
  if (auto v = r.integer("scan.steps")) cfg.scan.steps = static_cast<int>(*v);
  if (auto v = r.number("scan.fraction")) cfg.scan.fraction = *v;

  cfg.transfer.calibration = r.numbers("transfer.calibration");
  cfg.transfer.holdout_cutoffs = r.numbers("transfer.holdout_cutoffs");
  cfg.transfer.holdout_gaussians = r.numbers("transfer.holdout_gaussians");

  if (auto v = r.number("tolerance")) cfg.tolerance = *v;
  if (!(cfg.tolerance > 0)) fail(r.line_of("tolerance"), "tolerance", "must be positive");
  if (auto v = r.text("out_dir")) cfg.out_dir = *v;
  if (auto v = r.text("label")) cfg.label = *v;

  r.check_all_used();
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Config, "cannot open config '" + path + "'");
  return parse_config(is);
}

std::map<std::string, std::string> to_key_values(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  const OperatorFamily& f = cfg.family;
  kv["family.kind"] = to_string(f.kind);
  kv["family.radius"] = num(f.domain_radius);
  if (!f.riesz_blocks.empty()) kv["family.riesz_blocks"] = index_list(f.riesz_blocks);
  if (!f.fourier_blocks.empty()) kv["family.fourier_blocks"] = index_list(f.fourier_blocks);
  for (int j = 0; j < f.rank(); ++j) {
    const std::string js = std::to_string(j + 1);
    const BlockParams& b = f.blocks[static_cast<std::size_t>(j)];
    const std::string bp = "blocks." + js;
    kv[bp + ".m"] = std::to_string(b.m);
    kv[bp + ".alpha"] = num(b.alpha);
    kv[bp + ".beta"] = num(b.beta);
    if (b.gamma) kv[bp + ".gamma"] = num(*b.gamma);
    if (b.delta) kv[bp + ".delta"] = num(*b.delta);
    if (b.slow_vary_id) kv[bp + ".slow_vary"] = *b.slow_vary_id;

    const auto ju = static_cast<std::size_t>(j);
    if (ju < cfg.source.size()) write_axis(kv, "grid." + js, cfg.source[ju]);
    if (ju < cfg.output.size() && cfg.output[ju]) write_axis(kv, "output." + js, *cfg.output[ju]);
    if (ju < cfg.pgrid.size()) {
      const PGrid::Axis& pa = cfg.pgrid[ju];
      kv["pgrid." + js + ".lo"] = num(pa.lo);
      kv["pgrid." + js + ".hi"] = num(pa.hi);
      kv["pgrid." + js + ".levels"] = std::to_string(pa.levels);
      kv["pgrid." + js + ".min_offset"] = num(pa.min_offset);
    }
    if (ju < cfg.tests.blocks.size()) {
      const TestBlockSpec& tb = cfg.tests.blocks[ju];
      const std::string t = "tests." + js;
      kv[t + ".cutoff"] = num(tb.cutoff);
      kv[t + ".exponent_lo"] = num(tb.exponent.lo);
      kv[t + ".exponent_hi"] = num(tb.exponent.hi);
      kv[t + ".exponent_margin"] = num(tb.exponent_margin);
      kv[t + ".scale_lo"] = num(tb.scale.lo);
      kv[t + ".scale_hi"] = num(tb.scale.hi);
      kv[t + ".shift_lo"] = num(tb.shift.lo);
      kv[t + ".shift_hi"] = num(tb.shift.hi);
    }
  }
  kv["tests.kind"] = to_string(cfg.tests.kind);
  kv["search.sweeps"] = std::to_string(cfg.search.sweeps);
  kv["search.evaluations"] = std::to_string(cfg.search.evaluations);
  if (cfg.scan.block) kv["scan.block"] = std::to_string(*cfg.scan.block + 1);
  kv["scan.side"] = cfg.scan.side == EndpointSide::Upper ? "upper" : "lower";
  kv["scan.steps"] = std::to_string(cfg.scan.steps);
  kv["scan.fraction"] = num(cfg.scan.fraction);
  if (!cfg.transfer.calibration.empty()) kv["transfer.calibration"] = list(cfg.transfer.calibration);
  if (!cfg.transfer.holdout_cutoffs.empty()) kv["transfer.holdout_cutoffs"] = list(cfg.transfer.holdout_cutoffs);
  if (!cfg.transfer.holdout_gaussians.empty())
    kv["transfer.holdout_gaussians"] = list(cfg.transfer.holdout_gaussians);
  kv["tolerance"] = num(cfg.tolerance);
  kv["out_dir"] = cfg.out_dir;
  kv["label"] = cfg.label;
  return kv;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : to_key_values(cfg)) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // out_dir is where results go, not what they are.
  auto kv = to_key_values(cfg);
  kv.erase("out_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : kv)
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace anisonorm
