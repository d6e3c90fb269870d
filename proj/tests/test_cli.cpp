#include "anisonorm/cli.hpp"
#include "anisonorm/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace anisonorm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("anisonorm_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> r;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(cell);
    rows.push_back(r);
  }
  return rows;
}

const char* kSmallRiesz = R"(label = small
family.kind = RieszFull
blocks.1.gamma = 0.5
grid.1.kind = geometric
grid.1.inner = 1e-12
grid.1.outer = 4
grid.1.per_decade = 6
output.1.kind = geometric
output.1.inner = 1e-12
output.1.outer = 1e4
output.1.per_decade = 6
pgrid.1.lo = 1.2
pgrid.1.hi = 1.8
pgrid.1.levels = 1
pgrid.1.min_offset = 0.05
search.sweeps = 1
search.evaluations = 8
)";

int cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"anisonorm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("config round trip preserves the canonical form and hash") {
  const ExperimentConfig a = parse_config_string(kSmallRiesz);
  const ExperimentConfig b = parse_config_string(serialize_config(a));
  CHECK(to_key_values(a) == to_key_values(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(a.family.blocks[0].gamma == doctest::Approx(0.5));
  CHECK(a.pgrid[0].levels == 1);
  CHECK(a.search.evaluations == 8);

  for (const char* name : {"riesz_gamma_half.cfg", "transfer_demo.cfg", "transfer_fourier.cfg"}) {
    const ExperimentConfig c = load_config(std::string(ANISONORM_CONFIG_DIR) + "/" + name);
    CHECK(config_hash(parse_config_string(serialize_config(c))) == config_hash(c));
  }
}

TEST_CASE("config hash ignores the output directory but not the physics") {
  ExperimentConfig a = parse_config_string(kSmallRiesz);
  ExperimentConfig b = a;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.family.blocks[0].gamma = 0.4;
  CHECK(config_hash(a) != config_hash(b));
  // key order and comments do not matter
  std::string text = kSmallRiesz;
  const std::string last = "search.evaluations = 8\n";
  text.erase(text.find(last), last.size());
  const ExperimentConfig c = parse_config_string("# reordered\n\n" + last + text);
  CHECK(config_hash(c) == config_hash(a));
}

TEST_CASE("config errors name the line and key") {
  auto message = [](const std::string& text) {
    try {
      parse_config_string(text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string unknown = message("family.kind = RieszFull\nblocks.1.gamma = 0.5\nblocks.1.bogus = 1\n");
  CHECK(unknown.find("line 3") != std::string::npos);
  CHECK(unknown.find("blocks.1.bogus") != std::string::npos);
  CHECK(message("family.kind = RieszFull\nblocks.1.alpha = 0\n").find("blocks.1.gamma") != std::string::npos);
  CHECK(message("family.kind = RieszFull\nblocks.1.gamma = 0.5\nblocks.1.gamma = 0.4\n").find("line 3") !=
        std::string::npos);
  CHECK(message("family.kind = RieszFull\nblocks.1.gamma = half\n").find("line 2") != std::string::npos);
  CHECK(message("family.kind = Nope\n").find("family.kind") != std::string::npos);
  CHECK(message("family.kind RieszFull\n").find("line 1") != std::string::npos);
}

TEST_CASE("inadmissible parameters are an admissibility error") {
  CHECK(kind_of([] { parse_config_string("family.kind = RieszFull\nblocks.1.alpha = 0.6\nblocks.1.gamma = 0.5\n"); }) ==
        ErrorKind::InadmissibleP);
}

TEST_CASE("thread count falls back to the environment") {
  ::setenv("ANISONORM_THREADS", "3", 1);
  CHECK(resolve_threads(0) == 3);
  CHECK(resolve_threads(2) == 2);
  ::unsetenv("ANISONORM_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("exit codes") {
  const fs::path d = scratch("exit");
  put(d / "ok.cfg", std::string(kSmallRiesz) + "out_dir = " + (d / "out").string() + "\n");
  put(d / "unknown.cfg", std::string(kSmallRiesz) + "grid.1.colour = red\n");
  put(d / "inadmissible.cfg", "family.kind = RieszFull\nblocks.1.alpha = 0.6\nblocks.1.gamma = 0.5\n");
  CHECK(cli({"--config", (d / "unknown.cfg").string(), "exponents"}) == 1);
  CHECK(cli({"--config", (d / "missing.cfg").string(), "exponents"}) == 1);
  CHECK(cli({"exponents"}) == 1);
  CHECK(cli({"--config", (d / "ok.cfg").string(), "nonsense"}) == 1);
  CHECK(cli({"--config", (d / "inadmissible.cfg").string(), "exponents"}) == 2);
  CHECK(cli({"--config", (d / "ok.cfg").string(), "exponents"}) == 0);

  // Fourier output far beyond the band resolved by the input grid: numeric failure
  put(d / "band.cfg", "family.kind = FourierWeighted\nblocks.1.beta = 0\noutput.1.kind = uniform\n"
                      "output.1.lo = 50\noutput.1.hi = 100\noutput.1.n = 3\nout_dir = " +
                          (d / "band").string() + "\n");
  save_grid((d / "gauss.grid").string(),
            sample_line(uniform_axis(-4.0, 4.0, 81), [](double x) { return std::exp(-x * x); }));
  CHECK(cli({"--config", (d / "band.cfg").string(), "apply", "--input", (d / "gauss.grid").string()}) == 3);
}

TEST_CASE("exponent tables carry the config hash and the riesz relation") {
  const fs::path d = scratch("exponents");
  ExperimentConfig cfg = parse_config_string(kSmallRiesz);
  cfg.out_dir = d.string();
  const auto files = cmd_exponents(cfg, {});
  REQUIRE(files.size() == 2);
  for (const auto& f : files) {
    std::ifstream is(f);
    std::string first;
    std::getline(is, first);
    CHECK(first.rfind("# anisonorm exponents config_hash=" + config_hash(cfg), 0) == 0);
  }
  const auto rows = csv_rows(d / "exponents_samples.csv");
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    const double p = std::stod(r[0]), q = std::stod(r[1]);
    CHECK(1.0 / q == doctest::Approx(1.0 / p - 0.5).epsilon(1e-10));
  }
}

TEST_CASE("apply reproduces the riesz potential of an indicator and writes a sidecar") {
  const fs::path d = scratch("apply");
  ExperimentConfig cfg = parse_config_string(
      "family.kind = RieszFull\nblocks.1.gamma = 0.5\noutput.1.kind = uniform\noutput.1.lo = 0.5\n"
      "output.1.hi = 2\noutput.1.n = 2\n");
  cfg.out_dir = d.string();
  const ArrayX axis = with_jumps(uniform_axis(0.0, 3.0, 301), {1.0});
  save_grid((d / "ind.grid").string(), sample_line(axis, [](double x) { return x <= 1.0 ? 1.0 : 0.0; }));
  const auto files = cmd_apply(cfg, (d / "ind.grid").string(), "", {});
  REQUIRE(files.size() == 2);
  const RealGrid g = std::get<RealGrid>(load_grid(files[0]));
  // int_0^1 |x - y|^(-1/2) dy at x = 1/2 and x = 2
  CHECK(g.values()[0] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
  CHECK(g.values()[1] == doctest::Approx(0.82842712474619).epsilon(1e-7));
  const std::string meta = slurp(files[1]);
  CHECK(meta.find("config_hash = " + config_hash(cfg)) != std::string::npos);
  CHECK(meta.find("scalar = real") != std::string::npos);
  CHECK(meta.find("axis.1.length = 2") != std::string::npos);
  // the indicator does not vanish at the x = 0 end of its axis
  CHECK(meta.find("warning.1 = TruncationWarning") != std::string::npos);

  const auto alt = cmd_apply(cfg, (d / "ind.grid").string(), (d / "sub" / "z.grid").string(), {});
  CHECK(fs::exists(d / "sub" / "z.grid"));
  CHECK(alt.size() == 2);
}

TEST_CASE("scan output is identical across thread counts") {
  const fs::path d = scratch("scan");
  ExperimentConfig cfg = parse_config_string(kSmallRiesz);
  cfg.out_dir = (d / "a").string();
  RunContext one;
  one.threads = 1;
  const auto fa = cmd_scan(cfg, one);
  cfg.out_dir = (d / "b").string();
  RunContext three;
  three.threads = 3;
  const auto fb = cmd_scan(cfg, three);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(slurp(fa[i]) == slurp(fb[i]));
  const auto rows = csv_rows(d / "a" / "scan_kcurve.csv");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i - 1][0]) < std::stod(rows[i][0]));
}

TEST_CASE("verify passes on a well-posed configuration") {
  const fs::path d = scratch("verify");
  ExperimentConfig cfg = parse_config_string(kSmallRiesz);
  cfg.out_dir = d.string();
  const auto files = cmd_verify(cfg, {});
  REQUIRE(files.size() == 1);
  const auto rows = csv_rows(files[0]);
  CHECK(rows.size() >= 8);
  for (const auto& r : rows) CHECK_MESSAGE(r.back() == "1", r.front());
}
