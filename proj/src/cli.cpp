#include "anisonorm/cli.hpp"

#include "anisonorm/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace anisonorm {

namespace {

namespace fs = std::filesystem;

std::ostream& out(const RunContext& ctx) {
  static std::ofstream null;
  return ctx.log ? *ctx.log : null;
}

fs::path prepare_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
  return os;
}

void stamp(CsvWriter& w, const std::string& cmd, const ExperimentConfig& cfg) {
  w.comment("anisonorm " + cmd + " config_hash=" + config_hash(cfg) + " label=" + cfg.label);
}

std::vector<std::string> indexed(const std::string& stem, int n) {
  std::vector<std::string> v;
  for (int j = 1; j <= n; ++j) v.push_back(stem + "_" + std::to_string(j));
  return v;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

ArrayX midpoint(const PGrid& g) {
  ArrayX p(g.rank());
  for (Index j = 0; j < g.rank(); ++j) {
    const ArrayX& a = g.axis_points()[static_cast<std::size_t>(j)];
    p[j] = a[a.size() / 2];
  }
  return p;
}

RealGrid cutoff_member(const std::vector<ArrayX>& axes, double a) {
  TestFamily t;
  t.kind = TestKind::PowerCutoff;
  t.blocks.resize(axes.size());
  return t.generate(axes, ArrayX::Constant(static_cast<Index>(axes.size()), a));
}

RealGrid gaussian_member(const std::vector<ArrayX>& axes, double lambda) {
  TestFamily t;
  t.kind = TestKind::DilatedGaussian;
  t.blocks.resize(axes.size());
  ArrayX params(2 * static_cast<Index>(axes.size()));
  for (Index j = 0; j < static_cast<Index>(axes.size()); ++j) {
    params[2 * j] = lambda;
    params[2 * j + 1] = 0.0;
  }
  return t.generate(axes, params);
}

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass() const { return std::isfinite(value) && value <= tolerance; }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ANISONORM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw Error(ErrorKind::Config, std::string("ANISONORM_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> cmd_exponents(const ExperimentConfig& cfg, const RunContext& ctx) {
  const OperatorFamily& fam = cfg.family;
  const fs::path dir = prepare_dir(cfg);
  const std::vector<BlockRange> ranges = endpoints(fam);
  const int l = fam.rank();

  const fs::path tpath = dir / "exponents_endpoints.csv";
  {
    std::ofstream os = open_out(tpath);
    CsvWriter w(os);
    stamp(w, "exponents", cfg);
    w.header({"block", "p_minus", "p_plus", "q_minus", "q_plus", "kappa", "q_image_lo", "q_image_hi"});
    for (int j = 0; j < l; ++j) {
      const BlockRange& r = ranges[static_cast<std::size_t>(j)];
      w.row(std::vector<double>{static_cast<double>(j + 1), r.p_minus, r.p_plus, r.q_minus, r.q_plus, r.kappa,
                                r.q_image_lo, r.q_image_hi});
    }
  }
  out(ctx) << "family " << to_string(fam.kind) << ", " << l << " block(s)\n";
  for (int j = 0; j < l; ++j) {
    const BlockRange& r = ranges[static_cast<std::size_t>(j)];
    out(ctx) << "  block " << j + 1 << ": p in (" << format_number(r.p_minus) << ", " << format_number(r.p_plus)
             << "), q in (" << format_number(r.q_minus) << ", " << format_number(r.q_plus)
             << "), kappa = " << format_number(r.kappa) << "\n";
  }

  const fs::path spath = dir / "exponents_samples.csv";
  {
    std::ofstream os = open_out(spath);
    CsvWriter w(os);
    stamp(w, "exponents", cfg);
    w.header(concat(concat(indexed("p", l), indexed("q", l)), {"lower_shape", "upper_shape"}));
    for (const ArrayX& p : cfg.p_grid().points()) {
      const ArrayX q = q_of_p(fam, p);
      const EnvelopeValue e = envelope(fam, p);
      std::vector<double> row(p.begin(), p.end());
      row.insert(row.end(), q.begin(), q.end());
      row.push_back(e.lower_shape);
      row.push_back(e.upper_shape);
      w.row(row);
    }
  }
  return {tpath.string(), spath.string()};
}

std::vector<std::string> cmd_apply(const ExperimentConfig& cfg, const std::string& input, const std::string& output,
                                   const RunContext& ctx) {
  const AnyGrid f = load_grid(input);
  const auto& axes = std::visit([](const auto& g) -> const std::vector<ArrayX>& { return g.axes(); }, f);
  if (static_cast<int>(axes.size()) != cfg.family.rank())
    throw Error(ErrorKind::Format, "input has rank " + std::to_string(axes.size()) + ", the family has " +
                                       std::to_string(cfg.family.rank()) + " block(s)");
  TensorOperator op(cfg.family, axes, cfg.apply_options());
  std::vector<std::string> warnings;
  const AnyGrid g = std::visit([&](const auto& x) { return op.apply(x, &warnings); }, f);

  fs::path opath = output.empty() ? prepare_dir(cfg) / "apply_output.grid" : fs::path(output);
  if (opath.has_parent_path()) fs::create_directories(opath.parent_path());
  save_grid(opath.string(), g);

  const fs::path meta = opath.string() + ".meta";
  std::ofstream os = open_out(meta);
  os << "config_hash = " << config_hash(cfg) << "\n";
  os << "family = " << to_string(cfg.family.kind) << "\n";
  os << "input = " << input << "\n";
  os << "quadrature_tolerance = " << format_number(cfg.tolerance) << "\n";
  os << "axis_order = axis 1 fastest\n";
  std::visit(
      [&](const auto& x) {
        os << "scalar = " << (std::is_same_v<std::decay_t<decltype(x)>, ComplexGrid> ? "complex" : "real") << "\n";
        for (Index j = 0; j < x.rank(); ++j) {
          os << "axis." << j + 1 << ".length = " << x.size(j) << "\n";
          os << "axis." << j + 1 << ".truncation_radius = "
             << format_number(x.truncation_radii()[static_cast<std::size_t>(j)]) << "\n";
        }
      },
      g);
  for (std::size_t i = 0; i < warnings.size(); ++i) os << "warning." << i + 1 << " = " << warnings[i] << "\n";
  for (const auto& w : warnings) out(ctx) << "warning: " << w << "\n";
  return {opath.string(), meta.string()};
}

std::vector<std::string> cmd_scan(const ExperimentConfig& cfg, const RunContext& ctx) {
  const OperatorFamily& fam = cfg.family;
  const int l = fam.rank();
  const fs::path dir = prepare_dir(cfg);
  const PGrid grid = cfg.p_grid();
  const std::vector<ArrayX> points =
      cfg.scan.block ? endpoint_ladder(fam, *cfg.scan.block, cfg.scan.side, midpoint(grid), cfg.scan.steps,
                                       cfg.scan.fraction)
                     : grid.points();
  for (const ArrayX& p : points) q_of_p(fam, p);

  out(ctx) << "assembling operator\n";
  const RatioEvaluator eval(fam, cfg.source_axes(), cfg.apply_options());
  out(ctx) << "scanning " << points.size() << " point(s) on " << ctx.threads << " thread(s)\n";
  const std::vector<KEstimate> curve = scan_k_curve(eval, points, cfg.tests, cfg.search, ctx.threads);

  const fs::path kpath = dir / "scan_kcurve.csv";
  {
    std::ofstream os = open_out(kpath);
    CsvWriter w(os);
    stamp(w, "scan", cfg);
    std::vector<std::string> cols = concat(concat(indexed("p", l), indexed("q", l)), {"lower_bound"});
    cols = concat(cols, cfg.tests.param_names());
    cols = concat(cols, {"tolerance", "degenerate", "divergent"});
    w.header(cols);
    for (const KEstimate& k : curve) {
      std::vector<double> row(k.p.begin(), k.p.end());
      row.insert(row.end(), k.q.begin(), k.q.end());
      row.push_back(k.lower_bound);
      row.insert(row.end(), k.witness.begin(), k.witness.end());
      row.push_back(k.quadrature_tolerance);
      row.push_back(k.degenerate ? 1.0 : 0.0);
      row.push_back(k.divergent ? 1.0 : 0.0);
      w.row(row);
    }
  }
  std::vector<std::string> files{kpath.string()};
  if (!cfg.scan.block) return files;

  const fs::path bpath = dir / "scan_blowup.csv";
  std::ofstream os = open_out(bpath);
  CsvWriter w(os);
  stamp(w, "scan", cfg);
  w.header({"block", "side", "endpoint", "slope", "expected_slope", "residual", "status"});
  const int j = *cfg.scan.block;
  const std::string side = cfg.scan.side == EndpointSide::Upper ? "upper" : "lower";
  const BlockRange r = endpoints(fam)[static_cast<std::size_t>(j)];
  const double end = cfg.scan.side == EndpointSide::Upper ? r.p_plus : r.p_minus;
  bool divergent = false;
  for (const KEstimate& k : curve) divergent = divergent || !std::isfinite(k.lower_bound);
  if (divergent) {
    w.row(std::vector<std::string>{std::to_string(j + 1), side, format_number(end), "nan",
                                   format_number(-r.kappa), "nan", "divergent"});
    out(ctx) << "blow-up fit skipped: the test family reaches a divergent operator integral\n";
  } else {
    const BlowupFit fit = fit_blowup(curve, fam, j, cfg.scan.side);
    w.row(std::vector<std::string>{std::to_string(j + 1), side, format_number(end), format_number(fit.fitted_slope),
                                   format_number(-fit.expected_kappa), format_number(fit.residual), "ok"});
    out(ctx) << "blow-up slope " << format_number(fit.fitted_slope) << " (expected "
             << format_number(-fit.expected_kappa) << ")\n";
  }
  files.push_back(bpath.string());
  return files;
}

std::vector<std::string> cmd_transfer(const ExperimentConfig& cfg, const RunContext& ctx) {
  const OperatorFamily& fam = cfg.family;
  const int l = fam.rank();
  if (cfg.transfer.calibration.empty()) throw Error(ErrorKind::Config, "transfer.calibration: missing");
  const fs::path dir = prepare_dir(cfg);
  const PGrid grid = cfg.p_grid();

  out(ctx) << "assembling operator\n";
  const RatioEvaluator eval(fam, cfg.source_axes(), cfg.apply_options());
  const std::vector<ArrayX> axes = eval.source_axes();
  std::vector<RealGrid> cal, hold;
  std::vector<std::pair<std::string, double>> labels;
  for (double a : cfg.transfer.calibration) cal.push_back(cutoff_member(axes, a));
  for (double a : cfg.transfer.holdout_cutoffs) {
    hold.push_back(cutoff_member(axes, a));
    labels.emplace_back("PowerCutoff", a);
  }
  for (double lam : cfg.transfer.holdout_gaussians) {
    hold.push_back(gaussian_member(axes, lam));
    labels.emplace_back("DilatedGaussian", lam);
  }

  Box support;
  support.lo = ArrayX::Ones(l);
  support.hi = ArrayX::Constant(l, kInf);
  const TransferCheck tc = verify_transfer(eval, PsiFunction::constant(support), cal, hold, grid);

  const fs::path cpath = dir / "transfer_calibration.csv";
  {
    std::ofstream os = open_out(cpath);
    CsvWriter w(os);
    stamp(w, "transfer", cfg);
    w.header(concat(concat(indexed("p", l), indexed("q", l)), {"lower_bound", "member", "c_hat_upper_shape"}));
    for (const KEstimate& k : tc.calibration_curve) {
      std::vector<double> row(k.p.begin(), k.p.end());
      row.insert(row.end(), k.q.begin(), k.q.end());
      row.push_back(k.lower_bound);
      row.push_back(k.witness.size() ? k.witness[0] + 1 : 0.0);
      row.push_back(tc.c_hat * envelope(fam, k.p).upper_shape);
      w.row(row);
    }
  }
  const fs::path mpath = dir / "transfer_margins.csv";
  {
    std::ofstream os = open_out(mpath);
    CsvWriter w(os);
    stamp(w, "transfer", cfg);
    w.header({"holdout", "kind", "parameter", "margin"});
    for (std::size_t i = 0; i < tc.margins.size(); ++i)
      w.row(std::vector<std::string>{std::to_string(i + 1), labels[i].first, format_number(labels[i].second),
                                     format_number(tc.margins[i])});
  }
  double worst = 0.0;
  for (double m : tc.margins) worst = std::max(worst, m);
  out(ctx) << "c_hat " << format_number(tc.c_hat) << ", " << tc.margins.size() << " holdout(s), max margin "
           << format_number(worst) << "\n";
  if (tc.overlapping > 0) out(ctx) << tc.overlapping << " holdout(s) coincide with calibration members\n";
  return {cpath.string(), mpath.string()};
}

std::vector<std::string> cmd_verify(const ExperimentConfig& cfg, const RunContext& ctx) {
  const OperatorFamily& fam = cfg.family;
  const int l = fam.rank();
  const fs::path dir = prepare_dir(cfg);
  std::vector<Check> checks;

  {
    const ExperimentConfig again = parse_config_string(serialize_config(cfg));
    checks.push_back({"config_round_trip", serialize_config(again) == serialize_config(cfg) ? 0.0 : 1.0, 0.0});
  }

  double round_trip = 0.0, env_bad = 0.0;
  for (const ArrayX& p : cfg.p_grid().points()) {
    const ArrayX q = q_of_p(fam, p);
    round_trip = std::max(round_trip, ((p_of_q(fam, q) - p).abs() / p).maxCoeff());
    const EnvelopeValue e = envelope(fam, p);
    if (!(e.lower_shape > 0 && std::isfinite(e.upper_shape) && e.upper_shape >= e.lower_shape)) env_bad += 1.0;
  }
  checks.push_back({"exponent_round_trip", round_trip, 1e-12});
  checks.push_back({"envelope_finite_ordered", env_bad, 0.0});

  const ArrayX u = uniform_axis(-4.0, 4.0, 801);
  const RealGrid g1 = sample_line(u, [](double x) { return std::exp(-x * x); });
  const RealGrid g2 = sample_line(u, [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; });
  const RealGrid g12 = tensor_product(std::vector<RealGrid>{g1, g2});
  double fact = 0.0, diag = 0.0, spike = 0.0, dil = 0.0;
  for (double p1 : {1.0, 1.5, 3.0, kInf})
    for (double p2 : {1.25, 2.0, 4.0}) {
      ArrayX p(2);
      p << p1, p2;
      fact = std::max(fact, rel(mixed_norm(g12, p), mixed_norm(g1, ArrayX::Constant(1, p1)) *
                                                        mixed_norm(g2, ArrayX::Constant(1, p2))));
      spike = std::max(spike, gls_norm(g12, PsiFunction::spike(p), PGrid({ArrayX::Constant(1, p1),
                                                                          ArrayX::Constant(1, p2)})) ==
                                      mixed_norm(g12, p)
                                  ? 0.0
                                  : 1.0);
      ArrayX lam(2);
      lam << 2.0, 0.5;
      const double expect = mixed_norm(g12, p) * std::pow(2.0, -1.0 / p1) * std::pow(0.5, -1.0 / p2);
      dil = std::max(dil, rel(mixed_norm(dilate(g12, lam), p), expect));
    }
  for (double p : {1.0, 1.5, 2.0, 7.0}) {
    ArrayX pp = ArrayX::Constant(2, p);
    const double flat = flat_norm(g12, p);
    diag = std::max(diag, rel(mixed_norm(g12, pp), flat));
  }
  checks.push_back({"mixed_norm_factorization", fact, 1e-10});
  checks.push_back({"diagonal_identity", diag, 1e-10});
  checks.push_back({"spike_reduction", spike, 0.0});
  checks.push_back({"norm_dilation", dil, 1e-10});

  if (fam.kind != FamilyKind::Mixture && fam.kind != FamilyKind::FourierSlowVary) {
    std::vector<ArrayX> axes(static_cast<std::size_t>(l), uniform_axis(-3.0, 3.0, 121));
    const TensorOperator op(fam, axes, ApplyOptions{{}, cfg.tolerance});
    const RealGrid f = gaussian_member(axes, 1.0);
    const RealGrid h = cutoff_member(axes, 0.5);
    const RealGrid mix(axes, 2.0 * f.values() + h.values());
    auto values = [&](const RealGrid& x) {
      return std::visit([](const auto& y) { return y.values().template cast<Complex>().eval(); }, op.apply(x));
    };
    const Eigen::ArrayXcd lhs = values(mix);
    const Eigen::ArrayXcd rhs = 2.0 * values(f) + values(h);
    checks.push_back({"operator_linearity", (lhs - rhs).abs().maxCoeff() / rhs.abs().maxCoeff(), 1e-12});
  }

  const fs::path vpath = dir / "verify.csv";
  std::ofstream os = open_out(vpath);
  CsvWriter w(os);
  stamp(w, "verify", cfg);
  w.header({"invariant", "value", "tolerance", "pass"});
  std::string first_failure;
  for (const Check& c : checks) {
    w.row(std::vector<std::string>{c.name, format_number(c.value), format_number(c.tolerance), c.pass() ? "1" : "0"});
    out(ctx) << (c.pass() ? "PASS " : "FAIL ") << c.name << " " << format_number(c.value) << " (tol "
             << format_number(c.tolerance) << ")\n";
    if (!c.pass() && first_failure.empty()) first_failure = c.name;
  }
  os.close();
  if (!first_failure.empty()) throw Error(ErrorKind::NonFiniteResult, "invariant failed: " + first_failure);
  return {vpath.string()};
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"anisonorm: exponent algebra, operator evaluation and norm estimation on tensor grids"};
  app.require_subcommand(1);
  std::string config_path, out_dir, input, output;
  int threads = 0;
  double tolerance = 0.0;
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides out_dir)");
  app.add_option("--threads", threads, "worker threads (default: ANISONORM_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerance, "quadrature tolerance (overrides tolerance)")->check(CLI::PositiveNumber);

  auto* exps = app.add_subcommand("exponents", "endpoint table and sampled (p, q, envelope)");
  auto* apply = app.add_subcommand("apply", "apply the operator to a grid function file");
  apply->add_option("--input", input, "input grid function")->required();
  apply->add_option("--output", output, "output grid function (default OUT/apply_output.grid)");
  auto* scan = app.add_subcommand("scan", "k-curve lower bounds and endpoint blow-up fit");
  auto* transfer = app.add_subcommand("transfer", "calibrate and check the Grand Lebesgue transfer");
  auto* verify = app.add_subcommand("verify", "invariant suite");
  for (auto* s : {exps, apply, scan, transfer, verify}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tolerance > 0) cfg.tolerance = tolerance;
    RunContext ctx;
    ctx.threads = resolve_threads(threads);
    ctx.log = &std::cout;
    std::vector<std::string> files;
    if (*exps) files = cmd_exponents(cfg, ctx);
    else if (*apply) files = cmd_apply(cfg, input, output, ctx);
    else if (*scan) files = cmd_scan(cfg, ctx);
    else if (*transfer) files = cmd_transfer(cfg, ctx);
    else files = cmd_verify(cfg, ctx);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace anisonorm
