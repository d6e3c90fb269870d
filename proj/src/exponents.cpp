#include "anisonorm/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace anisonorm {

namespace {

bool is_riesz(BlockKind k) {
  return k == BlockKind::Riesz || k == BlockKind::RieszInterior || k == BlockKind::RieszExterior;
}

bool is_fourier(BlockKind k) { return k == BlockKind::Fourier || k == BlockKind::FourierSlowVary; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void add(std::vector<Violation>& out, int j, const std::string& cond, const std::string& detail) {
  out.push_back({j, cond, detail});
}

// Parameter conditions that do not depend on p.
void check_params(const OperatorFamily& fam, int j, std::vector<Violation>& out,
                  std::vector<CompatibilityCheck>& compat) {
  const BlockParams& b = fam.blocks[j];
  const BlockKind k = fam.block_kind(j);
  const double m = b.m;
  if (b.m < 1) add(out, j, "m>=1", "m=" + std::to_string(b.m));
  if (!std::isfinite(b.alpha) || !std::isfinite(b.beta)) add(out, j, "finite parameters", "");

  if (is_riesz(k)) {
    if (!b.gamma) {
      add(out, j, "gamma present", "Riesz blocks need gamma");
      return;
    }
    const double g = *b.gamma;
    if (!(b.alpha >= 0)) add(out, j, "alpha>=0", "alpha=" + fmt(b.alpha));
    if (!(b.beta >= 0)) add(out, j, "beta>=0", "beta=" + fmt(b.beta));
    if (!(g >= 0)) add(out, j, "gamma>=0", "gamma=" + fmt(g));
    if (!(b.alpha + g < m)) add(out, j, "alpha+gamma<m", "alpha+gamma=" + fmt(b.alpha + g));
  } else if (k == BlockKind::LogRiesz) {
    if (!(b.alpha > 0 && b.alpha < m)) add(out, j, "0<alpha<m", "alpha=" + fmt(b.alpha));
    if (!b.delta || !(*b.delta > 0)) add(out, j, "delta>0", b.delta ? "delta=" + fmt(*b.delta) : "missing");
    const std::string id = b.slow_vary_id.value_or("one");
    const SlowlyVarying* s = find_slowly_varying(id);
    if (!s) add(out, j, "slow_vary registered", "unknown id '" + id + "'");
    else if (!check_slow_variation(s->fn).passes) add(out, j, "S slowly varying", id);
  } else if (is_fourier(k)) {
    if (!(b.alpha >= 0)) add(out, j, "alpha>=0", "alpha=" + fmt(b.alpha));
    if (!(b.beta >= 0 && b.beta < m)) add(out, j, "0<=beta<m", "beta=" + fmt(b.beta));
    if (k == BlockKind::FourierSlowVary) {
      const auto [lid, mid] = split_pair_id(b.slow_vary_id.value_or("one"));
      const SlowlyVarying* l = find_slowly_varying(lid);
      const SlowlyVarying* mm = find_slowly_varying(mid);
      if (!l || !mm) {
        add(out, j, "slow_vary registered", "unknown pair '" + lid + ":" + mid + "'");
      } else {
        const CompatibilityCheck c = check_compatibility(l->fn, mm->fn);
        compat.push_back(c);
        if (!c.bounded)
          add(out, j, "M(z)~L(1/z)",
              "ratio range [" + fmt(c.ratio_min) + ", " + fmt(c.ratio_max) + "] not bounded");
      }
    }
  } else if (k == BlockKind::Mixture) {
    if (!b.gamma) {
      add(out, j, "gamma present", "mixture blocks need gamma");
      return;
    }
    const double g = *b.gamma;
    if (!(b.alpha >= 0)) add(out, j, "alpha>=0", "alpha=" + fmt(b.alpha));
    if (!(b.beta >= 0 && b.beta < m)) add(out, j, "0<=beta<m", "beta=" + fmt(b.beta));
    if (!(b.alpha - g > 0)) add(out, j, "alpha-gamma>0", "alpha-gamma=" + fmt(b.alpha - g));
    if (!(g < m)) add(out, j, "gamma<m", "gamma=" + fmt(g));
    if (!(b.alpha + b.beta > g)) add(out, j, "alpha+beta>gamma", "");
  }
}

BlockRange block_range(const OperatorFamily& fam, int j) {
  const BlockParams& b = fam.blocks[j];
  const BlockKind k = fam.block_kind(j);
  const double m = b.m, a = b.alpha, be = b.beta, g = b.gamma.value_or(0.0);
  BlockRange r;
  if (is_riesz(k)) {
    r.p_minus = m / (m - a);
    r.p_plus = m / (m - a - g);
    r.q_minus = from_recip((be + g) / m);
    r.q_plus = from_recip(be / m);
    r.kappa = (a + be + g) / m;
    if (k == BlockKind::RieszInterior) r.p_minus = 1.0;
    if (k == BlockKind::RieszExterior) r.p_plus = kInf;
  } else if (k == BlockKind::LogRiesz) {
    r.p_minus = 1.0;
    r.p_plus = m / a;
    r.q_minus = m / (m - a);
    r.q_plus = kInf;
    r.kappa = 1.0 + b.delta.value_or(0.0) - a / m;
  } else if (is_fourier(k)) {
    r.p_minus = m / (m - be);
    r.p_plus = kInf;
    r.q_minus = 1.0;
    r.q_plus = from_recip(a / m);
    r.kappa = (a + be) / m;
  } else {
    r.p_minus = m / (m - be);
    r.p_plus = kInf;
    r.q_minus = 1.0;
    r.q_plus = from_recip((a - g) / m);
    r.kappa = (a + be - g) / m;
  }
  const BlockRelation rel = block_relation(fam, j);
  const double s1 = rel.offset + rel.sign * recip(r.p_minus);
  const double s2 = rel.offset + rel.sign * recip(r.p_plus);
  r.q_image_lo = from_recip(std::max(s1, s2));
  r.q_image_hi = from_recip(std::min(s1, s2));
  return r;
}

}  // namespace

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::RieszFull: return "RieszFull";
    case FamilyKind::RieszInterior: return "RieszInterior";
    case FamilyKind::RieszExterior: return "RieszExterior";
    case FamilyKind::LogRiesz: return "LogRiesz";
    case FamilyKind::FourierWeighted: return "FourierWeighted";
    case FamilyKind::FourierSlowVary: return "FourierSlowVary";
    case FamilyKind::Composed: return "Composed";
    case FamilyKind::Mixture: return "Mixture";
  }
  return "";
}

std::optional<FamilyKind> parse_family_kind(const std::string& name) {
  for (FamilyKind k : {FamilyKind::RieszFull, FamilyKind::RieszInterior, FamilyKind::RieszExterior,
                       FamilyKind::LogRiesz, FamilyKind::FourierWeighted, FamilyKind::FourierSlowVary,
                       FamilyKind::Composed, FamilyKind::Mixture})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

int OperatorFamily::total_dim() const {
  int d = 0;
  for (const auto& b : blocks) d += b.m;
  return d;
}

BlockKind OperatorFamily::block_kind(int j) const {
  switch (kind) {
    case FamilyKind::RieszFull: return BlockKind::Riesz;
    case FamilyKind::RieszInterior: return BlockKind::RieszInterior;
    case FamilyKind::RieszExterior: return BlockKind::RieszExterior;
    case FamilyKind::LogRiesz: return BlockKind::LogRiesz;
    case FamilyKind::FourierWeighted: return BlockKind::Fourier;
    case FamilyKind::FourierSlowVary: return BlockKind::FourierSlowVary;
    case FamilyKind::Mixture: return BlockKind::Mixture;
    case FamilyKind::Composed:
      return std::find(fourier_blocks.begin(), fourier_blocks.end(), j) != fourier_blocks.end()
                 ? BlockKind::Fourier
                 : BlockKind::Riesz;
  }
  return BlockKind::Riesz;
}

void validate_structure(const OperatorFamily& fam) {
  if (fam.blocks.empty()) throw Error(ErrorKind::InvalidArgument, "family needs at least one block");
  if (fam.kind == FamilyKind::Composed) {
    if (fam.riesz_blocks.empty() || fam.fourier_blocks.empty())
      throw Error(ErrorKind::InvalidArgument, "composed family needs non-empty Riesz and Fourier parts");
    std::set<int> seen;
    for (const auto& part : {fam.riesz_blocks, fam.fourier_blocks})
      for (int j : part) {
        if (j < 0 || j >= fam.rank())
          throw Error(ErrorKind::InvalidArgument, "partition index " + std::to_string(j + 1) + " out of range");
        if (!seen.insert(j).second)
          throw Error(ErrorKind::InvalidArgument, "partition index " + std::to_string(j + 1) + " repeated");
      }
    if (static_cast<int>(seen.size()) != fam.rank())
      throw Error(ErrorKind::InvalidArgument, "partition does not cover every block");
  }
  if ((fam.kind == FamilyKind::RieszInterior || fam.kind == FamilyKind::RieszExterior) &&
      !(fam.domain_radius > 0 && std::isfinite(fam.domain_radius)))
    throw Error(ErrorKind::InvalidArgument, "domain radius must be positive");
}

BlockRelation block_relation(const OperatorFamily& fam, int j) {
  const BlockParams& b = fam.blocks[j];
  const BlockKind k = fam.block_kind(j);
  const double m = b.m, g = b.gamma.value_or(0.0);
  if (is_riesz(k)) return {(b.alpha + b.beta + g) / m - 1.0, 1.0};
  if (k == BlockKind::LogRiesz) return {-b.alpha / m, 1.0};
  if (is_fourier(k)) return {1.0 - (b.beta - b.alpha) / m, -1.0};
  return {1.0 - (b.beta + g - b.alpha) / m, -1.0};
}

std::vector<BlockRange> endpoints(const OperatorFamily& fam) {
  validate_structure(fam);
  std::vector<BlockRange> out;
  for (int j = 0; j < fam.rank(); ++j) out.push_back(block_range(fam, j));
  return out;
}

std::vector<Violation> parameter_violations(const OperatorFamily& fam) {
  validate_structure(fam);
  std::vector<Violation> out;
  std::vector<CompatibilityCheck> compat;
  for (int j = 0; j < fam.rank(); ++j) check_params(fam, j, out, compat);
  return out;
}

std::pair<double, double> admissible_p_interval(const OperatorFamily& fam, int j) {
  const BlockRange rg = block_range(fam, j);
  const BlockRelation rel = block_relation(fam, j);
  const BlockKind k = fam.block_kind(j);
  const BlockParams& b = fam.blocks[static_cast<std::size_t>(j)];
  // r = 1/p in (rlo, rhi); s = offset + sign r.
  double rlo = std::max(0.0, recip(rg.p_plus)), rhi = std::min(1.0, recip(rg.p_minus));
  auto s_above = [&](double c) {  // s > c
    if (rel.sign > 0) rlo = std::max(rlo, c - rel.offset);
    else rhi = std::min(rhi, rel.offset - c);
  };
  auto s_below = [&](double c) {  // s < c
    if (rel.sign > 0) rhi = std::min(rhi, c - rel.offset);
    else rlo = std::max(rlo, rel.offset - c);
  };
  s_above(0.0);
  s_below(1.0);
  if (is_fourier(k)) s_above(b.alpha / b.m);
  if (k == BlockKind::Mixture) s_above((b.alpha - b.gamma.value_or(0.0)) / b.m);
  // p <= q: r >= s.
  if (rel.sign > 0) {
    if (rel.offset > 0) rhi = -1.0;
  } else {
    rlo = std::max(rlo, rel.offset / 2.0);
  }
  if (!(rhi > rlo)) return {1.0, 1.0};
  return {from_recip(rhi), from_recip(rlo)};
}

AdmissibilityReport admissible(const OperatorFamily& fam, const ArrayX& p, double margin) {
  AdmissibilityReport rep;
  try {
    validate_structure(fam);
  } catch (const Error& e) {
    add(rep.violations, -1, "family structure", e.what());
    return rep;
  }
  if (p.size() != fam.rank()) {
    add(rep.violations, -1, "length(p)=l",
        "got " + std::to_string(p.size()) + ", expected " + std::to_string(fam.rank()));
    return rep;
  }
  rep.q = ArrayX::Constant(fam.rank(), std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < fam.rank(); ++j) {
    const std::size_t before = rep.violations.size();
    check_params(fam, j, rep.violations, rep.compatibility);
    if (rep.violations.size() != before) continue;

    const BlockKind k = fam.block_kind(j);
    const BlockRange rg = block_range(fam, j);
    const double pj = p[j];
    if (std::isnan(pj) || !(pj > 1.0)) {
      add(rep.violations, j, "p>1", "p=" + fmt(pj));
      continue;
    }
    // Range checks in 1/p coordinates so that p = inf is handled uniformly.
    const double r = recip(pj);
    if (!(r < recip(rg.p_minus) - margin))
      add(rep.violations, j, "p>p_-", "p=" + fmt(pj) + ", p_-=" + fmt(rg.p_minus));
    if (!(r > recip(rg.p_plus) + margin))
      add(rep.violations, j, "p<p_+", "p=" + fmt(pj) + ", p_+=" + fmt(rg.p_plus));

    const BlockRelation rel = block_relation(fam, j);
    const double s = rel.offset + rel.sign * r;
    const double qj = s >= 0 ? from_recip(s) : std::numeric_limits<double>::quiet_NaN();
    rep.q[j] = qj;
    const std::string qs = "q=" + (s >= 0 ? fmt(qj) : "undefined (1/q=" + fmt(s) + ")");
    if (s < 0) add(rep.violations, j, "1/q>=0", qs);
    if (is_fourier(k)) {
      if (!(s > 0)) add(rep.violations, j, "q<inf", qs);
      if (!(fam.blocks[j].alpha / fam.blocks[j].m < s)) add(rep.violations, j, "alpha<m/q", qs);
    }
    if (k == BlockKind::Mixture) {
      const double g = *fam.blocks[j].gamma;
      if (!(s > (fam.blocks[j].alpha - g) / fam.blocks[j].m)) add(rep.violations, j, "q<q~_+", qs);
    }
    if (!(s < 1.0)) add(rep.violations, j, "q>1", qs);
    // p <= q; the comparison r >= s is done with a relative slack for the equality flag.
    if (r < s - 1e-14) add(rep.violations, j, "p<=q", "p=" + fmt(pj) + ", " + qs);
    else if (std::abs(r - s) <= 1e-14) rep.equality_blocks.push_back(j);
  }
  rep.pass = rep.violations.empty();
  return rep;
}

std::string AdmissibilityReport::summary() const {
  if (pass) return "admissible";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const Violation& v = violations[i];
    if (i) os << "; ";
    if (v.block >= 0) os << "block " << v.block + 1 << ": ";
    os << v.condition;
    if (!v.detail.empty()) os << " (" << v.detail << ")";
  }
  return os.str();
}

ArrayX q_of_p(const OperatorFamily& fam, const ArrayX& p, double margin) {
  const AdmissibilityReport rep = admissible(fam, p, margin);
  if (!rep.pass) throw Error(ErrorKind::InadmissibleP, rep.summary());
  return rep.q;
}

ArrayX p_of_q(const OperatorFamily& fam, const ArrayX& q) {
  validate_structure(fam);
  if (q.size() != fam.rank()) throw Error(ErrorKind::InvalidArgument, "q has wrong length");
  ArrayX p(fam.rank());
  for (int j = 0; j < fam.rank(); ++j) {
    const BlockRelation rel = block_relation(fam, j);
    const double target = recip(q[j]);
    auto g = [&](double r) { return rel.offset + rel.sign * r - target; };
    double lo = 0.0, hi = 1.0;
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) {
      p[j] = kInf;
      continue;
    }
    if ((glo > 0) == (ghi > 0) && ghi != 0.0) {
      p[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm > 0) == (glo > 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    p[j] = from_recip(0.5 * (lo + hi));
  }
  return p;
}

EnvelopeValue envelope(const OperatorFamily& fam, const ArrayX& p, double margin) {
  const AdmissibilityReport rep = admissible(fam, p, margin);
  if (!rep.pass) throw Error(ErrorKind::InadmissibleP, rep.summary());
  double log_lo = 0.0, log_hi = 0.0;
  for (int j = 0; j < fam.rank(); ++j) {
    const BlockKind k = fam.block_kind(j);
    const BlockRange rg = block_range(fam, j);
    const BlockParams& b = fam.blocks[j];
    const double pj = p[j];
    if (k == BlockKind::Riesz) {
      const double v = -rg.kappa * (std::log(rg.p_plus - pj) + std::log(pj - rg.p_minus));
      log_lo += v;
      log_hi += v;
    } else if (k == BlockKind::RieszInterior) {
      const double v = -rg.kappa * std::log(rg.p_plus - pj);
      log_lo += v;
      log_hi += v;
    } else if (k == BlockKind::RieszExterior) {
      const double v = -rg.kappa * std::log(pj - rg.p_minus);
      log_lo += v;
      log_hi += v;
    } else if (k == BlockKind::LogRiesz) {
      const double v = -rg.kappa * (std::log(pj - 1.0) + std::log(b.m / b.alpha - pj));
      log_lo += v;
      log_hi += v;
    } else {
      // p / (p - p_-) written as 1 / (1 - p_- / p) so that p = inf gives 1.
      const double base = -std::log1p(-rg.p_minus * recip(pj));
      log_lo += rg.kappa * base;
      log_hi += std::max(1.0, rg.kappa) * base;
    }
  }
  return {std::exp(log_lo), std::exp(log_hi)};
}

}  // namespace anisonorm
