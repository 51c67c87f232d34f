#include "l1predual/operators.hpp"

#include "l1predual/sampling.hpp"

#include <algorithm>

namespace l1predual {

Constants constants(const Rat& b) {
  if (!(b > 0) || !(b < Rat(1, 4)))
    throw ConfigError("b must lie strictly inside (0, 1/4); got " + rat_to_string(b));
  Constants c;
  c.rho = Rat(1, 2) * (Rat(1) + Rat(3) * b / (Rat(1) - b));
  c.lambda = Rat(1) / ((Rat(1) - c.rho) * (Rat(1) - b)) + Rat(1, 2);
  c.C = 2;
  return c;
}

ExtensionOperator ExtensionOperator::build(const ConstructionState& st, std::uint32_t n) {
  if (n < 2 || n > st.num_levels())
    throw std::invalid_argument("extension operator stage " + std::to_string(n) +
                                " outside built levels");
  ExtensionOperator T;
  T.stage_ = n;
  T.dim_ = st.level(n).interval.hi;
  T.cols_.assign(T.dim_, std::vector<Rat>(T.dim_, Rat(0)));
  // T_2: identity embedding on the first two intervals
  for (Coord i = 1; i <= st.level(2).interval.hi; ++i) T.cols_[i - 1][i - 1] = 1;
  for (std::uint32_t s = 3; s <= n; ++s) {
    const LevelData& lvl = st.level(s);
    Coord prev_hi = st.level(s - 1).interval.hi;
    for (Coord i = 1; i <= prev_hi; ++i) {
      auto& col = T.cols_[i - 1];
      // correction rows: -(1/2) gamma_j*(T_{s-1} e_i) at each j in Delta_s
      for (Coord j = lvl.interval.lo; j <= lvl.interval.hi; ++j) {
        const Functional& g = st.gamma(j);
        Rat v(0);
        for (const auto& [c, e] : g.coords)
          if (c <= prev_hi) v += st.powers()[e] * col[c - 1];
        col[j - 1] = -v / 2;
      }
    }
    for (Coord i = lvl.interval.lo; i <= lvl.interval.hi; ++i)
      T.cols_[i - 1][i - 1] = 1;
  }
  return T;
}

const Rat& ExtensionOperator::entry(Coord row, Coord col) const {
  if (row < 1 || row > dim_ || col < 1 || col > dim_)
    throw std::invalid_argument("extension operator entry out of range");
  return cols_[col - 1][row - 1];
}

std::vector<Rat> ExtensionOperator::composed_row(const ConstructionState& st,
                                                 const Functional& d, Coord pm_cut) const {
  std::vector<Rat> row(dim_, Rat(0));
  for (Coord i = 1; i <= dim_; ++i) {
    Rat v(0);
    for (const auto& [c, e] : d.coords) {
      if (c <= pm_cut) continue;  // killed by I - P_m
      if (c > dim_) break;
      v += st.powers()[e] * cols_[i - 1][c - 1];
    }
    row[i - 1] = std::move(v);
  }
  return row;
}

Rat ExtensionOperator::functional_norm(const ConstructionState& st, const Functional& d,
                                       Coord pm_cut) const {
  Rat sum(0);
  for (const Rat& v : composed_row(st, d, pm_cut)) sum += rat_abs(v);
  return sum;
}

SparseVector ExtensionOperator::apply(const SparseVector& x) const {
  std::vector<std::pair<Coord, Rat>> out;
  for (Coord j = 1; j <= dim_; ++j) {
    Rat v(0);
    for (const auto& [c, xv] : x.entries) {
      if (c > dim_) break;
      v += cols_[c - 1][j - 1] * xv;
    }
    if (v != 0) out.emplace_back(j, std::move(v));
  }
  return SparseVector::from_pairs(std::move(out));
}

SparseVector apply_extension(const ConstructionState& st, std::uint32_t n,
                             const SparseVector& x) {
  if (n < 2 || n > st.num_levels())
    throw std::invalid_argument("extension stage outside built levels");
  Coord dim = st.level(n).interval.hi;
  // dense accumulator driven level by level
  std::vector<Rat> y(dim, Rat(0));
  Coord cut2 = st.level(2).interval.hi;
  for (const auto& [c, v] : x.entries)
    if (c <= cut2) y[c - 1] = v;
  for (std::uint32_t s = 3; s <= n; ++s) {
    const LevelData& lvl = st.level(s);
    Coord prev_hi = st.level(s - 1).interval.hi;
    for (Coord j = lvl.interval.lo; j <= lvl.interval.hi; ++j) {
      const Functional& g = st.gamma(j);
      Rat corr(0);
      for (const auto& [c, e] : g.coords)
        if (c <= prev_hi) corr += st.powers()[e] * y[c - 1];
      y[j - 1] = x.at(j) - corr / 2;
    }
  }
  std::vector<std::pair<Coord, Rat>> out;
  for (Coord j = 1; j <= dim; ++j)
    if (y[j - 1] != 0) out.emplace_back(j, std::move(y[j - 1]));
  return SparseVector::from_pairs(std::move(out));
}

Report compatibility_check(const ConstructionState& st, std::uint32_t n) {
  Report rep;
  CheckResult c{.id = "operators.compatibility"};
  std::vector<ExtensionOperator> T;
  for (std::uint32_t m = 2; m <= n; ++m) T.push_back(ExtensionOperator::build(st, m));
  const ExtensionOperator& Tn = T.back();
  std::uint64_t compared = 0;
  for (std::uint32_t m = 2; m <= n && c.pass; ++m) {
    const ExtensionOperator& Tm = T[m - 2];
    Coord mc = Tm.dim();
    for (Coord i = 1; i <= Tn.dim() && c.pass; ++i) {
      for (Coord j = 1; j <= mc; ++j) {
        // (P_m T_n e_i)(j) vs (T_m pi_m e_i)(j)
        const Rat& lhs = Tn.entry(j, i);
        Rat rhs = i <= mc ? Tm.entry(j, i) : Rat(0);
        ++compared;
        if (lhs != rhs) {
          c.pass = false;
          c.detail = "P_" + std::to_string(m) + " T_" + std::to_string(n) + " e_" +
                     std::to_string(i) + " differs from T_" + std::to_string(m) +
                     " pi_" + std::to_string(m) + " e_" + std::to_string(i) + " at row " +
                     std::to_string(j) + ": " + rat_to_string(lhs) + " vs " +
                     rat_to_string(rhs);
          break;
        }
      }
    }
  }
  if (c.pass) c.detail = std::to_string(compared) + " entries compared";
  rep.add(std::move(c));
  return rep;
}

Report verify_dual_properties(const ConstructionState& st, std::uint32_t n) {
  Report rep;
  Constants cs = constants(st.b());
  ExtensionOperator Tn = ExtensionOperator::build(st, n);
  Rat bound1 = Rat(1) + cs.lambda / 2;
  Rat bound2 = Rat(1) + Rat(3) * cs.lambda / 2;
  Rat bound3 = bound2 / (Rat(1) - st.b());

  CheckResult c1{.id = "operators.bound.1", .rhs = rat_to_string(bound1)};
  CheckResult c2{.id = "operators.bound.2", .rhs = rat_to_string(bound2)};
  CheckResult c3{.id = "operators.bound.3", .rhs = rat_to_string(bound3)};
  CheckResult c4{.id = "operators.bound.4", .rhs = rat_to_string(cs.lambda)};
  Rat worst1(0), worst2(0), worst3(0), worst4(0);

  std::vector<Coord> cuts;  // P_0 = 0 and each built stage m <= n
  cuts.push_back(0);
  for (std::uint32_t m = 1; m <= n; ++m) cuts.push_back(st.level(m).interval.hi);

  for (std::uint32_t lev = 1; lev <= st.num_levels(); ++lev) {
    const LevelData& lvl = st.level(lev);
    for (std::uint64_t idx = 0; idx < lvl.members.size(); ++idx) {
      const Functional& d = lvl.members[idx];
      Rat norm_plain = Tn.functional_norm(st, d, 0);
      std::string at = " at level " + std::to_string(lev) + " index " + std::to_string(idx);
      if (lev <= n) {
        worst1 = std::max(worst1, norm_plain);
        if (norm_plain > bound1 && c1.pass) {
          c1.pass = false;
          c1.detail = rat_to_string(norm_plain) + " > " + rat_to_string(bound1) + at;
        }
      }
      worst4 = std::max(worst4, norm_plain);
      if (norm_plain > cs.lambda && c4.pass) {
        c4.pass = false;
        c4.detail = rat_to_string(norm_plain) + " > lambda" + at;
      }
      for (std::size_t mi = 0; mi < cuts.size(); ++mi) {
        Rat norm_m = mi == 0 ? norm_plain : Tn.functional_norm(st, d, cuts[mi]);
        if (lev <= n) {
          worst2 = std::max(worst2, norm_m);
          if (norm_m > bound2 && c2.pass) {
            c2.pass = false;
            c2.detail = rat_to_string(norm_m) + " > " + rat_to_string(bound2) + at +
                        " with m = " + std::to_string(mi);
          }
        }
        worst3 = std::max(worst3, norm_m);
        if (norm_m > bound3 && c3.pass) {
          c3.pass = false;
          c3.detail = rat_to_string(norm_m) + " > " + rat_to_string(bound3) + at +
                      " with m = " + std::to_string(mi);
        }
      }
    }
  }
  c1.lhs = rat_to_string(worst1);
  c2.lhs = rat_to_string(worst2);
  c3.lhs = rat_to_string(worst3);
  c4.lhs = rat_to_string(worst4);
  rep.add(std::move(c1));
  rep.add(std::move(c2));
  rep.add(std::move(c3));
  rep.add(std::move(c4));
  return rep;
}

LowerEstimate lower_estimate_check(const ConstructionState& st, std::uint32_t n,
                                   const SparseVector& x) {
  if (x.is_zero()) throw std::invalid_argument("lower estimate needs ||x||_inf = 1");
  if (x.linf() != 1) throw std::invalid_argument("lower estimate needs ||x||_inf = 1");
  if (x.max_coord() > st.level(n).interval.hi)
    throw std::invalid_argument("pattern support exceeds stage " + std::to_string(n));
  // the smallest coordinate where |x| attains 1 drives the case split
  Coord i0 = 0;
  for (const auto& [c, v] : x.entries)
    if (rat_abs(v) == 1) {
      i0 = c;
      break;
    }
  std::uint32_t L = st.level_of_coord(i0);
  LowerEstimate out;
  if (L <= 2) {
    out.d = st.unit_ref(i0);
    out.I = {1, st.level(n).interval.hi};
    out.value = 1;  // e_{i0}*(T_n x) = x(i0) by compatibility
    return out;
  }
  const Functional& g = st.gamma(i0);
  SparseVector prior = apply_extension(st, L - 1, x);
  Rat v = evaluate(st, g, prior);  // gamma_{i0}*(T_{L-1} pi_{L-1} x)
  out.d = st.gamma_ref(i0);
  if (rat_abs(v) >= 1) {
    out.I = {1, st.level(L - 1).interval.hi};
    out.value = rat_abs(v);
  } else {
    out.I = {1, st.level(L).interval.hi};
    out.value = rat_abs(x.at(i0) + v / 2);
  }
  return out;
}

SparseVector b_star(const ConstructionState& st, Coord i) {
  std::uint32_t n = st.level_of_coord(i);
  if (n <= 2) return SparseVector::unit(i);
  const Functional& g = st.gamma(i);
  Coord cut = st.level(n - 1).interval.hi;
  std::vector<std::pair<Coord, Rat>> coords;
  for (const auto& [c, e] : g.coords)
    if (c <= cut) coords.emplace_back(c, st.powers()[e] / 2);
  coords.emplace_back(i, Rat(1));
  return SparseVector::from_pairs(std::move(coords));
}

Report biorthogonality_check(const ConstructionState& st, std::uint32_t n) {
  Report rep;
  CheckResult c{.id = "operators.biorthogonality"};
  ExtensionOperator Tn = ExtensionOperator::build(st, n);
  Coord dim = Tn.dim();
  std::uint64_t compared = 0;
  for (Coord i = 1; i <= dim && c.pass; ++i) {
    SparseVector bi = b_star(st, i);
    for (Coord j = 1; j <= dim; ++j) {
      Rat v(0);
      for (const auto& [c2, coef] : bi.entries) v += coef * Tn.entry(c2, j);
      Rat want = i == j ? Rat(1) : Rat(0);
      ++compared;
      if (v != want) {
        c.pass = false;
        c.detail = "b_" + std::to_string(i) + "*(T_" + std::to_string(n) + " e_" +
                   std::to_string(j) + ") = " + rat_to_string(v);
        break;
      }
    }
  }
  if (c.pass) c.detail = std::to_string(compared) + " pairings checked";
  rep.add(std::move(c));
  return rep;
}

L1EquivalenceResult l1_equivalence_check(const ConstructionState& st, std::uint32_t n,
                                         const SparseVector& a,
                                         const L1EquivalenceOptions& opts) {
  Coord dim = st.level(n).interval.hi;
  if (a.max_coord() > dim)
    throw std::invalid_argument("coefficients exceed stage " + std::to_string(n));
  Constants cs = constants(st.b());
  L1EquivalenceResult out;
  out.coefficient_sum = a.l1();
  out.pairing_value = 0;
  out.norm_certified = false;
  out.norm_upper = 0;
  out.dual_lower_threshold = out.coefficient_sum / cs.lambda;
  if (a.is_zero()) {
    out.norm_certified = true;
    CheckResult c{.id = "operators.l1_equivalence.upper", .detail = "degenerate: a = 0"};
    out.sampled_upper.add(std::move(c));
    return out;
  }

  // lower certificate: x = T_n(sign pattern of a); biorthogonality gives
  // (sum a_i b_i*)(x) = sum |a_i| exactly
  std::vector<std::pair<Coord, Rat>> sign_entries;
  for (const auto& [c, v] : a.entries) sign_entries.emplace_back(c, v > 0 ? Rat(1) : Rat(-1));
  SparseVector x = apply_extension(st, n, SparseVector::from_pairs(std::move(sign_entries)));
  for (const auto& [i, ai] : a.entries) {
    SparseVector bi = b_star(st, i);
    Rat v(0);
    for (const auto& [c, coef] : bi.entries) v += coef * x.at(c);
    out.pairing_value += ai * v;
  }
  if (dim <= opts.max_dp_coordinates) {
    NormBracket br = norm_bracket(st, x, opts.bracket);
    out.norm_upper = br.upper;
    out.norm_certified = br.upper <= cs.lambda;
  }

  // sampled necessary condition for the upper inequality
  CheckResult c{.id = "operators.l1_equivalence.upper"};
  Rat cap = (cs.C / 2 + 1) * out.coefficient_sum;
  SampleGen gen(opts.seed);
  std::uint64_t done = 0;
  for (std::uint64_t t = 0; t < opts.samples && c.pass; ++t) {
    std::vector<std::pair<Coord, Rat>> entries;
    std::size_t support = 1 + gen.bounded(5);
    for (std::size_t s = 0; s < support; ++s)
      entries.emplace_back(1 + gen.bounded(dim), gen.small_rat());
    SparseVector y;
    try {
      y = SparseVector::from_pairs(std::move(entries));
    } catch (const std::invalid_argument&) {
      continue;  // duplicate coordinate draw; skip deterministically
    }
    if (y.is_zero()) continue;
    NormBracket br = norm_bracket(st, y, opts.bracket);
    if (br.upper == 0) continue;
    SparseVector scaled = y.scaled(Rat(1) / br.upper);  // ||scaled|| <= 1 certified
    Rat v(0);
    for (const auto& [i, ai] : a.entries) {
      SparseVector bi = b_star(st, i);
      Rat w(0);
      for (const auto& [cc, coef] : bi.entries) w += coef * scaled.at(cc);
      v += ai * w;
    }
    if (rat_abs(v) > cap) {
      c.pass = false;
      c.detail = "|(sum a_i b_i*)(y)| = " + rat_to_string(rat_abs(v)) + " > " +
                 rat_to_string(cap) + " for y = " + scaled.to_string();
    }
    ++done;
  }
  if (c.pass) c.detail = std::to_string(done) + " samples checked";
  out.sampled_upper.add(std::move(c));
  return out;
}

}  // namespace l1predual
