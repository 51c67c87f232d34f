#include "l1predual/norms.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace l1predual {

SparseVector SparseVector::from_pairs(std::vector<std::pair<Coord, Rat>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v;
  for (auto& [c, val] : pairs) {
    if (c < 1) throw std::invalid_argument("vector coordinates must be >= 1");
    if (val == 0) continue;
    if (!v.entries.empty() && v.entries.back().first == c)
      throw std::invalid_argument("duplicate vector coordinate " + std::to_string(c));
    v.entries.emplace_back(c, std::move(val));
  }
  return v;
}

Rat SparseVector::at(Coord c) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), c,
                             [](const auto& p, Coord v) { return p.first < v; });
  if (it == entries.end() || it->first != c) return Rat(0);
  return it->second;
}

Rat SparseVector::linf() const {
  Rat m(0);
  for (const auto& [c, v] : entries) m = std::max(m, rat_abs(v));
  return m;
}

Rat SparseVector::l1() const {
  Rat s(0);
  for (const auto& [c, v] : entries) s += rat_abs(v);
  return s;
}

SparseVector SparseVector::scaled(const Rat& factor) const {
  SparseVector out;
  if (factor == 0) return out;
  out.entries.reserve(entries.size());
  for (const auto& [c, v] : entries) out.entries.emplace_back(c, v * factor);
  return out;
}

SparseVector SparseVector::plus(const SparseVector& other) const {
  SparseVector out;
  std::size_t i = 0, j = 0;
  while (i < entries.size() || j < other.entries.size()) {
    if (j == other.entries.size() ||
        (i < entries.size() && entries[i].first < other.entries[j].first)) {
      out.entries.push_back(entries[i++]);
    } else if (i == entries.size() || other.entries[j].first < entries[i].first) {
      out.entries.push_back(other.entries[j++]);
    } else {
      Rat s = entries[i].second + other.entries[j].second;
      if (s != 0) out.entries.emplace_back(entries[i].first, std::move(s));
      ++i;
      ++j;
    }
  }
  return out;
}

std::string SparseVector::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ",";
    os << entries[i].first << ":" << rat_to_string(entries[i].second);
  }
  return os.str();
}

Rat evaluate(const ConstructionState& st, const Functional& f, const SparseVector& x) {
  Rat acc(0);
  std::size_t i = 0, j = 0;
  while (i < f.coords.size() && j < x.entries.size()) {
    if (f.coords[i].first < x.entries[j].first) {
      ++i;
    } else if (x.entries[j].first < f.coords[i].first) {
      ++j;
    } else {
      acc += st.powers()[f.coords[i].second] * x.entries[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

Rat evaluate(const ConstructionState& st, FuncRef ref, const SparseVector& x) {
  return evaluate(st, st.functional(ref), x);
}

Rat RestrictedFunctional::operator()(const SparseVector& x) const {
  Rat acc(0);
  std::size_t i = 0, j = 0;
  while (i < coords.size() && j < x.entries.size()) {
    if (coords[i].first < x.entries[j].first) {
      ++i;
    } else if (x.entries[j].first < coords[i].first) {
      ++j;
    } else {
      acc += coords[i].second * x.entries[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

RestrictedFunctional restrict_functional(const ConstructionState& st, FuncRef ref,
                                         Interval I) {
  const Functional& f = st.functional(ref);
  RestrictedFunctional out;
  out.origin = ref;
  out.interval = I;
  for (const auto& [c, e] : f.coords)
    if (I.contains(c)) out.coords.emplace_back(c, st.powers()[e]);
  return out;
}

bool RestrictionClosure::contains(
    const std::vector<std::pair<Coord, Exponent>>& f) const {
  return std::binary_search(members.begin(), members.end(), f);
}

RestrictionClosure enumerate_restrictions(const ConstructionState& st, Coord M,
                                          Exponent K, std::size_t member_cap) {
  if (M < 1 || M > st.max_coordinate())
    throw std::invalid_argument("closure horizon exceeds built coordinates");
  using Member = std::vector<std::pair<Coord, Exponent>>;
  Family fam = construction_family();

  std::set<Member> seen;
  std::vector<Member> worklist;
  auto add = [&](Member m) {
    if (m.empty()) return;
    if (seen.insert(m).second) {
      if (seen.size() > member_cap)
        throw ConfigError("restriction closure exceeds the member cap at horizon " +
                          std::to_string(M));
      worklist.push_back(std::move(m));
    }
  };

  for (Coord i = 1; i <= M; ++i) add({{i, 0}});
  for (std::uint32_t n = 1; n <= st.num_levels(); ++n)
    for (const Functional& d : st.level(n).members) {
      Member m;
      for (const auto& [c, e] : d.coords)
        if (c <= M && e <= K) m.emplace_back(c, e);
      add(std::move(m));
    }

  auto body_admissible = [&](const FiniteSet& body) {
    return fam.member(body) && !fam.is_maximal(body);
  };

  // synthesis f = f1 + b (f2|J) with J an interval above supp f1; the slice
  // of f2 is any contiguous run of its support above max supp f1
  auto combine = [&](const Member& f1, const Member& f2) {
    Coord base = f1.back().first;
    std::size_t lo = 0;
    while (lo < f2.size() && f2[lo].first <= base) ++lo;
    for (std::size_t i = lo; i < f2.size(); ++i) {
      Member acc = f1;
      FiniteSet body;
      for (const auto& [c, e] : f1) body.push_back(c);
      for (std::size_t j = i; j < f2.size(); ++j) {
        body.push_back(f2[j].first);
        if (f2[j].second + 1 <= K) acc.emplace_back(f2[j].first, f2[j].second + 1);
        if (body_admissible(body) && acc.size() > f1.size()) add(acc);
      }
    }
  };

  while (!worklist.empty()) {
    Member f = std::move(worklist.back());
    worklist.pop_back();
    // pair f against everything currently known, in both roles
    std::vector<Member> snapshot(seen.begin(), seen.end());
    for (const Member& g : snapshot) {
      combine(f, g);
      combine(g, f);
    }
  }

  RestrictionClosure out;
  out.horizon = M;
  out.depth = K;
  out.members.assign(seen.begin(), seen.end());
  out.tail_bound = Rat(static_cast<unsigned long>(M + 2)) * st.powers()[K + 1];
  return out;
}

Rat schreier_l1_bound(const SparseVector& x) {
  const auto& ent = x.entries;
  Rat best(0);
  for (std::size_t m = 0; m < ent.size(); ++m) {
    // G with min coordinate ent[m].first: that point plus at most
    // (coordinate + 1) further points above it
    std::vector<Rat> above;
    for (std::size_t j = m + 1; j < ent.size(); ++j) above.push_back(rat_abs(ent[j].second));
    std::sort(above.begin(), above.end(), std::greater<Rat>());
    Rat sum = rat_abs(ent[m].second);
    std::uint64_t budget = ent[m].first + 1;
    for (std::size_t j = 0; j < above.size() && j < budget; ++j) sum += above[j];
    best = std::max(best, sum);
  }
  return best;
}

namespace {

// Dynamic program over visible candidate patterns. A full coefficient
// pattern of a member of D starts at exponent 0, ends at exponent 0, and
// descends only in unit steps; restricted to supp x the hidden support
// points cost budget (support size <= min support + 2) and need free
// integer slots between the used coordinates. Exponents above the depth K
// collapse into one symbolic "deep" value whose contribution is bounded by
// b^{K+1} in the favorable direction and by 0 otherwise, with the bridge
// accounting of the shallowest deep exponent K+1; no additive tail is
// needed, so the bound stays exact for unit vectors and subadditive.
struct CandidateDp {
  const std::vector<std::pair<Coord, Rat>>& ent;
  Exponent K;                 // deep symbol is exponent index K+1
  std::vector<Rat> pow;       // b^0..b^{K+1}
  std::size_t slack_cap = 0;

  // best[i][a][s]: maximal signed sum over patterns ending at used index i
  // with exponent symbol a and remaining budget slack s (capped)
  std::vector<std::vector<std::vector<std::optional<Rat>>>> best;

  std::size_t bridge(Exponent a, Exponent e) const {
    const Exponent D = K + 1;
    if (a == D) return e == D ? 0 : static_cast<std::size_t>(K - e);
    if (e == D || e > a) return 0;  // ascents are free
    if (e == a) return 1;
    return static_cast<std::size_t>(a - e) - 1;
  }

  std::size_t end_ramp(Exponent a) const { return a; }  // deep index K+1 ramps K+1

  Rat run(const Rat& b, int sign) {
    std::size_t p = ent.size();
    const Exponent D = K + 1;
    slack_cap = p * (static_cast<std::size_t>(K) + 2) + K + 3;
    best.assign(p, std::vector<std::vector<std::optional<Rat>>>(
                       D + 1, std::vector<std::optional<Rat>>(slack_cap + 1)));
    pow.resize(D + 1);
    pow[0] = 1;
    for (Exponent e = 1; e <= D; ++e) pow[e] = pow[e - 1] * b;

    auto improve = [&](std::size_t i, Exponent a, std::size_t slack, const Rat& v) {
      slack = std::min(slack, slack_cap);
      auto& cell = best[i][a][slack];
      if (!cell || *cell < v) cell = v;
    };
    auto contribution = [&](Exponent a, std::size_t i) {
      Rat v = pow[a] * ent[i].second;
      if (sign < 0) v = -v;
      if (a == D && v < 0) v = 0;  // deep coefficients can fade to nothing
      return v;
    };

    for (std::size_t f = 0; f < p; ++f) {
      Coord sf = ent[f].first;
      for (Exponent a0 = 0; a0 <= D; ++a0) {
        // a positive exponent at the first used coordinate needs a hidden
        // 0-exponent point below it
        std::uint64_t budget, spent;
        if (a0 == 0) {
          budget = sf + 2;
          spent = 1;
        } else {
          if (sf < 2) continue;
          budget = sf + 1;
          spent = 2;
        }
        if (spent > budget) continue;
        improve(f, a0, static_cast<std::size_t>(budget - spent), contribution(a0, f));
      }
    }

    Rat result(0);  // the empty pattern
    for (std::size_t i = 0; i < p; ++i) {
      for (Exponent a = 0; a <= D; ++a) {
        for (std::size_t s = 0; s <= slack_cap; ++s) {
          if (!best[i][a][s]) continue;
          Rat v = *best[i][a][s];
          // close the pattern: the descent ramp to exponent 0
          if (s >= end_ramp(a)) result = std::max(result, v);
          for (std::size_t j = i + 1; j < p; ++j) {
            Coord gap = ent[j].first - ent[i].first - 1;
            for (Exponent e = 0; e <= D; ++e) {
              std::size_t hid = bridge(a, e);
              if (hid > gap) continue;
              if (s < 1 + hid) continue;
              improve(j, e, s - 1 - hid, v + contribution(e, j));
            }
          }
        }
      }
    }
    return result;
  }
};

}  // namespace

Rat dual_candidate_max(const Rat& b, const SparseVector& x, Exponent K) {
  if (x.is_zero()) return Rat(0);
  CandidateDp dp{x.entries, K, {}, 0, {}};
  Rat plus = dp.run(b, +1);
  CandidateDp dp2{x.entries, K, {}, 0, {}};
  Rat minus = dp2.run(b, -1);
  return std::max(plus, minus);
}

Rat upper_bound_at_depth(const Rat& b, const SparseVector& x, Exponent K) {
  // the candidate maximum never exceeds the hereditary coefficient bound;
  // the min is kept as a cheap independent guard
  return std::min(dual_candidate_max(b, x, K), schreier_l1_bound(x));
}

NormBracket norm_bracket(const ConstructionState& st, const SparseVector& x,
                         const BracketOptions& opts) {
  if (!(opts.eps > 0)) throw ConfigError("bracket tolerance must be positive");
  NormBracket out;
  out.lower = 0;
  out.witness = st.unit_ref(1);
  out.witness_value = 0;
  if (x.is_zero()) {
    out.upper = 0;
    out.tail_term = 0;
    out.witness_interval = {1, 1};
    out.width_achieved = true;
    return out;
  }
  Coord M = x.max_coord();
  if (M > st.max_coordinate())
    throw std::invalid_argument("vector support exceeds built coordinates");
  out.witness_interval = {1, M};

  // lower bound: best built functional (its horizon restriction evaluates
  // identically on x)
  for (std::uint32_t n = 1; n <= st.num_levels(); ++n) {
    const LevelData& lvl = st.level(n);
    for (std::uint64_t idx = 0; idx < lvl.members.size(); ++idx) {
      Rat v = evaluate(st, lvl.members[idx], x);
      Rat a = rat_abs(v);
      if (a > out.lower) {
        out.lower = a;
        out.witness = {n, idx};
        out.witness_value = v;
      }
    }
  }

  out.upper = schreier_l1_bound(x);
  Exponent K = opts.depth_start;
  while (true) {
    Rat cand = dual_candidate_max(st.b(), x, K);
    out.upper = std::min(out.upper, cand);
    out.depth_used = K;
    if (out.upper - out.lower <= opts.eps) {
      out.width_achieved = true;
      break;
    }
    if (K >= opts.depth_max) break;
    K = std::min<Exponent>(K + 2, opts.depth_max);
  }
  if (out.upper < out.lower)
    throw std::logic_error("norm bracket inverted; upper bound unsound");
  out.tail_term = out.upper - out.lower;
  return out;
}

Rat restriction_certificate(const ConstructionState& st, FuncRef ref, Interval I) {
  if (I.lo != 1)
    throw std::invalid_argument("restriction_certificate expects an initial interval");
  const Functional& d = st.functional(ref);
  if (I.empty() || I.hi < d.min_support()) return Rat(0);
  if (I.contains(d.top)) return Rat(1);  // d|I = d, a member of the dual ball
  if (!d.composite) return Rat(0);       // unit with top outside I
  Coord cut = st.level(d.k).interval.hi;
  if (I.hi <= cut) return restriction_certificate(st, d.xi, I);
  // d|I = d_1 + b (d_2 | J) with J = I cap (Delta_{k+1}..Delta_l); the slice
  // of d_2 is a difference of two initial restrictions, each of norm <= 2
  Rat c2 = restriction_certificate(st, d.eta, {1, I.hi}) +
           restriction_certificate(st, d.eta, {1, cut});
  return Rat(1) + st.b() * c2;
}

Rat restriction_certificate_max(const ConstructionState& st, FuncRef ref) {
  const Functional& d = st.functional(ref);
  Rat best(0);
  // the certificate changes only at support breakpoints; check the interval
  // ending just below each support point and the full range
  for (const auto& [c, e] : d.coords) {
    if (c >= 1) best = std::max(best, restriction_certificate(st, ref, {1, c}));
    if (c >= 2) best = std::max(best, restriction_certificate(st, ref, {1, c - 1}));
  }
  return best;
}

Report basis_bound_check(const ConstructionState& st,
                         std::span<const SparseVector> samples,
                         const BracketOptions& opts) {
  Report rep;

  CheckResult cert{.id = "basis.certificate"};
  Rat worst(0);
  for (std::uint32_t n = 1; n <= st.num_levels() && cert.pass; ++n) {
    const LevelData& lvl = st.level(n);
    for (std::uint64_t idx = 0; idx < lvl.members.size(); ++idx) {
      Rat c = restriction_certificate_max(st, {n, idx});
      worst = std::max(worst, c);
      if (c > 2) {
        cert.pass = false;
        cert.detail = "certificate " + rat_to_string(c) + " at level " + std::to_string(n) +
                      " index " + std::to_string(idx);
        break;
      }
    }
  }
  cert.lhs = rat_to_string(worst);
  cert.rhs = "2";
  rep.add(std::move(cert));

  CheckResult proj{.id = "basis.projection_bound"};
  std::uint64_t checked = 0;
  for (const SparseVector& x : samples) {
    if (!proj.pass) break;
    NormBracket br = norm_bracket(st, x, opts);
    Rat limit = Rat(2) * br.upper;
    for (std::uint32_t n = 1; n <= st.num_levels() && proj.pass; ++n) {
      const LevelData& lvl = st.level(n);
      for (std::uint64_t idx = 0; idx < lvl.members.size(); ++idx) {
        const Functional& d = lvl.members[idx];
        // running value of (d*|[1, c])(x) across the support of d*
        Rat partial(0);
        for (const auto& [c, e] : d.coords) {
          partial += st.powers()[e] * x.at(c);
          if (rat_abs(partial) > limit) {
            proj.pass = false;
            proj.detail = "|(d*|[1," + std::to_string(c) + "])(x)| = " +
                          rat_to_string(rat_abs(partial)) + " > 2*upper = " +
                          rat_to_string(limit) + " at level " + std::to_string(n) +
                          " index " + std::to_string(idx) + ", x = " + x.to_string();
            break;
          }
        }
        if (!proj.pass) break;
      }
    }
    ++checked;
  }
  proj.detail = proj.pass ? std::to_string(checked) + " samples checked" : proj.detail;
  rep.add(std::move(proj));
  return rep;
}

}  // namespace l1predual
