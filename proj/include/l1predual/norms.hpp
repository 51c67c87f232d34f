#pragma once

#include "l1predual/construction.hpp"
#include "l1predual/report.hpp"

#include <span>

namespace l1predual {

// Finitely supported vector with exact rational entries.
struct SparseVector {
  std::vector<std::pair<Coord, Rat>> entries;  // sorted by coordinate, nonzero values

  static SparseVector from_pairs(std::vector<std::pair<Coord, Rat>> pairs);
  static SparseVector unit(Coord i) { return from_pairs({{i, Rat(1)}}); }

  bool is_zero() const { return entries.empty(); }
  Coord max_coord() const { return entries.empty() ? 0 : entries.back().first; }
  Rat at(Coord c) const;
  Rat linf() const;
  Rat l1() const;
  SparseVector scaled(const Rat& factor) const;
  SparseVector plus(const SparseVector& other) const;
  std::string to_string() const;
  bool operator==(const SparseVector&) const = default;
};

// Exact value of a functional on a vector.
Rat evaluate(const ConstructionState& st, const Functional& f, const SparseVector& x);
Rat evaluate(const ConstructionState& st, FuncRef ref, const SparseVector& x);

// A coordinatewise truncation of a functional to an interval, with
// materialized rational coefficients.
struct RestrictedFunctional {
  std::vector<std::pair<Coord, Rat>> coords;
  std::optional<FuncRef> origin;  // nullopt for synthetic closure elements
  Interval interval;

  Rat operator()(const SparseVector& x) const;
};

RestrictedFunctional restrict_functional(const ConstructionState& st, FuncRef ref,
                                         Interval I);

// Explicit horizon-M closure of restrictions: every restriction of every
// member of D (any level, built or not) to [1, M], truncated to coefficient
// exponents <= K, lies in this set. Feasible only for small M.
struct RestrictionClosure {
  Coord horizon = 0;
  Exponent depth = 0;
  std::vector<std::vector<std::pair<Coord, Exponent>>> members;  // canonical order
  Rat tail_bound;  // (M + 2) b^{K+1}

  bool contains(const std::vector<std::pair<Coord, Exponent>>& f) const;
};

RestrictionClosure enumerate_restrictions(const ConstructionState& st, Coord M,
                                          Exponent K, std::size_t member_cap = 200000);

// max over G in F, G inside supp x, of sum |x_i|: the coefficient-bound
// relaxation of the dual ball (|d*(i)| <= 1 and supp d* in F).
Rat schreier_l1_bound(const SparseVector& x);

// Certified maximum of |f(x)| over all candidate coefficient patterns
// realizable as restrictions of members of D to supp x, an over-
// approximation of the true dual set that is sound for upper bounds and
// independent of how many levels are built. Exponents above K enter through
// a single "deep" symbol bounded by b^{K+1}, so no additive tail is needed
// and the bound is exact on unit vectors.
Rat dual_candidate_max(const Rat& b, const SparseVector& x, Exponent K);

// min(dual_candidate_max, schreier_l1_bound): a certified upper bound for
// ||x|| at depth K.
Rat upper_bound_at_depth(const Rat& b, const SparseVector& x, Exponent K);

struct BracketOptions {
  Rat eps = Rat(1, 1000);
  Exponent depth_start = 2;
  Exponent depth_max = 8;
};

// Certified rational bracket around ||x|| = sup_{d* in D} |d*(x)|.
// lower is attained by a built functional (the witness, restricted to the
// support horizon); upper = lower + tail_term certifies every member of D,
// built or not.
struct NormBracket {
  Rat lower;
  Rat upper;
  Rat tail_term;  // upper - lower
  FuncRef witness{};
  Interval witness_interval{};
  Rat witness_value;  // signed witness evaluation; |witness_value| == lower
  bool width_achieved = false;
  Exponent depth_used = 0;
};

NormBracket norm_bracket(const ConstructionState& st, const SparseVector& x,
                         const BracketOptions& opts = {});

// The recursive projection-bound certificate of the basis estimate: a
// rational value >= ||d*|I|| and <= 2 whenever b < 1/4, computed by the
// splitting d* = d_1* + b (d_2*|J) + e_i*.
Rat restriction_certificate(const ConstructionState& st, FuncRef ref, Interval I);

// max of the certificate over all initial intervals (breakpoints at the
// support of d*).
Rat restriction_certificate_max(const ConstructionState& st, FuncRef ref);

// Checks |(d*|I)(x)| <= 2 upper(||x||) for every built d*, every initial
// interval, and every sample; plus the symbolic certificate <= 2 for every
// built functional.
Report basis_bound_check(const ConstructionState& st,
                         std::span<const SparseVector> samples,
                         const BracketOptions& opts = {});

}  // namespace l1predual
