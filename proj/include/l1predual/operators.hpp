#pragma once

#include "l1predual/construction.hpp"
#include "l1predual/norms.hpp"
#include "l1predual/report.hpp"

namespace l1predual {

// rho = (1/2)(1 + 3b/(1-b)), always in (1/2, 1) for 0 < b < 1/4;
// lambda = (1-rho)^{-1} (1-b)^{-1} + 1/2, strictly above the required
// threshold (the +1/2 offset fixes a deterministic choice); C = 2 is the
// basis-constant bound from the projection estimate.
struct Constants {
  Rat rho;
  Rat lambda;
  Rat C;
};

Constants constants(const Rat& b);

// T_n on the sup-normed coordinate space: exact columns built by the
// recursion T_{n+1} x = T_n pi_n x + sum_{i in Delta_{n+1}}
// [x(i) - (1/2) gamma_i*(T_n pi_n x)] e_i, with T_2 the identity embedding.
class ExtensionOperator {
 public:
  static ExtensionOperator build(const ConstructionState& st, std::uint32_t n);

  std::uint32_t stage() const { return stage_; }
  Coord dim() const { return dim_; }
  const Rat& entry(Coord row, Coord col) const;  // 1-based

  // row vector of d* composed with (I - P_m) and this operator; pm_cut is
  // the top coordinate of P_m's range (0 for P_0 = 0)
  std::vector<Rat> composed_row(const ConstructionState& st, const Functional& d,
                                Coord pm_cut) const;
  // operator norm of that functional on the sup-normed domain: the absolute
  // row sum
  Rat functional_norm(const ConstructionState& st, const Functional& d,
                      Coord pm_cut) const;

  SparseVector apply(const SparseVector& x) const;

 private:
  std::uint32_t stage_ = 0;
  Coord dim_ = 0;
  std::vector<std::vector<Rat>> cols_;  // cols_[i][j] = (T e_{i+1})(j+1)
};

// T_n x without materializing columns (level recursion); x is truncated to
// the first n intervals.
SparseVector apply_extension(const ConstructionState& st, std::uint32_t n,
                             const SparseVector& x);

// P_m T_n = T_m pi_m, columnwise and exact, for all m <= n. Each T_m is
// rebuilt independently from the recursion.
Report compatibility_check(const ConstructionState& st, std::uint32_t n);

// The four proof bounds at stage n, exact:
//   (1) ||d* T_n|| <= 1 + lambda/2            levels <= n
//   (2) ||d* (I-P_m) T_n|| <= 1 + 3 lambda/2  levels <= n, m <= n
//   (3) ||d* (I-P_m) T_n|| <= (1 + 3 lambda/2)/(1-b)   all built d*
//   (4) max built ||d* T_n|| <= lambda
Report verify_dual_properties(const ConstructionState& st, std::uint32_t n);

struct LowerEstimate {
  FuncRef d{};
  Interval I{};
  Rat value;  // |(d*|I)(T_n x)| >= 1/2
};

// The constructive lower estimate: for ||x||_inf = 1 supported on the first
// n intervals, produces d* and an initial interval I with
// |(d*|I)(T_n x)| >= 1/2, by the inductive case split on gamma at a
// coordinate where |x| attains 1.
LowerEstimate lower_estimate_check(const ConstructionState& st, std::uint32_t n,
                                   const SparseVector& x);

// b_i* = (1/2) gamma_i* P_{n-1} + e_i* for i in Delta_n, n >= 3; e_i* below.
SparseVector b_star(const ConstructionState& st, Coord i);

// b_i*(T_n e_j) = delta_ij for all built i, j up to stage n, exact.
Report biorthogonality_check(const ConstructionState& st, std::uint32_t n);

struct L1EquivalenceOptions {
  BracketOptions bracket{};
  std::uint64_t samples = 50;
  std::uint64_t seed = 1;
  Coord max_dp_coordinates = 64;  // norm certificate is refused beyond this
};

struct L1EquivalenceResult {
  Rat coefficient_sum;      // sum |a_i|
  Rat pairing_value;        // (sum a_i b_i*)(T_n sign(a)) == coefficient_sum
  bool norm_certified;      // bracket upper for T_n sign(a) is <= lambda
  Rat norm_upper;           // that upper bound
  Rat dual_lower_threshold; // coefficient_sum / lambda
  Report sampled_upper;     // |(sum a_i b_i*)(y)| <= (C/2+1) sum|a_i| on samples
};

L1EquivalenceResult l1_equivalence_check(const ConstructionState& st, std::uint32_t n,
                                         const SparseVector& a,
                                         const L1EquivalenceOptions& opts = {});

}  // namespace l1predual
