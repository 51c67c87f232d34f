#pragma once

#include "l1predual/construction.hpp"
#include "l1predual/norms.hpp"
#include "l1predual/report.hpp"

namespace l1predual {

struct BlockVector {
  SparseVector v;
  std::optional<Coord> designated;  // i_n with |v(i_n)| >= delta

  Interval range() const {
    return {v.entries.front().first, v.entries.back().first};
  }
};

// Successive blocks: max supp u_n < min supp u_{n+1}.
struct BlockBasis {
  std::vector<BlockVector> blocks;
  std::optional<Rat> delta;

  static BlockBasis units(Coord from, Coord to);  // blocks e_from .. e_to
  void validate() const;                          // nonzero + successive
};

// 1 + sum_{n>=1} (n+2)/2^n = 5, evaluated exactly.
Rat c0_threshold_constant();

// Flatness certifier: checks ||u_n||_c0 < 1/2^{k_{n-1}} for n >= 2
// (k_n = max supp u_n) and then sum_n |d*(u_n)| <= 5 for every built d*.
// Failures carry the offending block or functional.
Report c0_certify(const ConstructionState& st, const BlockBasis& blocks);

struct WitnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientLevelsError : WitnessError {
  using WitnessError::WitnessError;
};
struct NoDesignatedError : WitnessError {
  using WitnessError::WitnessError;
};

struct WitnessResult {
  std::vector<std::size_t> F;    // 1-based block positions, |F| = k
  FuncRef functional{};
  std::vector<FuncRef> lineage;  // chain of functionals from the base unit up
  std::vector<Rat> values;       // |d*(u_n)| for n in F, each >= delta * b
  Rat delta;
};

// Finds F with |F| = k and a built d* with |supp d*| <= 2k+1,
// supp d* cap supp u_n = {i_n} and |d*(u_n)| >= delta b for every n in F.
// Deterministic depth-first search over the registered composites that
// extend the current witness, scanning blocks in order.
WitnessResult l1_witness(const ConstructionState& st, const BlockBasis& blocks,
                         std::optional<Rat> delta, std::uint32_t k);

// Re-validates a returned certificate by direct evaluation.
bool validate_witness(const ConstructionState& st, const BlockBasis& blocks,
                      const WitnessResult& w, std::uint32_t k);

struct SpreadingRow {
  std::uint32_t k = 0;
  bool found = false;
  std::string error;          // "insufficient levels" when not found
  std::vector<std::size_t> F;
  std::vector<std::string> values;  // per-block certified |d*(u_n)|
  std::string lower_bound;          // k * delta * b
  std::string upper_bound;          // bracket upper of || sum_{n in F} u_n ||
};

// Finite-stage spreading evidence for the unit-vector blocks: witnesses for
// k <= k_max with certified per-block values and a bracket upper bound for
// the witnessed sum. Evidence at finite stages only.
std::vector<SpreadingRow> spreading_table(const ConstructionState& st, std::uint32_t k_max);

}  // namespace l1predual
