#pragma once

#include "l1predual/core.hpp"
#include "l1predual/report.hpp"
#include "l1predual/schreier.hpp"

#include <nlohmann/json.hpp>

namespace l1predual {

// Reference to a functional in the construction: level n >= 1 and index into
// the level's member list (composites first, in sigma order, then the unit
// functionals in coordinate order).
struct FuncRef {
  std::uint32_t level = 0;
  std::uint64_t index = 0;
  bool operator==(const FuncRef&) const = default;
  bool operator<(const FuncRef& o) const {
    return level != o.level ? level < o.level : index < o.index;
  }
};

// A finitely supported functional with coefficients in {b^k} U {0, 1},
// stored as sorted (coordinate, exponent) pairs; exponent 0 encodes the
// coefficient 1. Composites keep their defining data: the linked pair
// (xi, eta) at levels k < l and the top coordinate carrying e_top.
struct Functional {
  std::vector<std::pair<Coord, Exponent>> coords;
  std::uint32_t level = 0;
  bool composite = false;
  FuncRef xi{};
  FuncRef eta{};
  std::uint32_t k = 0;
  std::uint32_t l = 0;
  Coord top = 0;

  Coord min_support() const { return coords.front().first; }
  Coord max_support() const { return coords.back().first; }
  std::size_t support_size() const { return coords.size(); }
  FiniteSet support() const;
  // exponent at coordinate c, or nullopt when the coefficient is 0
  std::optional<Exponent> exponent_at(Coord c) const;
};

using LinkedPair = std::pair<FuncRef, FuncRef>;

struct LevelData {
  Interval interval;                      // Delta_n
  std::vector<Functional> members;        // composites then units
  std::uint64_t n_composites = 0;
  std::vector<LinkedPair> sigma_pairs{};  // Sigma_{n-1} in canonical order; empty for n <= 2
};

// The inductive construction: intervals Delta_n, norming sets D_n, linked
// pairs Sigma_n and the injection sigma_n. Immutable except through
// extend_level (single writer); all read paths are const.
class ConstructionState {
 public:
  // Starts the two seed levels Delta_1 = {1}, Delta_2 = {2}. Requires
  // 0 < b < 1/4, exactly representable.
  static ConstructionState create(const Rat& b);

  const Rat& b() const { return b_; }
  const PowerCache& powers() const { return powers_; }

  std::uint32_t num_levels() const { return static_cast<std::uint32_t>(levels_.size()); }
  Coord max_coordinate() const { return levels_.back().interval.hi; }
  const LevelData& level(std::uint32_t n) const;  // 1-based
  const std::vector<LevelData>& levels() const { return levels_; }

  std::uint32_t level_of_coord(Coord c) const;
  const Functional& functional(FuncRef ref) const;
  FuncRef unit_ref(Coord i) const;
  FuncRef gamma_ref(Coord i) const;  // unique composite with top i; i must lie beyond Delta_2
  const Functional& unit(Coord i) const { return functional(unit_ref(i)); }
  const Functional& gamma(Coord i) const { return functional(gamma_ref(i)); }

  Rat coefficient(const Functional& f, Coord c) const;

  std::uint64_t total_functionals() const;

  // Linked-pair predicate on registered functionals. Requires
  // level(xi) < level(eta); equal or reversed levels are rejected.
  bool is_linked_pair(FuncRef xi, FuncRef eta) const;

  // Sigma_n: every linked pair over the union of D_1..D_n, ordered by
  // (k, index of xi in D_k, l, index of eta in D_l).
  std::vector<LinkedPair> enumerate_linked_pairs(std::uint32_t n) const;

  // Lower bound |Sigma_n| >= sum_{k<l<=n} |Delta_k||Delta_l| from unit pairs
  // alone; lets the build loop stop before enumerating a hopeless level.
  std::uint64_t linked_pair_lower_bound(std::uint32_t n) const;

  // Appends level n+1: the adjacent interval of length |Sigma_n|, the
  // composites xi + b(eta | union Delta_{k+1}..Delta_l) + e_top in sigma
  // order, and the unit functionals. Throws BudgetError (leaving the state
  // untouched) when the new interval would pass max_coordinate_budget.
  void extend_level(Coord max_coordinate_budget);

  struct Decomposition {
    FuncRef xi, eta;
    std::uint32_t k = 0, l = 0;
    Coord top = 0;
  };
  // Property-(7) data of a composite; unit input is rejected.
  Decomposition decompose(FuncRef ref) const;

  // Recomputes the coordinates of a composite from its registered parents.
  std::vector<std::pair<Coord, Exponent>> recompose(const Functional& f) const;

  // Per-property verification of the seven construction properties, with the
  // first counterexample on failure.
  Report verify_properties() const;

  nlohmann::ordered_json to_json() const;
  static ConstructionState from_json(const nlohmann::json& doc);
  void save(const std::string& path) const;
  static ConstructionState load(const std::string& path);

 private:
  ConstructionState(Rat b) : b_(std::move(b)), powers_(b_) {}

  Rat b_;
  PowerCache powers_;
  std::vector<LevelData> levels_;
};

// The family supports must live in: {F : |F| <= min F + 2}.
inline Family construction_family() { return Family::schreier_plus_two(); }

}  // namespace l1predual
