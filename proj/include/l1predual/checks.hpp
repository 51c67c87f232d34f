#pragma once

#include "l1predual/blocks.hpp"
#include "l1predual/construction.hpp"
#include "l1predual/norms.hpp"
#include "l1predual/operators.hpp"
#include "l1predual/report.hpp"
#include "l1predual/sampling.hpp"

namespace l1predual {

// Deterministic seeded sparse rational vectors on [1, max_coord].
std::vector<SparseVector> seeded_sparse_vectors(Coord max_coord, std::size_t count,
                                                std::size_t max_support,
                                                std::uint64_t seed);

// Full +-1 sign pattern on [1, max_coord].
SparseVector seeded_sign_pattern(Coord max_coord, SampleGen& gen);

// Derivative calculus suite: the symbolic identities for the size-bounded
// families, equivalence with brute-force cluster iteration on a finite
// horizon, behaviour of the min-plus family, and injectivity of the product
// embedding on the built functionals.
Report derivative_suite(const ConstructionState& st);

// Brute-force cluster-support iteration: start from all members within the
// enumeration horizon and repeatedly keep the sets with a one-point
// extension still inside. Window results below agree with the symbolic
// derivative when window + iterations <= horizon.
std::vector<FiniteSet> brute_cluster_supports(const Family& fam, Coord horizon,
                                              std::uint64_t iterations);

// Seeded sign-pattern sweep of the constructive lower estimate at stage n,
// re-evaluating every returned pair directly.
Report lower_estimate_suite(const ConstructionState& st, std::uint32_t n,
                            std::uint64_t samples, std::uint64_t seed);

// Bracket axioms on seeded vectors: symmetry, exact scaling, triangle
// inequality on upper bounds, nesting of the depth refinement.
Report bracket_axioms_suite(const ConstructionState& st, std::uint64_t samples,
                            std::uint64_t seed);

}  // namespace l1predual
