#pragma once

#include "l1predual/core.hpp"

#include <optional>
#include <utility>

namespace l1predual {

// A finite subset of N, strictly increasing, all elements >= 1.
using FiniteSet = std::vector<Coord>;

bool is_valid_finite_set(const FiniteSet& f);

// Hereditary families of finite subsets of N with decidable extension
// spectra. The algebra is closed under first derivatives:
//
//   size_bounded(n)   A_n = {F : |F| <= n}
//   min_plus(c)       {F : |F| <= min F + c} (plus the empty set);
//                     c = 2 is the family norming supports live in
//   restricted(B, M)  members of B contained in [1, M]
//   empty             no members (the derivative of {emptyset})
//
// For every member F the extension spectrum {m > max F : F + {m} in family}
// is exactly a finite explicit set or all of [from, infinity).
class Family {
 public:
  enum class Kind { SizeBounded, MinPlus, Empty };

  static Family size_bounded(std::uint64_t n);
  static Family min_plus(std::int64_t c);
  static Family schreier_plus_two() { return min_plus(2); }
  static Family empty_family();

  // Restriction to subsets of [1, horizon]. Spectra remain those of the
  // unrestricted base, so "cofinal" keeps its meaning.
  Family restricted(Coord horizon) const;

  Kind kind() const { return kind_; }
  bool is_restricted() const { return horizon_.has_value(); }
  std::optional<Coord> horizon() const { return horizon_; }
  Family base() const;  // self without the restriction

  bool member(const FiniteSet& f) const;

  // True iff no proper superset of f is in the family. Rejects non-members.
  bool is_maximal(const FiniteSet& f) const;

  struct Spectrum {
    bool cofinal = false;
    // cofinal: spectrum == [from, infinity)
    Coord from = 0;
    // finite: the explicit (possibly empty) list
    std::vector<Coord> elements;

    bool empty() const { return !cofinal && elements.empty(); }
    bool operator==(const Spectrum&) const = default;
  };

  // Exact classification of {m > max f : f + {m} in family}, relative to the
  // base family when restricted. Rejects non-members.
  Spectrum extension_spectrum(const FiniteSet& f) const;

  // Support family of the first Cantor-Bendixson derivative of the product
  // space R * G: members whose extension spectrum is infinite.
  Family derivative() const;
  Family iterated_derivative(std::uint64_t k) const;

  // Tagged textual descriptor: An:<n>, schreier+<c> (schreier-<c> for c < 0),
  // restrict(<base>,<M>), empty.
  std::string descriptor() const;
  static Family parse(const std::string& text);

  bool operator==(const Family&) const = default;

  // All members contained in [1, horizon]; horizon <= 24 (oracle use only).
  std::vector<FiniteSet> members_within(Coord horizon) const;

 private:
  Family(Kind kind, std::int64_t c, std::uint64_t n) : kind_(kind), c_(c), n_(n) {}

  Kind kind_ = Kind::Empty;
  std::int64_t c_ = 0;   // MinPlus bound
  std::uint64_t n_ = 0;  // SizeBounded bound
  std::optional<Coord> horizon_;
};

// A point of the product space R * G: sorted (coordinate, exponent) pairs,
// exponent k encoding the value b^k and k = 0 the value 1. The zero point
// has no entries.
struct ProductPoint {
  std::vector<std::pair<Coord, Exponent>> entries;

  bool is_zero() const { return entries.empty(); }
  FiniteSet support() const;
  std::string to_string() const;  // sorted [coordinate, exponent] pairs
  bool operator==(const ProductPoint&) const = default;
  bool operator<(const ProductPoint& o) const { return entries < o.entries; }
};

// phi maps a functional with coefficients in {b^k} + {0, 1} to the point of
// R * F carrying the same coordinates. Exponent form embeds directly.
ProductPoint phi_embed(const std::vector<std::pair<Coord, Exponent>>& coords);

// Rational-coefficient form; rejects any coefficient outside {b^k} + {0, 1}.
ProductPoint phi_embed_values(const std::vector<std::pair<Coord, Rat>>& coords,
                              const Rat& b);

}  // namespace l1predual
