#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1predual {

// Coordinates of the basis are 1-based positive integers.
using Coord = std::uint64_t;
using Exponent = std::uint32_t;

// Exact rational scalar. All arithmetic in this library is exact; no
// floating point value ever enters or leaves a computation.
using Rat = mpq_class;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when extending the construction would push the maximum coordinate
// past the configured budget. No partial level is ever created.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "p/q" or "p" with optional leading '-'. Rejects anything else,
// including zero denominators. Result is canonicalized.
Rat rat_from_string(const std::string& s);

std::string rat_to_string(const Rat& q);

Rat rat_pow(const Rat& base, Exponent e);

Rat rat_abs(const Rat& q);

// Closed interval of coordinates [lo, hi]; lo > hi encodes the empty interval.
struct Interval {
  Coord lo = 1;
  Coord hi = 0;

  bool empty() const { return lo > hi; }
  bool contains(Coord c) const { return lo <= c && c <= hi; }
  Coord size() const { return empty() ? 0 : hi - lo + 1; }
  bool operator==(const Interval&) const = default;
};

// Lazily extended table of powers b^0, b^1, ...
class PowerCache {
 public:
  explicit PowerCache(Rat base) : base_(std::move(base)) { pow_.emplace_back(1); }

  const Rat& base() const { return base_; }

  const Rat& operator[](Exponent k) const {
    while (pow_.size() <= k) pow_.push_back(pow_.back() * base_);
    return pow_[k];
  }

 private:
  Rat base_;
  mutable std::vector<Rat> pow_;
};

}  // namespace l1predual
