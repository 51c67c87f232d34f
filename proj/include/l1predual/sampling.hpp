#pragma once

#include "l1predual/core.hpp"

namespace l1predual {

// Deterministic sample stream. splitmix64 keeps draws identical across
// platforms and standard libraries, which the reproducibility contract
// requires (std::uniform_int_distribution is implementation-defined).
class SampleGen {
 public:
  explicit SampleGen(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n), n >= 1
  std::uint64_t bounded(std::uint64_t n) { return next() % n; }

  bool coin() { return (next() & 1) != 0; }

  // small nonzero rational, numerator in [-9, 9] \ {0}, denominator in [1, 9]
  Rat small_rat() {
    long num = static_cast<long>(bounded(9)) + 1;
    if (coin()) num = -num;
    long den = static_cast<long>(bounded(9)) + 1;
    Rat q(num, den);
    q.canonicalize();
    return q;
  }

 private:
  std::uint64_t state_;
};

}  // namespace l1predual
