#include "l1predual/core.hpp"

#include <cctype>

namespace l1predual {

Rat rat_from_string(const std::string& s) {
  // strict grammar: -?digits(/digits)?
  std::size_t i = 0;
  auto digits = [&](std::size_t from) {
    std::size_t j = from;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    return j;
  };
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t num_end = digits(i);
  if (num_end == i) throw ConfigError("invalid rational: '" + s + "'");
  std::size_t j = num_end;
  if (j < s.size()) {
    if (s[j] != '/') throw ConfigError("invalid rational: '" + s + "'");
    std::size_t den_end = digits(j + 1);
    if (den_end == j + 1 || den_end != s.size())
      throw ConfigError("invalid rational: '" + s + "'");
  }
  Rat q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
    throw ConfigError("invalid rational: '" + s + "'");
  if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
    throw ConfigError("zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

std::string rat_to_string(const Rat& q) { return q.get_str(); }

Rat rat_pow(const Rat& base, Exponent e) {
  Rat out(1);
  Rat acc = base;
  while (e) {
    if (e & 1) out *= acc;
    e >>= 1;
    if (e) acc *= acc;
  }
  return out;
}

Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

}  // namespace l1predual
