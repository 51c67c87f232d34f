#include "l1predual/schreier.hpp"

#include <algorithm>
#include <sstream>

namespace l1predual {

bool is_valid_finite_set(const FiniteSet& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 1) return false;
    if (i > 0 && f[i] <= f[i - 1]) return false;
  }
  return true;
}

namespace {

void require_valid(const FiniteSet& f) {
  if (!is_valid_finite_set(f))
    throw std::invalid_argument("finite set must be strictly increasing with elements >= 1");
}

}  // namespace

Family Family::size_bounded(std::uint64_t n) { return Family(Kind::SizeBounded, 0, n); }

Family Family::min_plus(std::int64_t c) { return Family(Kind::MinPlus, c, 0); }

Family Family::empty_family() { return Family(Kind::Empty, 0, 0); }

Family Family::restricted(Coord horizon) const {
  if (horizon < 1) throw ConfigError("restriction horizon must be >= 1");
  Family out = *this;
  // nested restrictions collapse to the smaller horizon
  out.horizon_ = horizon_ ? std::min(*horizon_, horizon) : horizon;
  return out;
}

Family Family::base() const {
  Family out = *this;
  out.horizon_.reset();
  return out;
}

bool Family::member(const FiniteSet& f) const {
  require_valid(f);
  if (horizon_ && !f.empty() && f.back() > *horizon_) return false;
  switch (kind_) {
    case Kind::SizeBounded:
      return f.size() <= n_;
    case Kind::MinPlus:
      if (f.empty()) return true;
      return static_cast<std::int64_t>(f.size()) <=
             static_cast<std::int64_t>(f.front()) + c_;
    case Kind::Empty:
      return false;
  }
  return false;
}

bool Family::is_maximal(const FiniteSet& f) const {
  if (!member(f)) throw std::invalid_argument("is_maximal: not a member of the family");
  auto extends = [&](Coord m) {
    if (std::binary_search(f.begin(), f.end(), m)) return false;
    FiniteSet g(f);
    g.insert(std::lower_bound(g.begin(), g.end(), m), m);
    return member(g);
  };
  if (horizon_) {
    // a proper superset exists iff a one-point extension does (hereditary)
    for (Coord m = 1; m <= *horizon_; ++m)
      if (extends(m)) return false;
    return true;
  }
  Spectrum sp = extension_spectrum(f);
  if (!sp.empty()) return false;
  Coord limit = f.empty() ? 0 : f.back();
  for (Coord m = 1; m < limit; ++m)
    if (extends(m)) return false;
  return true;
}

Family::Spectrum Family::extension_spectrum(const FiniteSet& f) const {
  if (!member(f)) throw std::invalid_argument("extension_spectrum: not a member of the family");
  Spectrum sp;
  Coord maxf = f.empty() ? 0 : f.back();
  switch (kind_) {
    case Kind::SizeBounded:
      if (f.size() < n_) {
        sp.cofinal = true;
        sp.from = maxf + 1;
      }
      return sp;
    case Kind::MinPlus: {
      if (f.empty()) {
        // {m} is a member iff 1 <= m + c
        Coord from = c_ >= 1 ? 1 : static_cast<Coord>(1 - c_);
        sp.cofinal = true;
        sp.from = from;
        return sp;
      }
      std::int64_t size_after = static_cast<std::int64_t>(f.size()) + 1;
      if (size_after <= static_cast<std::int64_t>(f.front()) + c_) {
        sp.cofinal = true;
        sp.from = maxf + 1;
      }
      return sp;
    }
    case Kind::Empty:
      return sp;
  }
  return sp;
}

Family Family::derivative() const {
  Family out = *this;
  switch (kind_) {
    case Kind::SizeBounded:
      if (n_ == 0) {
        out.kind_ = Kind::Empty;
        out.n_ = 0;
      } else {
        out.n_ = n_ - 1;
      }
      return out;
    case Kind::MinPlus:
      out.c_ = c_ - 1;
      return out;
    case Kind::Empty:
      return out;
  }
  return out;
}

Family Family::iterated_derivative(std::uint64_t k) const {
  Family out = *this;
  for (std::uint64_t i = 0; i < k; ++i) {
    if (out.kind_ == Kind::Empty) break;
    out = out.derivative();
  }
  return out;
}

std::string Family::descriptor() const {
  std::ostringstream os;
  auto base_text = [&]() -> std::string {
    switch (kind_) {
      case Kind::SizeBounded:
        return "An:" + std::to_string(n_);
      case Kind::MinPlus:
        return (c_ >= 0 ? "schreier+" + std::to_string(c_)
                        : "schreier-" + std::to_string(-c_));
      case Kind::Empty:
        return "empty";
    }
    return "empty";
  };
  if (horizon_) {
    os << "restrict(" << base_text() << "," << *horizon_ << ")";
  } else {
    os << base_text();
  }
  return os.str();
}

Family Family::parse(const std::string& text) {
  auto parse_u64 = [](const std::string& s, const char* what) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError(std::string("invalid family descriptor ") + what + ": '" + s + "'");
    return std::stoull(s);
  };
  if (text == "empty") return empty_family();
  if (text.rfind("An:", 0) == 0)
    return size_bounded(parse_u64(text.substr(3), "An bound"));
  if (text.rfind("schreier+", 0) == 0)
    return min_plus(static_cast<std::int64_t>(parse_u64(text.substr(9), "schreier bound")));
  if (text.rfind("schreier-", 0) == 0)
    return min_plus(-static_cast<std::int64_t>(parse_u64(text.substr(9), "schreier bound")));
  if (text.rfind("restrict(", 0) == 0 && text.back() == ')') {
    std::string inner = text.substr(9, text.size() - 10);
    std::size_t comma = inner.rfind(',');
    if (comma == std::string::npos)
      throw ConfigError("invalid family descriptor: '" + text + "'");
    Family base = parse(inner.substr(0, comma));
    Coord horizon = parse_u64(inner.substr(comma + 1), "horizon");
    return base.restricted(horizon);
  }
  throw ConfigError("invalid family descriptor: '" + text + "'");
}

std::vector<FiniteSet> Family::members_within(Coord horizon) const {
  if (horizon > 24) throw ConfigError("members_within: horizon too large for exhaustive listing");
  Coord h = horizon_ ? std::min(*horizon_, horizon) : horizon;
  std::vector<FiniteSet> out;
  FiniteSet cur;
  // depth-first over increasing elements; hereditarity guarantees every
  // extension of a non-member is a non-member only for supersets, so test
  // each set directly (cheap at this scale).
  auto rec = [&](auto&& self, Coord from) -> void {
    if (member(cur)) out.push_back(cur);
    for (Coord m = from; m <= h; ++m) {
      cur.push_back(m);
      // prune: if cur already fails, no superset can succeed
      if (member(cur)) {
        self(self, m + 1);
      } else {
        // supersets of a non-member are non-members (hereditary)
      }
      cur.pop_back();
    }
  };
  rec(rec, 1);
  std::sort(out.begin(), out.end());
  return out;
}

FiniteSet ProductPoint::support() const {
  FiniteSet s;
  s.reserve(entries.size());
  for (const auto& [c, e] : entries) s.push_back(c);
  return s;
}

std::string ProductPoint::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ",";
    os << "[" << entries[i].first << "," << entries[i].second << "]";
  }
  os << "]";
  return os.str();
}

ProductPoint phi_embed(const std::vector<std::pair<Coord, Exponent>>& coords) {
  ProductPoint p;
  p.entries = coords;
  std::sort(p.entries.begin(), p.entries.end());
  for (std::size_t i = 1; i < p.entries.size(); ++i)
    if (p.entries[i].first == p.entries[i - 1].first)
      throw std::invalid_argument("phi_embed: duplicate coordinate");
  return p;
}

ProductPoint phi_embed_values(const std::vector<std::pair<Coord, Rat>>& coords,
                              const Rat& b) {
  if (!(b > 0) || !(b < 1)) throw ConfigError("phi_embed_values: base must lie in (0,1)");
  ProductPoint p;
  for (const auto& [c, v] : coords) {
    if (v == 0) continue;
    // find k with v == b^k (k == 0 covers v == 1)
    Rat acc(1);
    Exponent k = 0;
    bool found = false;
    while (acc >= v) {
      if (acc == v) {
        found = true;
        break;
      }
      acc *= b;
      ++k;
    }
    if (!found)
      throw std::invalid_argument("phi_embed_values: coefficient outside {b^k} U {0,1}");
    p.entries.emplace_back(c, k);
  }
  std::sort(p.entries.begin(), p.entries.end());
  for (std::size_t i = 1; i < p.entries.size(); ++i)
    if (p.entries[i].first == p.entries[i - 1].first)
      throw std::invalid_argument("phi_embed_values: duplicate coordinate");
  return p;
}

}  // namespace l1predual
