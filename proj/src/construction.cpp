#include "l1predual/construction.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace l1predual {

FiniteSet Functional::support() const {
  FiniteSet s;
  s.reserve(coords.size());
  for (const auto& [c, e] : coords) s.push_back(c);
  return s;
}

std::optional<Exponent> Functional::exponent_at(Coord c) const {
  auto it = std::lower_bound(coords.begin(), coords.end(), c,
                             [](const auto& p, Coord v) { return p.first < v; });
  if (it == coords.end() || it->first != c) return std::nullopt;
  return it->second;
}

ConstructionState ConstructionState::create(const Rat& b) {
  if (!(b > 0) || !(b < Rat(1, 4)))
    throw ConfigError("b must lie strictly inside (0, 1/4); got " + rat_to_string(b));
  ConstructionState st(b);
  for (Coord i = 1; i <= 2; ++i) {
    LevelData lvl;
    lvl.interval = {i, i};
    Functional e;
    e.coords = {{i, 0}};
    e.level = static_cast<std::uint32_t>(i);
    e.top = i;
    lvl.members.push_back(std::move(e));
    st.levels_.push_back(std::move(lvl));
  }
  return st;
}

const LevelData& ConstructionState::level(std::uint32_t n) const {
  if (n < 1 || n > levels_.size())
    throw std::invalid_argument("level " + std::to_string(n) + " not built");
  return levels_[n - 1];
}

std::uint32_t ConstructionState::level_of_coord(Coord c) const {
  if (c < 1 || c > max_coordinate())
    throw std::invalid_argument("coordinate " + std::to_string(c) + " not built");
  auto it = std::lower_bound(levels_.begin(), levels_.end(), c,
                             [](const LevelData& lvl, Coord v) { return lvl.interval.hi < v; });
  return static_cast<std::uint32_t>(it - levels_.begin()) + 1;
}

const Functional& ConstructionState::functional(FuncRef ref) const {
  const LevelData& lvl = level(ref.level);
  if (ref.index >= lvl.members.size())
    throw std::invalid_argument("functional index out of range at level " +
                                std::to_string(ref.level));
  return lvl.members[ref.index];
}

FuncRef ConstructionState::unit_ref(Coord i) const {
  std::uint32_t n = level_of_coord(i);
  const LevelData& lvl = levels_[n - 1];
  return {n, lvl.n_composites + (i - lvl.interval.lo)};
}

FuncRef ConstructionState::gamma_ref(Coord i) const {
  std::uint32_t n = level_of_coord(i);
  if (n <= 2)
    throw std::invalid_argument("no composite functional has top " + std::to_string(i) +
                                " (levels 1 and 2 hold units only)");
  const LevelData& lvl = levels_[n - 1];
  return {n, i - lvl.interval.lo};
}

Rat ConstructionState::coefficient(const Functional& f, Coord c) const {
  auto e = f.exponent_at(c);
  return e ? powers_[*e] : Rat(0);
}

std::uint64_t ConstructionState::total_functionals() const {
  std::uint64_t t = 0;
  for (const auto& lvl : levels_) t += lvl.members.size();
  return t;
}

namespace {

// number of support points of eta strictly above cut
std::size_t support_above(const Functional& eta, Coord cut) {
  auto it = std::upper_bound(eta.coords.begin(), eta.coords.end(), cut,
                             [](Coord v, const auto& p) { return v < p.first; });
  return static_cast<std::size_t>(eta.coords.end() - it);
}

}  // namespace

bool ConstructionState::is_linked_pair(FuncRef xi_ref, FuncRef eta_ref) const {
  const Functional& xi = functional(xi_ref);
  const Functional& eta = functional(eta_ref);
  if (xi.level >= eta.level)
    throw std::invalid_argument("linked pair requires level(xi) < level(eta)");
  // body = supp xi  U  supp(eta | Delta_{k+1}..Delta_l); the two parts are
  // disjoint and min(body) = min supp xi, so membership in F without
  // maximality reduces to |body| <= min supp xi + 1.
  Coord cut = levels_[xi.level - 1].interval.hi;
  std::size_t body = xi.support_size() + support_above(eta, cut);
  return body <= xi.min_support() + 1;
}

std::vector<LinkedPair> ConstructionState::enumerate_linked_pairs(std::uint32_t n) const {
  if (n < 1 || n > num_levels())
    throw std::invalid_argument("enumerate_linked_pairs: level " + std::to_string(n) +
                                " not built");
  std::vector<LinkedPair> pairs;
  for (std::uint32_t k = 1; k < n; ++k) {
    const LevelData& dk = levels_[k - 1];
    Coord cut = dk.interval.hi;
    for (std::uint64_t xi_idx = 0; xi_idx < dk.members.size(); ++xi_idx) {
      const Functional& xi = dk.members[xi_idx];
      // eta contributes at least one point, so xi must have slack
      if (xi.support_size() > xi.min_support()) continue;
      std::size_t allow = xi.min_support() + 1 - xi.support_size();
      for (std::uint32_t l = k + 1; l <= n; ++l) {
        const LevelData& dl = levels_[l - 1];
        for (std::uint64_t eta_idx = 0; eta_idx < dl.members.size(); ++eta_idx) {
          if (support_above(dl.members[eta_idx], cut) <= allow)
            pairs.push_back({{k, xi_idx}, {l, eta_idx}});
        }
      }
    }
  }
  return pairs;
}

std::uint64_t ConstructionState::linked_pair_lower_bound(std::uint32_t n) const {
  // every cross-level unit pair is linked: |{i, j}| = 2 < min + 2
  std::uint64_t total = 0, prefix = 0;
  for (std::uint32_t k = 1; k <= n; ++k) {
    std::uint64_t sz = levels_[k - 1].interval.size();
    total += prefix * sz;
    prefix += sz;
  }
  return total;
}

void ConstructionState::extend_level(Coord max_coordinate_budget) {
  std::uint32_t n = num_levels();
  Coord base = max_coordinate();
  std::uint64_t cheap = linked_pair_lower_bound(n);
  if (base + cheap > max_coordinate_budget)
    throw BudgetError("level " + std::to_string(n + 1) + " needs at least " +
                      std::to_string(cheap) + " coordinates beyond " + std::to_string(base) +
                      ", over budget " + std::to_string(max_coordinate_budget));
  std::vector<LinkedPair> sigma = enumerate_linked_pairs(n);
  if (sigma.empty()) throw std::invalid_argument("no linked pairs available to extend");
  if (base + sigma.size() > max_coordinate_budget)
    throw BudgetError("level " + std::to_string(n + 1) + " needs " +
                      std::to_string(sigma.size()) + " coordinates beyond " +
                      std::to_string(base) + ", over budget " +
                      std::to_string(max_coordinate_budget));

  LevelData lvl;
  lvl.interval = {base + 1, base + sigma.size()};
  lvl.n_composites = sigma.size();
  lvl.members.reserve(2 * sigma.size());
  for (std::uint64_t j = 0; j < sigma.size(); ++j) {
    const auto& [xi_ref, eta_ref] = sigma[j];
    const Functional& xi = functional(xi_ref);
    const Functional& eta = functional(eta_ref);
    Functional d;
    d.level = n + 1;
    d.composite = true;
    d.xi = xi_ref;
    d.eta = eta_ref;
    d.k = xi.level;
    d.l = eta.level;
    d.top = lvl.interval.lo + j;
    Coord cut = levels_[xi.level - 1].interval.hi;
    d.coords = xi.coords;
    for (const auto& [c, e] : eta.coords)
      if (c > cut) d.coords.emplace_back(c, e + 1);
    d.coords.emplace_back(d.top, 0);
    lvl.members.push_back(std::move(d));
  }
  for (Coord i = lvl.interval.lo; i <= lvl.interval.hi; ++i) {
    Functional e;
    e.coords = {{i, 0}};
    e.level = n + 1;
    e.top = i;
    lvl.members.push_back(std::move(e));
  }
  lvl.sigma_pairs = std::move(sigma);
  levels_.push_back(std::move(lvl));
}

ConstructionState::Decomposition ConstructionState::decompose(FuncRef ref) const {
  const Functional& f = functional(ref);
  if (!f.composite)
    throw std::invalid_argument("decompose: unit functionals admit no splitting");
  return {f.xi, f.eta, f.k, f.l, f.top};
}

std::vector<std::pair<Coord, Exponent>> ConstructionState::recompose(
    const Functional& f) const {
  if (!f.composite) throw std::invalid_argument("recompose: not a composite");
  const Functional& xi = functional(f.xi);
  const Functional& eta = functional(f.eta);
  Coord cut = levels_[f.k - 1].interval.hi;
  Coord top_of_l = levels_[f.l - 1].interval.hi;
  std::vector<std::pair<Coord, Exponent>> coords = xi.coords;
  for (const auto& [c, e] : eta.coords)
    if (c > cut && c <= top_of_l) coords.emplace_back(c, e + 1);
  coords.emplace_back(f.top, 0);
  std::sort(coords.begin(), coords.end());
  return coords;
}

Report ConstructionState::verify_properties() const {
  Report rep;
  Family fam = construction_family();
  std::uint32_t N = num_levels();

  auto where = [](std::uint32_t n, std::uint64_t idx) {
    return "level " + std::to_string(n) + " index " + std::to_string(idx);
  };

  // structure: seed levels, adjacency, member layout, sigma consistency
  {
    CheckResult c{.id = "construction.structure"};
    std::string bad;
    if (levels_.size() < 2 || levels_[0].interval != Interval{1, 1} ||
        levels_[1].interval != Interval{2, 2})
      bad = "seed levels must be {1} and {2}";
    for (std::uint32_t n = 2; bad.empty() && n <= N; ++n)
      if (levels_[n - 1].interval.lo != levels_[n - 2].interval.hi + 1 ||
          levels_[n - 1].interval.empty())
        bad = "interval of level " + std::to_string(n) + " is not adjacent";
    for (std::uint32_t n = 1; bad.empty() && n <= N; ++n) {
      const LevelData& lvl = levels_[n - 1];
      std::uint64_t want_comp = n >= 3 ? lvl.interval.size() : 0;
      if (lvl.n_composites != want_comp ||
          lvl.members.size() != want_comp + lvl.interval.size())
        bad = "member layout broken at level " + std::to_string(n);
      else if (n >= 3 && lvl.sigma_pairs.size() != lvl.n_composites)
        bad = "sigma registry size mismatch at level " + std::to_string(n);
      else if (n >= 3) {
        for (std::uint64_t j = 0; j < lvl.n_composites; ++j) {
          const Functional& d = lvl.members[j];
          if (!(d.xi == lvl.sigma_pairs[j].first) || !(d.eta == lvl.sigma_pairs[j].second) ||
              d.top != lvl.interval.lo + j) {
            bad = "sigma assignment mismatch at " + where(n, j);
            break;
          }
        }
      }
    }
    if (!bad.empty()) {
      c.pass = false;
      c.detail = bad;
    }
    rep.add(std::move(c));
  }

  CheckResult p[8];
  for (int i = 1; i <= 7; ++i) p[i].id = "construction.property." + std::to_string(i);
  p[4].detail = "coefficients stored as exponents of b; representation validated";

  auto fail = [&](int i, const std::string& msg) {
    if (p[i].pass) {
      p[i].pass = false;
      p[i].detail = msg;
    }
  };

  for (std::uint32_t n = 1; n <= N; ++n) {
    const LevelData& lvl = levels_[n - 1];
    // (1) e_i* present for every i in Delta_n
    for (Coord i = lvl.interval.lo; i <= lvl.interval.hi; ++i) {
      std::uint64_t idx = lvl.n_composites + (i - lvl.interval.lo);
      if (idx >= lvl.members.size() || lvl.members[idx].composite ||
          lvl.members[idx].coords !=
              std::vector<std::pair<Coord, Exponent>>{{i, 0}}) {
        fail(1, "unit functional missing or malformed at coordinate " + std::to_string(i));
        break;
      }
    }
    std::uint64_t multi_count = 0;
    for (std::uint64_t idx = 0; idx < lvl.members.size(); ++idx) {
      const Functional& d = lvl.members[idx];
      // representation sanity backs property (4)
      if (d.coords.empty()) {
        fail(4, "empty functional at " + where(n, idx));
        continue;
      }
      for (std::size_t t = 0; t < d.coords.size(); ++t) {
        if (d.coords[t].first < 1 ||
            (t > 0 && d.coords[t].first <= d.coords[t - 1].first)) {
          fail(4, "coordinates not strictly increasing at " + where(n, idx));
          break;
        }
      }
      // (2) support inside built coordinates, maximum inside Delta_n
      if (d.max_support() > max_coordinate() || !lvl.interval.contains(d.max_support())) {
        fail(2, "support of " + where(n, idx) + " does not end in its interval");
        continue;
      }
      // (3) at most one support point per interval
      std::uint32_t prev_level = 0;
      for (const auto& [c, e] : d.coords) {
        std::uint32_t cl = level_of_coord(c);
        if (cl == prev_level) {
          fail(3, "two support points inside one interval at " + where(n, idx));
          break;
        }
        prev_level = cl;
      }
      // (5) support in the family F
      if (!fam.member(d.support()))
        fail(5, "support outside the family at " + where(n, idx));
      // (6) bookkeeping
      if (d.support_size() > 1) ++multi_count;
      if (d.support_size() > 1 && n >= 3) {
        if (idx >= lvl.n_composites)
          fail(6, "multi-point functional stored as unit at " + where(n, idx));
      }
      if (n <= 2 && d.support_size() > 1)
        fail(6, "multi-point functional at seed level " + std::to_string(n));
      // (7) exact recomposition of composites
      if (d.composite) {
        if (!(1 <= d.k && d.k < d.l && d.l <= n - 1))
          fail(7, "levels of parents out of range at " + where(n, idx));
        else if (recompose(d) != d.coords)
          fail(7, "recomposition mismatch at " + where(n, idx));
        else if (d.exponent_at(d.top) != std::optional<Exponent>(0) ||
                 d.max_support() != d.top)
          fail(7, "top coordinate malformed at " + where(n, idx));
      }
    }
    // (6) uniqueness: for n >= 3, tops of composites are exactly Delta_n
    if (n >= 3) {
      if (multi_count != lvl.interval.size())
        fail(6, "level " + std::to_string(n) + " has " + std::to_string(multi_count) +
                    " multi-point functionals for " + std::to_string(lvl.interval.size()) +
                    " coordinates");
      for (std::uint64_t j = 0; j < lvl.n_composites; ++j) {
        const Functional& d = lvl.members[j];
        if (d.support_size() <= 1 || d.top != lvl.interval.lo + j) {
          fail(6, "composite top not unique at " + where(n, j));
          break;
        }
      }
    }
  }
  for (int i = 1; i <= 7; ++i) rep.add(std::move(p[i]));
  return rep;
}

nlohmann::ordered_json ConstructionState::to_json() const {
  nlohmann::ordered_json out;
  out["format"] = "l1predual-state";
  out["version"] = 1;
  out["b"] = rat_to_string(b_);
  out["max_coordinate"] = max_coordinate();
  auto levels = nlohmann::ordered_json::array();
  for (std::uint32_t n = 1; n <= num_levels(); ++n) {
    const LevelData& lvl = levels_[n - 1];
    nlohmann::ordered_json jl;
    jl["n"] = n;
    jl["interval"] = {lvl.interval.lo, lvl.interval.hi};
    auto comps = nlohmann::ordered_json::array();
    for (std::uint64_t j = 0; j < lvl.n_composites; ++j) {
      const Functional& d = lvl.members[j];
      nlohmann::ordered_json jc;
      jc["top"] = d.top;
      jc["xi"] = {d.xi.level, d.xi.index};
      jc["eta"] = {d.eta.level, d.eta.index};
      jc["k"] = d.k;
      jc["l"] = d.l;
      auto coords = nlohmann::ordered_json::array();
      for (const auto& [c, e] : d.coords) coords.push_back({c, e});
      jc["coords"] = std::move(coords);
      comps.push_back(std::move(jc));
    }
    jl["composites"] = std::move(comps);
    levels.push_back(std::move(jl));
  }
  out["levels"] = std::move(levels);
  auto sigma = nlohmann::ordered_json::array();
  for (std::uint32_t n = 3; n <= num_levels(); ++n) {
    const LevelData& lvl = levels_[n - 1];
    nlohmann::ordered_json js;
    js["n"] = n - 1;  // Sigma_{n-1} produced level n
    auto pairs = nlohmann::ordered_json::array();
    for (std::uint64_t j = 0; j < lvl.sigma_pairs.size(); ++j) {
      nlohmann::ordered_json jp;
      jp["xi"] = {lvl.sigma_pairs[j].first.level, lvl.sigma_pairs[j].first.index};
      jp["eta"] = {lvl.sigma_pairs[j].second.level, lvl.sigma_pairs[j].second.index};
      jp["top"] = lvl.interval.lo + j;
      pairs.push_back(std::move(jp));
    }
    js["pairs"] = std::move(pairs);
    sigma.push_back(std::move(js));
  }
  out["sigma"] = std::move(sigma);
  return out;
}

namespace {

FuncRef ref_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() ||
      !j[1].is_number_unsigned())
    throw IoError(std::string("state document: malformed reference in ") + what);
  return {j[0].get<std::uint32_t>(), j[1].get<std::uint64_t>()};
}

}  // namespace

ConstructionState ConstructionState::from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "l1predual-state")
      throw IoError("state document: wrong or missing format tag");
    if (doc.value("version", -1) != 1)
      throw IoError("state document: unsupported schema version");
    Rat b = rat_from_string(doc.at("b").get<std::string>());
    if (!(b > 0) || !(b < Rat(1, 4)))
      throw IoError("state document: b outside (0, 1/4)");
    ConstructionState st = create(b);
    const auto& levels = doc.at("levels");
    if (!levels.is_array() || levels.size() < 2)
      throw IoError("state document: levels array missing or too short");
    // member counts per level, for reference validation
    std::vector<std::uint64_t> member_count{1, 1};
    for (std::uint32_t n = 1; n <= levels.size(); ++n) {
      const auto& jl = levels[n - 1];
      if (jl.value("n", 0u) != n) throw IoError("state document: levels out of order");
      const auto& ji = jl.at("interval");
      Interval iv{ji.at(0).get<Coord>(), ji.at(1).get<Coord>()};
      const auto& comps = jl.at("composites");
      if (n <= 2) {
        if (iv != Interval{n, n} || !comps.empty())
          throw IoError("state document: malformed seed level");
        continue;
      }
      Coord prev_hi = st.max_coordinate();
      if (iv.lo != prev_hi + 1 || iv.empty())
        throw IoError("state document: interval of level " + std::to_string(n) +
                      " not adjacent");
      if (!comps.is_array() || comps.size() != iv.size())
        throw IoError("state document: composite count mismatch at level " +
                      std::to_string(n));
      LevelData lvl;
      lvl.interval = iv;
      lvl.n_composites = iv.size();
      lvl.members.reserve(2 * iv.size());
      for (std::uint64_t j = 0; j < comps.size(); ++j) {
        const auto& jc = comps[j];
        Functional d;
        d.level = n;
        d.composite = true;
        d.top = jc.at("top").get<Coord>();
        if (d.top != iv.lo + j)
          throw IoError("state document: composite top out of order at level " +
                        std::to_string(n));
        d.xi = ref_from_json(jc.at("xi"), "xi");
        d.eta = ref_from_json(jc.at("eta"), "eta");
        d.k = jc.at("k").get<std::uint32_t>();
        d.l = jc.at("l").get<std::uint32_t>();
        if (d.xi.level != d.k || d.eta.level != d.l || !(1 <= d.k) || !(d.k < d.l) ||
            !(d.l <= n - 1))
          throw IoError("state document: parent levels malformed at level " +
                        std::to_string(n));
        if (d.xi.index >= member_count[d.k - 1] || d.eta.index >= member_count[d.l - 1])
          throw IoError("state document: parent reference out of range at level " +
                        std::to_string(n));
        const auto& jcoords = jc.at("coords");
        if (!jcoords.is_array() || jcoords.empty())
          throw IoError("state document: empty coords at level " + std::to_string(n));
        for (const auto& pair : jcoords) {
          if (!pair.is_array() || pair.size() != 2)
            throw IoError("state document: malformed coordinate pair");
          d.coords.emplace_back(pair[0].get<Coord>(), pair[1].get<Exponent>());
        }
        for (std::size_t t = 1; t < d.coords.size(); ++t)
          if (d.coords[t].first <= d.coords[t - 1].first)
            throw IoError("state document: coords not strictly increasing");
        lvl.sigma_pairs.push_back({d.xi, d.eta});
        lvl.members.push_back(std::move(d));
      }
      for (Coord i = iv.lo; i <= iv.hi; ++i) {
        Functional e;
        e.coords = {{i, 0}};
        e.level = n;
        e.top = i;
        lvl.members.push_back(std::move(e));
      }
      member_count.push_back(lvl.members.size());
      st.levels_.push_back(std::move(lvl));
    }
    // sigma block must agree with the composites
    const auto& sigma = doc.at("sigma");
    if (!sigma.is_array() || sigma.size() + 2 != st.num_levels())
      throw IoError("state document: sigma registry size mismatch");
    for (std::uint32_t n = 3; n <= st.num_levels(); ++n) {
      const auto& js = sigma[n - 3];
      if (js.value("n", 0u) != n - 1)
        throw IoError("state document: sigma registry out of order");
      const auto& pairs = js.at("pairs");
      const LevelData& lvl = st.levels_[n - 1];
      if (!pairs.is_array() || pairs.size() != lvl.n_composites)
        throw IoError("state document: sigma pair count mismatch");
      for (std::uint64_t j = 0; j < pairs.size(); ++j) {
        FuncRef xi = ref_from_json(pairs[j].at("xi"), "sigma xi");
        FuncRef eta = ref_from_json(pairs[j].at("eta"), "sigma eta");
        if (!(xi == lvl.sigma_pairs[j].first) || !(eta == lvl.sigma_pairs[j].second) ||
            pairs[j].at("top").get<Coord>() != lvl.interval.lo + j)
          throw IoError("state document: sigma registry disagrees with composites");
      }
    }
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("state document: ") + e.what());
  }
}

void ConstructionState::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << to_json().dump(1) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

ConstructionState ConstructionState::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse '") + path + "': " + e.what());
  }
  return from_json(doc);
}

}  // namespace l1predual
