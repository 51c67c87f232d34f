// Command-line front end: builds construction states, runs the verification
// suites, and exposes norm brackets, derivative calculus and block witnesses.
// Batch, non-interactive; exit codes: 0 pass, 1 check failure, 2 usage or
// config error, 3 I/O error.

#include "l1predual/blocks.hpp"
#include "l1predual/checks.hpp"
#include "l1predual/construction.hpp"
#include "l1predual/norms.hpp"
#include "l1predual/operators.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <set>

namespace {

using namespace l1predual;
using nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void emit(const ordered_json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(1) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << doc.dump(1) << "\n";
  if (!out) throw IoError("write failed for '" + out_path + "'");
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + out_path + "'");
}

SparseVector parse_vector(const std::string& text) {
  std::vector<std::pair<Coord, Rat>> entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("vector entries use coord:value, got '" + item + "'");
    std::string cs = item.substr(0, colon);
    if (cs.empty() || cs.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("invalid coordinate '" + cs + "'");
    entries.emplace_back(std::stoull(cs), rat_from_string(item.substr(colon + 1)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (entries.empty()) throw ConfigError("empty vector");
  return SparseVector::from_pairs(std::move(entries));
}

BlockBasis parse_blocks_shorthand(const std::string& text) {
  // e1,e2,e5: unit blocks
  BlockBasis bb;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (item.size() < 2 || item[0] != 'e' ||
        item.find_first_not_of("0123456789", 1) != std::string::npos)
      throw ConfigError("block shorthand uses e<coord>, got '" + item + "'");
    BlockVector blk;
    blk.v = SparseVector::unit(std::stoull(item.substr(1)));
    blk.designated = blk.v.entries.front().first;
    bb.blocks.push_back(std::move(blk));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return bb;
}

BlockBasis parse_blocks_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse '") + path + "': " + e.what());
  }
  BlockBasis bb;
  try {
    for (const auto& jb : doc.at("blocks")) {
      BlockVector blk;
      std::vector<std::pair<Coord, Rat>> entries;
      for (const auto& pair : jb.at("coords"))
        entries.emplace_back(pair.at(0).get<Coord>(),
                             rat_from_string(pair.at(1).get<std::string>()));
      blk.v = SparseVector::from_pairs(std::move(entries));
      if (jb.contains("designated")) blk.designated = jb["designated"].get<Coord>();
      bb.blocks.push_back(std::move(blk));
    }
    if (doc.contains("delta")) bb.delta = rat_from_string(doc["delta"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("block document: ") + e.what());
  }
  return bb;
}

ordered_json witness_json(const ConstructionState& st, const WitnessResult& w) {
  ordered_json out;
  out["F"] = w.F;
  const Functional& d = st.functional(w.functional);
  ordered_json jf;
  jf["level"] = w.functional.level;
  jf["index"] = w.functional.index;
  auto coords = ordered_json::array();
  for (const auto& [c, e] : d.coords)
    coords.push_back({c, rat_to_string(st.powers()[e])});
  jf["coords"] = std::move(coords);
  out["functional"] = std::move(jf);
  auto lineage = ordered_json::array();
  for (const FuncRef& r : w.lineage) lineage.push_back({r.level, r.index});
  out["lineage"] = std::move(lineage);
  auto values = ordered_json::array();
  for (const Rat& v : w.values) values.push_back(rat_to_string(v));
  out["values"] = std::move(values);
  out["delta"] = rat_to_string(w.delta);
  out["support_size"] = d.support_size();
  return out;
}

struct CommonOpts {
  std::string state_path;
  std::string out_path;
  std::string format = "json";
};

int run_build(const std::string& b_text, std::uint32_t levels, Coord max_coord,
              const CommonOpts& common) {
  ConstructionState st = ConstructionState::create(rat_from_string(b_text));
  while (st.num_levels() < levels) {
    try {
      st.extend_level(max_coord);
    } catch (const BudgetError& e) {
      std::cerr << "stopped before level " << st.num_levels() + 1 << ": " << e.what()
                << "\n";
      break;
    }
  }
  if (!common.state_path.empty()) st.save(common.state_path);
  ordered_json doc;
  doc["b"] = rat_to_string(st.b());
  doc["levels"] = st.num_levels();
  auto sizes = ordered_json::array();
  for (std::uint32_t n = 1; n <= st.num_levels(); ++n)
    sizes.push_back(st.level(n).interval.size());
  doc["delta_sizes"] = std::move(sizes);
  doc["max_coordinate"] = st.max_coordinate();
  doc["functionals"] = st.total_functionals();
  if (!common.state_path.empty()) doc["state"] = common.state_path;
  if (common.format == "md") {
    std::string text = "| level | delta size |\n|---|---|\n";
    for (std::uint32_t n = 1; n <= st.num_levels(); ++n)
      text += "| " + std::to_string(n) + " | " +
              std::to_string(st.level(n).interval.size()) + " |\n";
    emit_text(text, common.out_path);
  } else {
    emit(doc, common.out_path);
  }
  return kExitPass;
}

const std::set<std::string> kKnownChecks = {"properties", "compat",  "thm21",      "biortho",
                                            "lower",      "lemma31", "derivatives"};

int run_verify(const CommonOpts& common, const std::string& checks_text, const Rat& eps,
               Exponent depth, std::uint64_t seed, std::uint64_t samples,
               Coord op_limit) {
  ConstructionState st = ConstructionState::load(common.state_path);
  std::set<std::string> selected;
  if (checks_text.empty()) {
    selected = kKnownChecks;
  } else {
    std::size_t pos = 0;
    while (pos <= checks_text.size()) {
      std::size_t comma = checks_text.find(',', pos);
      std::string item =
          checks_text.substr(pos, comma == std::string::npos ? comma : comma - pos);
      if (!kKnownChecks.count(item)) {
        std::string known;
        for (const auto& k : kKnownChecks) known += (known.empty() ? "" : ",") + k;
        throw ConfigError("unknown check '" + item + "'; known checks: " + known);
      }
      selected.insert(item);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  bool needs_operators = selected.count("compat") || selected.count("thm21") ||
                         selected.count("biortho") || selected.count("lower");
  if (needs_operators && st.max_coordinate() > op_limit)
    throw ConfigError("state has " + std::to_string(st.max_coordinate()) +
                      " coordinates; operator checks are capped at " +
                      std::to_string(op_limit) +
                      " (raise --op-coord-limit or rebuild smaller)");

  BracketOptions bopts;
  bopts.eps = eps;
  bopts.depth_max = depth;
  Report rep;
  std::uint32_t N = st.num_levels();
  if (selected.count("properties")) rep.append(st.verify_properties());
  if (selected.count("compat")) rep.append(compatibility_check(st, N));
  if (selected.count("thm21"))
    for (std::uint32_t n = 2; n <= N; ++n) {
      Report r = verify_dual_properties(st, n);
      for (CheckResult& c : r.checks) c.id += "[n=" + std::to_string(n) + "]";
      rep.append(r);
    }
  if (selected.count("biortho")) rep.append(biorthogonality_check(st, N));
  if (selected.count("lower")) rep.append(lower_estimate_suite(st, N, samples, seed));
  if (selected.count("lemma31")) {
    auto vecs = seeded_sparse_vectors(st.max_coordinate(), samples, 5, seed);
    rep.append(basis_bound_check(st, vecs, bopts));
  }
  if (selected.count("derivatives")) rep.append(derivative_suite(st));
  rep.sort_by_id();
  if (common.format == "md")
    emit_text(rep.to_markdown(), common.out_path);
  else
    emit(rep.to_json(), common.out_path);
  return rep.all_pass() ? kExitPass : kExitCheckFailure;
}

int run_norm(const CommonOpts& common, const std::string& vector_text, const Rat& eps,
             Exponent depth) {
  ConstructionState st = ConstructionState::load(common.state_path);
  SparseVector x = parse_vector(vector_text);
  BracketOptions opts;
  opts.eps = eps;
  opts.depth_max = depth;
  NormBracket br = norm_bracket(st, x, opts);
  ordered_json doc;
  doc["vector"] = x.to_string();
  doc["lower"] = rat_to_string(br.lower);
  doc["upper"] = rat_to_string(br.upper);
  doc["tail_term"] = rat_to_string(br.tail_term);
  ordered_json jw;
  jw["level"] = br.witness.level;
  jw["index"] = br.witness.index;
  jw["interval"] = {br.witness_interval.lo, br.witness_interval.hi};
  jw["value"] = rat_to_string(br.witness_value);
  doc["witness"] = std::move(jw);
  doc["width_achieved"] = br.width_achieved;
  doc["depth_used"] = br.depth_used;
  if (common.format == "md") {
    emit_text("| lower | upper |\n|---|---|\n| " + rat_to_string(br.lower) + " | " +
                  rat_to_string(br.upper) + " |\n",
              common.out_path);
  } else {
    emit(doc, common.out_path);
  }
  return kExitPass;
}

int run_derive(const CommonOpts& common, const std::string& family_text,
               std::uint64_t iterations) {
  Family fam = Family::parse(family_text);
  Family result = fam.iterated_derivative(iterations);
  ordered_json doc;
  doc["family"] = fam.descriptor();
  doc["iterations"] = iterations;
  doc["result"] = result.descriptor();
  if (result.kind() == Family::Kind::Empty)
    doc["note"] = "empty family: the corresponding product space has no points";
  else if (result.descriptor() == "An:0")
    doc["note"] = "{emptyset}: the product space holds the zero point only";
  emit(doc, common.out_path);
  return kExitPass;
}

int run_witness(const CommonOpts& common, const std::string& blocks_text,
                const std::string& blocks_file, const std::string& delta_text,
                std::uint32_t k) {
  ConstructionState st = ConstructionState::load(common.state_path);
  BlockBasis bb;
  if (!blocks_file.empty())
    bb = parse_blocks_file(blocks_file);
  else if (!blocks_text.empty())
    bb = parse_blocks_shorthand(blocks_text);
  else
    throw ConfigError("witness needs --blocks or --blocks-file");
  std::optional<Rat> delta;
  if (!delta_text.empty()) delta = rat_from_string(delta_text);
  WitnessResult w = l1_witness(st, bb, delta, k);
  if (!validate_witness(st, bb, w, k))
    throw std::logic_error("witness failed re-validation");
  emit(witness_json(st, w), common.out_path);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-stage construction and verification of an l1-predual norming set"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string b_text = "1/5";
  std::uint32_t levels = 4;
  Coord max_coord = 100000;
  std::string checks_text, vector_text, family_text, blocks_text, blocks_file, delta_text;
  std::string eps_text = "1/1000";
  Exponent depth = 8;
  std::uint64_t iterations = 1, seed = 1, samples = 200;
  std::uint32_t k = 2;
  Coord op_limit = 400;

  auto add_common = [&](CLI::App* cmd, bool with_state) {
    cmd->add_option("--out", common.out_path, "write the result document here");
    cmd->add_option("--format", common.format, "json or md")
        ->check(CLI::IsMember({"json", "md"}));
    if (with_state)
      cmd->add_option("--state", common.state_path, "state document path")->required();
  };

  CLI::App* cb = app.add_subcommand("build", "build a construction state");
  cb->add_option("--b", b_text, "the scalar b as p/q, 0 < b < 1/4");
  cb->add_option("--levels", levels, "target number of levels");
  cb->add_option("--max-coord", max_coord, "coordinate budget");
  cb->add_option("--out", common.out_path, "write the summary document here");
  cb->add_option("--state", common.state_path, "write the state document here");
  cb->add_option("--format", common.format, "json or md")
      ->check(CLI::IsMember({"json", "md"}));

  CLI::App* cv = app.add_subcommand("verify", "run verification suites on a state");
  add_common(cv, true);
  cv->add_option("--checks", checks_text,
                 "comma list: properties,compat,thm21,biortho,lower,lemma31,derivatives");
  cv->add_option("--eps", eps_text, "bracket tolerance");
  cv->add_option("--depth", depth, "bracket depth cap");
  cv->add_option("--seed", seed, "sample seed");
  cv->add_option("--samples", samples, "sample count for seeded sweeps");
  cv->add_option("--op-coord-limit", op_limit, "refuse operator checks beyond this size");

  CLI::App* cn = app.add_subcommand("norm", "certified norm bracket of a vector");
  add_common(cn, true);
  cn->add_option("--vector", vector_text, "comma list coord:value")->required();
  cn->add_option("--eps", eps_text, "bracket tolerance");
  cn->add_option("--depth", depth, "bracket depth cap");

  CLI::App* cd = app.add_subcommand("derive", "iterated derivative of a family");
  add_common(cd, false);
  cd->add_option("--family", family_text, "An:<n> | schreier+2 | restrict(<base>,<M>)")
      ->required();
  cd->add_option("--iterations", iterations, "number of derivatives");

  CLI::App* cw = app.add_subcommand("witness", "l1 lower-bound witness for blocks");
  add_common(cw, true);
  cw->add_option("--k", k, "witness size");
  cw->add_option("--blocks", blocks_text, "unit shorthand e1,e2,...");
  cw->add_option("--blocks-file", blocks_file, "block document path");
  cw->add_option("--delta", delta_text, "designated value threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (cb->parsed()) return run_build(b_text, levels, max_coord, common);
    if (cv->parsed())
      return run_verify(common, checks_text, l1predual::rat_from_string(eps_text), depth,
                        seed, samples, op_limit);
    if (cn->parsed())
      return run_norm(common, vector_text, l1predual::rat_from_string(eps_text), depth);
    if (cd->parsed()) return run_derive(common, family_text, iterations);
    if (cw->parsed()) return run_witness(common, blocks_text, blocks_file, delta_text, k);
    std::cerr << "no subcommand\n";
    return kExitConfig;
  } catch (const l1predual::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const l1predual::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const l1predual::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const l1predual::InsufficientLevelsError& e) {
    std::cerr << "insufficient levels: " << e.what() << "\n";
    return kExitCheckFailure;
  } catch (const l1predual::NoDesignatedError& e) {
    std::cerr << "no designated coordinates: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}
