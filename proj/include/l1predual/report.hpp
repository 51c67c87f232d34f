#pragma once

#include "l1predual/core.hpp"

#include <nlohmann/json.hpp>

namespace l1predual {

// One verified assertion. `lhs`/`rhs` carry the exact rational values of the
// two sides when the check compares numbers; `detail` carries the first
// counterexample on failure.
struct CheckResult {
  std::string id;
  bool pass = true;
  std::string lhs;
  std::string rhs;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void append(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
  void sort_by_id();

  nlohmann::ordered_json to_json() const;
  std::string to_markdown() const;
};

}  // namespace l1predual
