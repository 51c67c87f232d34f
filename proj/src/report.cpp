#include "l1predual/report.hpp"

#include <algorithm>

namespace l1predual {

void Report::sort_by_id() {
  std::stable_sort(checks.begin(), checks.end(),
                   [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json out;
  out["format"] = "l1predual-report";
  out["version"] = 1;
  out["pass"] = all_pass();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["pass"] = c.pass;
    if (!c.lhs.empty()) j["lhs"] = c.lhs;
    if (!c.rhs.empty()) j["rhs"] = c.rhs;
    if (!c.detail.empty()) j["detail"] = c.detail;
    arr.push_back(std::move(j));
  }
  out["checks"] = std::move(arr);
  return out;
}

std::string Report::to_markdown() const {
  std::string out;
  out += "| check | pass | lhs | rhs | detail |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& c : checks) {
    out += "| " + c.id + " | " + (c.pass ? "pass" : "FAIL") + " | " + c.lhs + " | " +
           c.rhs + " | " + c.detail + " |\n";
  }
  out += all_pass() ? "\nall checks passed\n" : "\nFAILURES present\n";
  return out;
}

}  // namespace l1predual
