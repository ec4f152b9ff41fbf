#include "sharpmtg/report.hpp"

#include <algorithm>
#include <cmath>

#include "sharpmtg/numeric.hpp"

namespace sharpmtg {

bool all_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

bool ConstantsReport::all_pass() const { return sharpmtg::all_pass(checks); }

const CheckResult* ConstantsReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig15(x);
}

nlohmann::json to_json(const ConstantsReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"max_violation", json_number(c.max_residual)},
                      {"grid_size", c.grid_size},
                      {"pass", c.pass}});
  }
  return {{"p", json_number(report.p)},     {"z_p", json_number(report.z_p)}, {"c_p", json_number(report.c_p)},
          {"a_p", json_number(report.a_p)}, {"i_p", json_number(report.i_p)}, {"checks", checks}};
}

nlohmann::json to_json(const CheckResult& check, double p) {
  return {{"name", check.name},
          {"p", json_number(p)},
          {"grid", check.grid_size},
          {"max_residual", json_number(check.max_residual)},
          {"location_of_max", json_number(check.location)},
          {"pass", check.pass}};
}

}  // namespace sharpmtg
