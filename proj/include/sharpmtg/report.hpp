#ifndef SHARPMTG_REPORT_HPP
#define SHARPMTG_REPORT_HPP

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace sharpmtg {

/// One verification outcome. `max_residual` is the worst signed value of the
/// quantity that must be <= 0 (after tolerance scaling where applicable).
struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  int grid_size = 0;
  double location = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

struct ConstantsReport {
  double p = 0.0;
  double z_p = 0.0;
  double c_p = 0.0;
  double a_p = 0.0;
  double i_p = 0.0;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

/// Numbers are rounded to 15 significant digits; NaN and infinities become null.
nlohmann::json json_number(double x);

/// {p, z_p, c_p, a_p, i_p, checks: [{name, max_violation, grid_size, pass}]}
nlohmann::json to_json(const ConstantsReport& report);

/// {name, p, grid, max_residual, location_of_max, pass}
nlohmann::json to_json(const CheckResult& check, double p);

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace sharpmtg

#endif
