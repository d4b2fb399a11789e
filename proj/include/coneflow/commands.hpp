#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coneflow/config.hpp"
#include "coneflow/inequalities.hpp"

namespace coneflow {

// Exit codes shared by every subcommand.
enum ExitCode { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

// Every check of the inequality suite, one report per field or constant.
std::vector<InequalityReport> inequality_suite(const InequalityConfig& c);
// Every oracle of the exact-solution suite.
std::vector<InequalityReport> analytic_suite(const AnalyticConfig& c);

// Observed convergence order between two errors at spacings h1 > h2.
double observed_order(double e1, double e2, double h1, double h2);

std::string report_json(const InequalityReport& r);

int cmd_verify_inequalities(const std::string& config_path, std::ostream& log);
int cmd_solve(const std::string& config_path, std::ostream& log);
int cmd_diagnose(const std::string& config_path, std::ostream& log);
int cmd_analytic(const std::string& config_path, std::ostream& log);

}  // namespace coneflow
