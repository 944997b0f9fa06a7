#pragma once

// Self-test oracle suites behind `koiter verify`. Each check compares a
// computed quantity against an independent reference at a pinned tolerance.

#include <string>
#include <vector>

namespace koiter {

struct CheckResult {
    std::string suite;
    std::string name;
    double error = 0.0;     ///< measured discrepancy
    double tolerance = 0.0; ///< pass when error <= tolerance
    bool passed = false;
};

/// Suite names accepted by run_verify_suites.
std::vector<std::string> verify_suite_names();

/// Runs the named suites (all when empty): gateaux, characteristics,
/// skew_adjointness, dispersion. Throws ValidationError for an unknown name.
std::vector<CheckResult> run_verify_suites(const std::vector<std::string>& suites = {});

} // namespace koiter
