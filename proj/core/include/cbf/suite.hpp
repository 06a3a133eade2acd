#pragma once

#include <string>
#include <vector>

#include "cbf/config.hpp"

namespace cbf {

struct CheckResult {
    std::string name;
    std::string status;  // pass | fail | error | skipped
    double gap = 0.0;
    double tolerance = 0.0;
    double runtime_s = 0.0;
    std::string note;

    bool ok() const { return status == "pass"; }
};

struct SuiteResult {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.ok()) return false;
        return true;
    }
};

// Runs the full verification battery (operator identities, monotonicity
// sweeps, solver orders, absorbing sets, noise statistics, RDS structure,
// continuity, upper semicontinuity) and writes verify_probes.csv,
// verify_checks.csv and verify_summary.txt into out_dir.  The battery fixes
// mu = beta = 1 and r in {3, 5}; grid, step sizes, seeds and thread count
// come from cfg.  Output CSV bytes depend only on cfg.
SuiteResult run_suite(const RunConfig& cfg, const std::string& out_dir);

}  // namespace cbf
