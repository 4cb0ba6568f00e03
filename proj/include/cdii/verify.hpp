#pragma once

// Built-in verification suite: pinned scenarios with frozen oracle values and
// tolerances, each returning a named pass/fail result with the measured
// numbers. Wall-clock measurements stay out of the JSON view so that repeated
// runs serialize identically.

#include "cdii/report.hpp"

#include <string>
#include <vector>

namespace cdii {

struct CheckResult {
    std::string name;
    bool pass = false;
    double seconds = 0.0; // wall time, console-only
    json details;
};

struct VerifySuite {
    std::vector<CheckResult> checks;
    bool all_pass = false;
};

VerifySuite run_verification();

json to_json(const VerifySuite& s); // omits timing

} // namespace cdii
