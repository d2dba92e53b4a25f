#pragma once

#include <string>
#include <vector>

namespace adaptis {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast smoke checks of the library invariants (a few seconds).
std::vector<CheckResult> run_selftest();

}  // namespace adaptis
