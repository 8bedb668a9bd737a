#pragma once

#include <string>
#include <vector>

namespace treeperc {

struct SelfTestCase {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Closed-form and construction-level checks across all modules; seconds to run.
std::vector<SelfTestCase> run_selftest();

}  // namespace treeperc
