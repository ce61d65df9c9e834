#pragma once

#include <string>
#include <vector>

#include "tilepress/config.hpp"

namespace tilepress {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // measured values
};

/// Runs the bundled property suite (module invariants at config scale).
/// Pure given the config; sampled checks use fixed seeds.
std::vector<CheckResult> run_verification(const RunConfig& cfg, int threads);

} // namespace tilepress
