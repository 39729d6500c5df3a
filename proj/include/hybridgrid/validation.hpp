#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hybridgrid {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast oracle-equivalence and invariant checks (a few seconds in total).
/// With a cache directory, every curve file in it is loaded and validated too.
std::vector<CheckResult> run_self_checks(const std::optional<std::filesystem::path>& cache_dir = {},
                                         int threads = 1);

}  // namespace hybridgrid
