#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ebql {

struct AcceptanceOptions {
    int jobs = 1;
    // Scratch directory for the determinism criterion's CSV outputs.
    std::filesystem::path scratch_dir = std::filesystem::temp_directory_path() / "ebql-verify";
};

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Runs every acceptance criterion, printing one PASS/FAIL line per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace ebql
