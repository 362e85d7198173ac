#pragma once
// Named acceptance suites. Each criterion yields one result line; an
// exploratory criterion reports its numbers and never fails the run.

#include <string>
#include <string_view>
#include <vector>

#include "mobius/experiment.hpp"

namespace mobius {

struct CriterionResult {
    std::string id;           // "C1" ...
    std::string title;
    bool passed = false;
    bool exploratory = false;
    double seconds = 0.0;
    std::string detail;
};

struct SuiteInfo {
    std::string name;
    std::string description;
};

std::vector<SuiteInfo> available_suites();

// Runs a suite. config.x_list, when non-empty, overrides the default x of the
// size-scalable criteria; config.workers sets the sieve pool. Throws
// ParameterError listing the available suites for an unknown name.
std::vector<CriterionResult> run_suite(std::string_view name, const RunConfig& config);

// "[PASS] C1 ... (0.12 s) detail" style line.
std::string format_result(const CriterionResult& r);

bool all_hard_passed(const std::vector<CriterionResult>& results);

}  // namespace mobius
