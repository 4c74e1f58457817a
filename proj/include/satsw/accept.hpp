#pragma once

#include <string>
#include <vector>

namespace satsw::accept {

struct CriterionResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

/// Runs the release acceptance criteria end-to-end on the bundled benchmark
/// fixtures.  fast skips the full sweep-dependent criteria.
std::vector<CriterionResult> runAcceptanceSuite(bool fast = false);

std::string formatResults(const std::vector<CriterionResult>& results);
std::string resultsJson(const std::vector<CriterionResult>& results);
bool allPassed(const std::vector<CriterionResult>& results);

}  // namespace satsw::accept
