#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hpmean/geometry.hpp"

namespace hpmean::verification {

struct VerifyOptions {
    std::uint64_t seed = 20240611;
    Execution execution = Execution::Parallel;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CriterionResult {
    std::string id;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<CriterionResult(const VerifyOptions&)> run;
};

/// Acceptance criteria "1" ... "10" followed by the boundary-gap decay check "gap".
const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `ids` is empty) and prints one line per
/// criterion, followed by indented per-check lines. Throws InvalidArgument on an unknown id.
std::vector<CriterionResult> run(const std::vector<std::string>& ids, const VerifyOptions& options,
                                 std::ostream& out);

}  // namespace hpmean::verification
