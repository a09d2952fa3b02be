#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nsbf {

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast property checks over seeded random draws: vectorization and
/// nulling identities, rate forms, case analysis, the SDP solver and the
/// solve-count law. Takes a few seconds.
std::vector<SelfTestResult> run_selftest(std::uint64_t seed = 1);

/// Prints one line per check; returns true when all passed.
bool report_selftest(std::ostream& os, const std::vector<SelfTestResult>& results);

}  // namespace nsbf
