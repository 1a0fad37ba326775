#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aircomp {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidateOptions {
    std::uint64_t seed = 12345;
    bool quick = false;
    /// Test-only hook: "cno-noise" doubles the noise term inside the CNO
    /// identity check, which must make that check fail.
    std::string inject_fault;
};

/// Structural property suite over randomized desk-scale instances: descent,
/// feasibility, KKT residuals, alignment, algebraic identities, and oracle
/// agreement. Deterministic for a fixed seed.
std::vector<CheckResult> run_validation(const ValidateOptions& options);

}  // namespace aircomp
