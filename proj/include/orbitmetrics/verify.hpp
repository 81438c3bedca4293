#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbitmetrics/orbitstats.hpp"

namespace orbitmetrics::verify {

enum class VerifyLevel { quick, full };
[[nodiscard]] std::string verifyLevelName(VerifyLevel level);

struct SuiteResult {
    std::string name;
    std::size_t checksRun = 0;
    std::size_t failures = 0;
    std::string firstFailure;  // names the violated invariant
    [[nodiscard]] bool passed() const { return failures == 0; }
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::quick;
    std::vector<SuiteResult> suites;
    [[nodiscard]] bool allPassed() const;
    [[nodiscard]] std::size_t totalChecks() const;
};

// Each suite cross-checks an implementation route against an independent one
// (enumeration oracles, closed forms, or exact inequalities). The acceptance
// harness calls them with its own pinned sizes; runVerify picks level presets.

/// Assignment solvers and the exceedance count vs full permutation enumeration
/// on random exact-rational cost matrices, n = 2..maxN.
[[nodiscard]] SuiteResult checkSolverOracles(std::size_t instancesPerSize, std::size_t maxN,
                                             std::uint64_t seed);

/// Sorted line/circle fast paths vs the dense solver on random point sets.
[[nodiscard]] SuiteResult checkFastPathEquivalence(std::size_t instancesPerSize,
                                                   const std::vector<std::size_t>& sizes,
                                                   std::uint64_t seed);

/// Weak-mean symmetry (exact) and triangle inequality (within twice the
/// truncation bound) on random segment triples across all four space kinds.
[[nodiscard]] SuiteResult checkPseudometricLaws(std::size_t triplesPerSpace,
                                                const std::vector<std::size_t>& lengths,
                                                std::uint64_t seed);

/// eps * exceedance <= weakMean <= diam * exceedance + eps, exactly.
[[nodiscard]] SuiteResult checkExceedanceSandwich(std::size_t evaluations, std::uint64_t seed);

/// |F_n(Tx, y) - F_n(x, y)| <= diam(X)/n, exactly.
[[nodiscard]] SuiteResult checkShiftStability(std::size_t pairs,
                                              const std::vector<std::size_t>& lengths,
                                              std::uint64_t seed);

/// Joint-visit closed forms vs brute force, exhaustive over (a, b, n), n <= maxN.
[[nodiscard]] SuiteResult checkJointVisitClosedForm(std::size_t maxN);

/// Count/cost sandwich for observables plus the Lipschitz contraction
/// (observable statistic <= L * weakMean).
[[nodiscard]] SuiteResult checkObservableSandwich(std::size_t evaluations, std::uint64_t seed);

[[nodiscard]] VerifyReport runVerify(VerifyLevel level, std::uint64_t seed = 0x5EEDULL);

}  // namespace orbitmetrics::verify
