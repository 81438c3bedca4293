#pragma once

#include <utility>
#include <vector>

#include "orbitmetrics/rational.hpp"

namespace orbitmetrics::matching {

/// Square matrix of pairwise costs; entries must be >= 0.
using CostMatrix = std::vector<std::vector<Rational>>;

struct Matching {
    std::vector<int> assignment;  // row i pairs with column assignment[i]
    Rational totalCost;
    Rational meanCost;  // totalCost / n
};

/// Exact minimum-cost perfect assignment (Kuhn–Munkres with potentials), O(n^3).
[[nodiscard]] Matching solveMinAssignment(const CostMatrix& cost);

/// Exact maximum-cost perfect assignment (negated-cost reduction).
[[nodiscard]] Matching solveMaxAssignment(const CostMatrix& cost);

/// Exhaustive enumeration over all n! permutations; oracle for the solvers. n <= 9.
[[nodiscard]] Matching bruteForceAssignment(const CostMatrix& cost, bool maximize = false);

/// min over permutations of #{i : cost[i][perm(i)] > threshold}
/// == n minus the maximum bipartite matching on edges with cost <= threshold.
[[nodiscard]] int minExceedanceCount(const CostMatrix& cost, const Rational& threshold);

/// Oracle companion for minExceedanceCount; n <= 9.
[[nodiscard]] int bruteForceExceedanceCount(const CostMatrix& cost, const Rational& threshold);

/// min/max over permutations of #{i in A : perm(i) in B} for A, B of the given
/// sizes inside {1..n}; closed forms max(0, a+b-n) and min(a, b).
[[nodiscard]] long minJointVisitCount(long a, long b, long n);
[[nodiscard]] long maxJointVisitCount(long a, long b, long n);

enum class FastPathVerify { none, crossCheck };

/// Min-cost assignment for line costs |x - y|: sort both sides, pair in order.
[[nodiscard]] Matching solveSortedLine(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                       FastPathVerify verify = FastPathVerify::none);

/// Max-cost assignment for line costs: ascending against descending.
[[nodiscard]] Matching solveSortedLineMax(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                          FastPathVerify verify = FastPathVerify::none);

/// Min-cost assignment for circle geodesic costs min(|x-y|, 1-|x-y|); points in
/// [0,1). Sorts both sides and scans all n cyclic offsets of the pairing.
/// crossCheck recomputes via solveMinAssignment and falls back on discrepancy.
[[nodiscard]] Matching solveSortedCircle(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                         FastPathVerify verify = FastPathVerify::none);

/// Max-cost circle assignment via the antipodal identity d(a,b) = 1/2 - d(a, b+1/2).
[[nodiscard]] Matching solveSortedCircleMax(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                            FastPathVerify verify = FastPathVerify::none);

/// Exceedance fast paths on sorted values; exact, backed by maximum matching
/// over contiguous candidate ranges. Circle points must lie in [0,1).
[[nodiscard]] int lineExceedanceCount(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                      const Rational& threshold);
[[nodiscard]] int circleExceedanceCount(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                        const Rational& threshold);

}  // namespace orbitmetrics::matching
