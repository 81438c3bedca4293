#include "orbitmetrics/matching.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace orbitmetrics::matching {

namespace {

void validateSquare(const CostMatrix& cost, bool requireNonNegative = true) {
    const std::size_t n = cost.size();
    if (n == 0) throw std::invalid_argument("assignment: empty cost matrix");
    for (const auto& row : cost) {
        if (row.size() != n) throw std::invalid_argument("assignment: cost matrix is not square");
        if (requireNonNegative) {
            for (const auto& c : row) {
                if (c < 0) throw std::invalid_argument("assignment: negative cost entry");
            }
        }
    }
}

Matching finishMatching(const CostMatrix& cost, std::vector<int> assignment) {
    Rational total = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) total += cost[i][assignment[i]];
    Rational mean = total / Rational(static_cast<long>(assignment.size()));
    mean.canonicalize();
    total.canonicalize();
    return Matching{std::move(assignment), std::move(total), std::move(mean)};
}

// Kuhn–Munkres with row/column potentials, 1-indexed with virtual column 0.
// All arithmetic exact; "infinity" is modelled with optionals.
std::vector<int> hungarian(const CostMatrix& a) {
    const int n = static_cast<int>(a.size());
    std::vector<Rational> u(n + 1, Rational(0)), v(n + 1, Rational(0));
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<std::optional<Rational>> minv(n + 1);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            std::optional<Rational> delta;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                Rational cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (!minv[j] || cur < *minv[j]) {
                    minv[j] = std::move(cur);
                    way[j] = j0;
                }
                if (!delta || *minv[j] < *delta) {
                    delta = *minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += *delta;
                    v[j] -= *delta;
                } else if (minv[j]) {
                    *minv[j] -= *delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] != 0) assignment[p[j] - 1] = j - 1;
    }
    return assignment;
}

// Deterministic sort of values carrying their original index; ties break by index.
std::vector<int> sortedOrder(const std::vector<Rational>& vals) {
    std::vector<int> idx(vals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const int c = cmp(vals[a], vals[b]);
        if (c != 0) return c < 0;
        return a < b;
    });
    return idx;
}

void validatePair(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    if (xs.empty() || xs.size() != ys.size())
        throw std::invalid_argument("sorted fast path: sides must be nonempty and of equal size");
}

void validateUnitValues(const std::vector<Rational>& vals) {
    for (const auto& v : vals) {
        if (v < 0 || v >= 1) throw std::invalid_argument("circle fast path: values must lie in [0,1)");
    }
}

// Common-denominator integer lane for the cyclic offset scan. Per-entry costs
// are below the lcm D, so sums fit unsigned __int128 whenever
// bits(D) + bits(n) stays clear of 128; callers fall back to mpq otherwise.
struct IntegerLane {
    bool usable = false;
    Integer den;                        // common denominator D
    std::vector<unsigned __int128> xs;  // numerators over D, already sorted
    std::vector<unsigned __int128> ys;
    unsigned __int128 d = 0;
};

unsigned __int128 toUint128(const Integer& z) {
    unsigned __int128 r = 0;
    // z >= 0 and fits in 128 bits by construction at the call sites.
    const std::size_t limbs = mpz_size(z.get_mpz_t());
    for (std::size_t i = limbs; i-- > 0;) {
        r = (r << 64) | static_cast<std::uint64_t>(mpz_getlimbn(z.get_mpz_t(), i));
    }
    return r;
}

IntegerLane buildIntegerLane(const std::vector<Rational>& xsSorted, const std::vector<Rational>& ysSorted) {
    IntegerLane lane;
    Integer d = 1;
    for (const auto& v : xsSorted) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), v.get_den().get_mpz_t());
    for (const auto& v : ysSorted) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), v.get_den().get_mpz_t());
    const std::size_t bits = mpz_sizeinbase(d.get_mpz_t(), 2);
    std::size_t nBits = 1;
    while ((std::size_t{1} << nBits) < xsSorted.size() + 1) ++nBits;
    if (bits + nBits > 120) return lane;  // costs <= D, so sums stay far from 2^128

    auto convert = [&](const std::vector<Rational>& vals, std::vector<unsigned __int128>& out) {
        out.reserve(vals.size());
        for (const auto& v : vals) {
            Integer num = v.get_num() * (d / v.get_den());
            out.push_back(toUint128(num));
        }
    };
    convert(xsSorted, lane.xs);
    convert(ysSorted, lane.ys);
    lane.den = d;
    lane.d = toUint128(d);
    lane.usable = true;
    return lane;
}

Rational rationalFromUint128(unsigned __int128 v, const Integer& den) {
    Integer hi(static_cast<unsigned long>(v >> 64));
    Integer num;
    mpz_mul_2exp(num.get_mpz_t(), hi.get_mpz_t(), 64);
    num += static_cast<unsigned long>(v & ~0ULL);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Maximum matching where row i's admissible columns form the contiguous cyclic
// range start[i] .. start[i]+count[i]-1 (mod m). Augmenting-path search; a
// path-compressed jump table skips columns already visited in the current
// attempt, so one attempt touches each column at most once.
class RangeMatcher {
  public:
    RangeMatcher(int leftN, int rightN, std::vector<std::pair<int, long>> ranges)
        : n_(leftN), m_(rightN), ranges_(std::move(ranges)) {}

    int solve() {
        matchL_.assign(n_, -1);
        matchR_.assign(m_, -1);
        next_.resize(2 * m_ + 1);
        int matched = 0;
        for (int u = 0; u < n_; ++u) {
            std::iota(next_.begin(), next_.end(), 0);
            if (tryAugment(u)) ++matched;
        }
        return matched;
    }

  private:
    int findNext(int pos) {  // smallest unvisited position >= pos
        while (next_[pos] != pos) {
            next_[pos] = next_[next_[pos]];
            pos = next_[pos];
        }
        return pos;
    }

    bool tryAugment(int u) {
        const auto [start, count] = ranges_[u];
        if (count <= 0) return false;
        const long end = start + count;  // exclusive, doubled index space
        for (long pos = findNext(start); pos < end; pos = findNext(static_cast<int>(pos))) {
            const int j = pos >= m_ ? static_cast<int>(pos - m_) : static_cast<int>(pos);
            // Mark both aliases of column j so no column is entered twice per
            // attempt; unvisited entries satisfy next_[x] == x.
            if (next_[j] == j) next_[j] = j + 1;
            if (next_[j + m_] == j + m_) next_[j + m_] = j + m_ + 1;
            const int w = matchR_[j];
            if (w == -1 || tryAugment(w)) {
                matchL_[u] = j;
                matchR_[j] = u;
                return true;
            }
        }
        return false;
    }

    int n_, m_;
    std::vector<std::pair<int, long>> ranges_;
    std::vector<int> matchL_, matchR_, next_;
};

// Augmenting-path maximum matching over explicit adjacency lists; used for
// matrix-level exceedance counts and as the reference for the range matcher.
int maxMatchingDense(int n, int m, const std::vector<std::vector<int>>& adj) {
    std::vector<int> matchL(n, -1), matchR(m, -1);
    std::vector<char> visited(m, 0);
    std::function<bool(int)> augment = [&](int u) {
        for (const int j : adj[u]) {
            if (visited[j]) continue;
            visited[j] = 1;
            const int w = matchR[j];
            if (w == -1 || augment(w)) {
                matchL[u] = j;
                matchR[j] = u;
                return true;
            }
        }
        return false;
    };
    int matched = 0;
    for (int u = 0; u < n; ++u) {
        std::fill(visited.begin(), visited.end(), 0);
        if (augment(u)) ++matched;
    }
    return matched;
}

}  // namespace

Matching solveMinAssignment(const CostMatrix& cost) {
    validateSquare(cost);
    return finishMatching(cost, hungarian(cost));
}

Matching solveMaxAssignment(const CostMatrix& cost) {
    validateSquare(cost);
    CostMatrix negated(cost.size());
    for (std::size_t i = 0; i < cost.size(); ++i) {
        negated[i].reserve(cost.size());
        for (const auto& c : cost[i]) negated[i].push_back(-c);
    }
    return finishMatching(cost, hungarian(negated));
}

Matching bruteForceAssignment(const CostMatrix& cost, bool maximize) {
    validateSquare(cost);
    const int n = static_cast<int>(cost.size());
    if (n > 9) throw std::invalid_argument("bruteForceAssignment: n > 9");
    std::vector<int> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<Rational> bestTotal;
    do {
        Rational total = 0;
        for (int i = 0; i < n; ++i) total += cost[i][perm[i]];
        if (!bestTotal || (maximize ? total > *bestTotal : total < *bestTotal)) {
            bestTotal = std::move(total);
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return finishMatching(cost, best);
}

int minExceedanceCount(const CostMatrix& cost, const Rational& threshold) {
    validateSquare(cost);
    const int n = static_cast<int>(cost.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (cost[i][j] <= threshold) adj[i].push_back(j);
        }
    }
    return n - maxMatchingDense(n, n, adj);
}

int bruteForceExceedanceCount(const CostMatrix& cost, const Rational& threshold) {
    validateSquare(cost);
    const int n = static_cast<int>(cost.size());
    if (n > 9) throw std::invalid_argument("bruteForceExceedanceCount: n > 9");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int best = n + 1;
    do {
        int exceed = 0;
        for (int i = 0; i < n; ++i) {
            if (cost[i][perm[i]] > threshold) ++exceed;
        }
        best = std::min(best, exceed);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

long minJointVisitCount(long a, long b, long n) {
    if (n < 0 || a < 0 || b < 0 || a > n || b > n)
        throw std::invalid_argument("jointVisitCount: need 0 <= a,b <= n");
    return std::max(0L, a + b - n);
}

long maxJointVisitCount(long a, long b, long n) {
    if (n < 0 || a < 0 || b < 0 || a > n || b > n)
        throw std::invalid_argument("jointVisitCount: need 0 <= a,b <= n");
    return std::min(a, b);
}

Matching solveSortedLine(const std::vector<Rational>& xs, const std::vector<Rational>& ys, FastPathVerify verify) {
    validatePair(xs, ys);
    const int n = static_cast<int>(xs.size());
    const auto xi = sortedOrder(xs);
    const auto yi = sortedOrder(ys);
    std::vector<int> assignment(n, -1);
    Rational total = 0;
    for (int k = 0; k < n; ++k) {
        assignment[xi[k]] = yi[k];
        const Rational& a = xs[xi[k]];
        const Rational& b = ys[yi[k]];
        total += a < b ? b - a : a - b;
    }
    total.canonicalize();
    Rational mean = total / n;
    mean.canonicalize();
    Matching result{std::move(assignment), std::move(total), std::move(mean)};
    if (verify == FastPathVerify::crossCheck) {
        CostMatrix cost(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost[i][j] = xs[i] < ys[j] ? ys[j] - xs[i] : xs[i] - ys[j];
        Matching general = solveMinAssignment(cost);
        if (general.totalCost != result.totalCost) return general;
    }
    return result;
}

Matching solveSortedLineMax(const std::vector<Rational>& xs, const std::vector<Rational>& ys, FastPathVerify verify) {
    validatePair(xs, ys);
    const int n = static_cast<int>(xs.size());
    const auto xi = sortedOrder(xs);
    const auto yi = sortedOrder(ys);
    std::vector<int> assignment(n, -1);
    Rational total = 0;
    for (int k = 0; k < n; ++k) {
        assignment[xi[k]] = yi[n - 1 - k];
        const Rational& a = xs[xi[k]];
        const Rational& b = ys[yi[n - 1 - k]];
        total += a < b ? b - a : a - b;
    }
    total.canonicalize();
    Rational mean = total / n;
    mean.canonicalize();
    Matching result{std::move(assignment), std::move(total), std::move(mean)};
    if (verify == FastPathVerify::crossCheck) {
        CostMatrix cost(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost[i][j] = xs[i] < ys[j] ? ys[j] - xs[i] : xs[i] - ys[j];
        Matching general = solveMaxAssignment(cost);
        if (general.totalCost != result.totalCost) return general;
    }
    return result;
}

Matching solveSortedCircle(const std::vector<Rational>& xs, const std::vector<Rational>& ys, FastPathVerify verify) {
    validatePair(xs, ys);
    validateUnitValues(xs);
    validateUnitValues(ys);
    const int n = static_cast<int>(xs.size());
    const auto xi = sortedOrder(xs);
    const auto yi = sortedOrder(ys);

    int bestOffset = 0;
    std::optional<Rational> bestTotal;

    std::vector<Rational> xsSorted(n), ysSorted(n);
    for (int k = 0; k < n; ++k) {
        xsSorted[k] = xs[xi[k]];
        ysSorted[k] = ys[yi[k]];
    }

    const IntegerLane lane = buildIntegerLane(xsSorted, ysSorted);
    if (lane.usable) {
        unsigned __int128 best = 0;
        bool first = true;
        for (int off = 0; off < n; ++off) {
            unsigned __int128 total = 0;
            for (int k = 0; k < n; ++k) {
                const auto& a = lane.xs[k];
                const auto& b = lane.ys[(k + off) % n];
                const unsigned __int128 diff = a < b ? b - a : a - b;
                const unsigned __int128 wrap = lane.d - diff;
                total += diff < wrap ? diff : wrap;
            }
            if (first || total < best) {
                best = total;
                bestOffset = off;
                first = false;
            }
        }
        bestTotal = rationalFromUint128(best, lane.den);
    } else {
        for (int off = 0; off < n; ++off) {
            Rational total = 0;
            for (int k = 0; k < n; ++k) total += circleDistance(xsSorted[k], ysSorted[(k + off) % n]);
            if (!bestTotal || total < *bestTotal) {
                bestTotal = std::move(total);
                bestOffset = off;
            }
        }
    }

    std::vector<int> assignment(n, -1);
    for (int k = 0; k < n; ++k) assignment[xi[k]] = yi[(k + bestOffset) % n];
    Rational total = *bestTotal;
    total.canonicalize();
    Rational mean = total / n;
    mean.canonicalize();
    Matching result{std::move(assignment), std::move(total), std::move(mean)};
    if (verify == FastPathVerify::crossCheck) {
        CostMatrix cost(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost[i][j] = circleDistance(xs[i], ys[j]);
        Matching general = solveMinAssignment(cost);
        if (general.totalCost != result.totalCost) return general;
    }
    return result;
}

Matching solveSortedCircleMax(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                              FastPathVerify verify) {
    validatePair(xs, ys);
    validateUnitValues(xs);
    validateUnitValues(ys);
    const int n = static_cast<int>(xs.size());
    std::vector<Rational> antipodes(n);
    for (int j = 0; j < n; ++j) antipodes[j] = fracPart(ys[j] + Rational(1, 2));
    Matching m = solveSortedCircle(xs, antipodes, FastPathVerify::none);
    std::vector<int> assignment = std::move(m.assignment);
    Rational half(n, 2);
    half.canonicalize();
    Rational total = half - m.totalCost;
    total.canonicalize();
    Rational mean = total / n;
    mean.canonicalize();
    Matching result{std::move(assignment), std::move(total), std::move(mean)};
    if (verify == FastPathVerify::crossCheck) {
        CostMatrix cost(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost[i][j] = circleDistance(xs[i], ys[j]);
        Matching general = solveMaxAssignment(cost);
        if (general.totalCost != result.totalCost) return general;
    }
    return result;
}

int lineExceedanceCount(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                        const Rational& threshold) {
    validatePair(xs, ys);
    if (threshold < 0) return static_cast<int>(xs.size());
    const int n = static_cast<int>(xs.size());
    std::vector<Rational> sorted = ys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<int, long>> ranges(n);
    for (int i = 0; i < n; ++i) {
        const Rational lo = xs[i] - threshold;
        const Rational hi = xs[i] + threshold;
        const auto lb = std::lower_bound(sorted.begin(), sorted.end(), lo);
        const auto ub = std::upper_bound(sorted.begin(), sorted.end(), hi);
        ranges[i] = {static_cast<int>(lb - sorted.begin()), static_cast<long>(ub - lb)};
    }
    return n - RangeMatcher(n, n, std::move(ranges)).solve();
}

int circleExceedanceCount(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                          const Rational& threshold) {
    validatePair(xs, ys);
    validateUnitValues(xs);
    validateUnitValues(ys);
    if (threshold < 0) return static_cast<int>(xs.size());
    const int n = static_cast<int>(xs.size());
    if (threshold >= Rational(1, 2)) return 0;  // geodesic diameter is 1/2
    std::vector<Rational> sorted = ys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<int, long>> ranges(n);
    for (int i = 0; i < n; ++i) {
        const Rational lo = fracPart(xs[i] - threshold);
        const Rational hi = fracPart(xs[i] + threshold);
        const auto lb = std::lower_bound(sorted.begin(), sorted.end(), lo);
        if (lo <= hi) {
            const auto ub = std::upper_bound(sorted.begin(), sorted.end(), hi);
            const long count = ub >= lb ? static_cast<long>(ub - lb) : 0;
            ranges[i] = {static_cast<int>(lb - sorted.begin()), count};
        } else {  // arc wraps through 0
            const auto ub = std::upper_bound(sorted.begin(), sorted.end(), hi);
            const int start = static_cast<int>(lb - sorted.begin());
            const long count = static_cast<long>(sorted.end() - lb) + static_cast<long>(ub - sorted.begin());
            ranges[i] = {start, count};
        }
    }
    return n - RangeMatcher(n, n, std::move(ranges)).solve();
}

}  // namespace orbitmetrics::matching
