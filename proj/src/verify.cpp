#include "orbitmetrics/verify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <variant>

#include "orbitmetrics/matching.hpp"

namespace orbitmetrics::verify {

namespace {

using matching::CostMatrix;
using orbitstats::segmentStat;
using spaces::SampleStrategy;
using spaces::SpaceDescriptor;
using spaces::StatePoint;
using systems::OrbitSegment;
using systems::SystemDescriptor;

struct Collector {
    SuiteResult result;

    explicit Collector(std::string name) { result.name = std::move(name); }

    void check(bool ok, const std::string& what) {
        ++result.checksRun;
        if (ok) return;
        ++result.failures;
        if (result.firstFailure.empty()) result.firstFailure = what;
    }
};

CostMatrix randomCostMatrix(std::size_t n, std::uint64_t seed) {
    CostMatrix cost(n, std::vector<Rational>(n));
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::uint64_t draw = drawAt(seed, index++);
            cost[i][j] = makeRational(static_cast<long>(draw % 97),
                                      static_cast<long>(1 + (draw >> 32) % 23));
        }
    return cost;
}

std::vector<Rational> randomUnitValues(std::size_t n, std::uint64_t seed) {
    static constexpr long kDens[3] = {65521, 577, 1 << 20};
    std::vector<Rational> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        long den = kDens[drawAt(seed, 2 * i) % 3];
        out[i] = makeRational(static_cast<long>(drawAt(seed, 2 * i + 1) % den), den);
    }
    return out;
}

/// The four reference systems, one per space kind. The rotation appears inside
/// the product factor, where sampled points stay exactly iterable.
std::vector<SystemDescriptor> referenceSystems() {
    return {systems::makeDoubling(), systems::makeTent(), systems::makeFullShift(2, 64),
            systems::makeProductSystem(systems::makeRotation(systems::goldenConvergentAngle()),
                                       systems::makeDoubling())};
}

SampleStrategy samplerFor(const SpaceDescriptor& space, std::size_t i) {
    if (std::get_if<spaces::CircleSpace>(&space))
        return i % 2 ? SampleStrategy(spaces::Stream{}) : SampleStrategy(spaces::Uniform{});
    if (std::get_if<spaces::IntervalSpace>(&space)) return spaces::Uniform{};
    if (std::get_if<spaces::SymbolicSpace>(&space))
        return i % 2 ? SampleStrategy(spaces::PeriodicTailStrategy{3}) : SampleStrategy(spaces::Stream{});
    return spaces::Dyadic{20};  // product: keeps orbit denominators lane-friendly
}

Rational weakMeanValue(const OrbitSegment& a, const OrbitSegment& b) {
    return segmentStat(orbitstats::WeakMeanStat{}, a, b).value;
}

}  // namespace

std::string verifyLevelName(VerifyLevel level) {
    return level == VerifyLevel::quick ? "quick" : "full";
}

bool VerifyReport::allPassed() const {
    return std::all_of(suites.begin(), suites.end(),
                       [](const SuiteResult& s) { return s.passed(); });
}

std::size_t VerifyReport::totalChecks() const {
    return std::accumulate(suites.begin(), suites.end(), std::size_t{0},
                           [](std::size_t acc, const SuiteResult& s) { return acc + s.checksRun; });
}

SuiteResult checkSolverOracles(std::size_t instancesPerSize, std::size_t maxN, std::uint64_t seed) {
    Collector c("solver-oracles");
    for (std::size_t n = 2; n <= maxN; ++n) {
        for (std::size_t i = 0; i < instancesPerSize; ++i) {
            std::uint64_t instanceSeed = deriveSeed(seed, n * 1000 + i);
            CostMatrix cost = randomCostMatrix(n, instanceSeed);
            c.check(matching::solveMinAssignment(cost).totalCost ==
                        matching::bruteForceAssignment(cost, false).totalCost,
                    "min assignment equals enumeration at n=" + std::to_string(n));
            c.check(matching::solveMaxAssignment(cost).totalCost ==
                        matching::bruteForceAssignment(cost, true).totalCost,
                    "max assignment equals enumeration at n=" + std::to_string(n));
            for (std::size_t t = 0; t < 5; ++t) {
                std::uint64_t pick = drawAt(instanceSeed, 0x70DD + t);
                const Rational& threshold = cost[pick % n][(pick >> 16) % n];
                c.check(matching::minExceedanceCount(cost, threshold) ==
                            matching::bruteForceExceedanceCount(cost, threshold),
                        "exceedance count equals enumeration at n=" + std::to_string(n));
            }
        }
    }
    return c.result;
}

SuiteResult checkFastPathEquivalence(std::size_t instancesPerSize,
                                     const std::vector<std::size_t>& sizes, std::uint64_t seed) {
    Collector c("fast-path-equivalence");
    for (std::size_t n : sizes) {
        for (std::size_t i = 0; i < instancesPerSize; ++i) {
            std::uint64_t instanceSeed = deriveSeed(seed, n * 1000 + i);
            std::vector<Rational> xs = randomUnitValues(n, deriveSeed(instanceSeed, 1));
            std::vector<Rational> ys = randomUnitValues(n, deriveSeed(instanceSeed, 2));

            CostMatrix line(n, std::vector<Rational>(n));
            CostMatrix circle(n, std::vector<Rational>(n));
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    line[a][b] = xs[a] < ys[b] ? ys[b] - xs[a] : xs[a] - ys[b];
                    circle[a][b] = circleDistance(xs[a], ys[b]);
                }
            c.check(matching::solveSortedLine(xs, ys).totalCost ==
                        matching::solveMinAssignment(line).totalCost,
                    "sorted line matches dense solver at n=" + std::to_string(n));
            c.check(matching::solveSortedCircle(xs, ys).totalCost ==
                        matching::solveMinAssignment(circle).totalCost,
                    "sorted circle matches dense solver at n=" + std::to_string(n));
            if (n <= 16) {
                c.check(matching::solveSortedLineMax(xs, ys).totalCost ==
                            matching::solveMaxAssignment(line).totalCost,
                        "sorted line max matches dense solver at n=" + std::to_string(n));
                c.check(matching::solveSortedCircleMax(xs, ys).totalCost ==
                            matching::solveMaxAssignment(circle).totalCost,
                        "sorted circle max matches dense solver at n=" + std::to_string(n));
            }
        }
    }
    return c.result;
}

SuiteResult checkPseudometricLaws(std::size_t triplesPerSpace,
                                  const std::vector<std::size_t>& lengths, std::uint64_t seed) {
    Collector c("pseudometric-laws");
    std::size_t maxN = *std::max_element(lengths.begin(), lengths.end());
    for (const SystemDescriptor& sys : referenceSystems()) {
        Rational slack = 2 * spaces::truncationBound(sys.space);
        for (std::size_t i = 0; i < triplesPerSpace; ++i) {
            std::uint64_t tripleSeed = deriveSeed(seed, i);
            StatePoint x = spaces::samplePoint(sys.space, samplerFor(sys.space, i),
                                               deriveSeed(tripleSeed, 1));
            StatePoint y = spaces::samplePoint(sys.space, samplerFor(sys.space, i),
                                               deriveSeed(tripleSeed, 2));
            StatePoint z = spaces::samplePoint(sys.space, samplerFor(sys.space, i + 1),
                                               deriveSeed(tripleSeed, 3));
            OrbitSegment ox = systems::orbitSegment(sys, x, maxN);
            OrbitSegment oy = systems::orbitSegment(sys, y, maxN);
            OrbitSegment oz = systems::orbitSegment(sys, z, maxN);
            for (std::size_t n : lengths) {
                OrbitSegment sx = orbitstats::segmentPrefix(ox, n);
                OrbitSegment sy = orbitstats::segmentPrefix(oy, n);
                OrbitSegment sz = orbitstats::segmentPrefix(oz, n);
                Rational xy = weakMeanValue(sx, sy);
                c.check(xy == weakMeanValue(sy, sx), "weak-mean symmetry");
                c.check(weakMeanValue(sx, sz) <= xy + weakMeanValue(sy, sz) + slack,
                        "weak-mean triangle inequality");
            }
        }
    }
    return c.result;
}

SuiteResult checkExceedanceSandwich(std::size_t evaluations, std::uint64_t seed) {
    Collector c("exceedance-sandwich");
    const auto systems = referenceSystems();
    const Rational epsGrid[3] = {makeRational(1, 4), makeRational(1, 10), makeRational(1, 20)};
    const std::size_t lengths[3] = {8, 16, 32};
    for (std::size_t i = 0; i < evaluations; ++i) {
        const SystemDescriptor& sys = systems[i % systems.size()];
        std::uint64_t evalSeed = deriveSeed(seed, i);
        std::size_t n = lengths[(i / systems.size()) % 3];
        const Rational& eps = epsGrid[(i / (systems.size() * 3)) % 3];
        StatePoint x = spaces::samplePoint(sys.space, samplerFor(sys.space, i), deriveSeed(evalSeed, 1));
        StatePoint y = spaces::samplePoint(sys.space, samplerFor(sys.space, i), deriveSeed(evalSeed, 2));
        OrbitSegment sx = systems::orbitSegment(sys, x, n);
        OrbitSegment sy = systems::orbitSegment(sys, y, n);
        Rational wm = weakMeanValue(sx, sy);
        Rational exceed = segmentStat(orbitstats::ExceedanceStat{eps}, sx, sy).value;
        c.check(eps * exceed <= wm, "lower exceedance sandwich");
        c.check(wm <= spaces::diameter(sys.space) * exceed + eps, "upper exceedance sandwich");
    }
    return c.result;
}

SuiteResult checkShiftStability(std::size_t pairs, const std::vector<std::size_t>& lengths,
                                std::uint64_t seed) {
    Collector c("shift-stability");
    // Stepping sampled points must stay exact, so the rotation joins with
    // dyadic coordinates instead of streams.
    std::vector<SystemDescriptor> systems = {systems::makeDoubling(), systems::makeTent(),
                                             systems::makeFullShift(2, 64),
                                             systems::makeRotation(systems::goldenConvergentAngle())};
    std::size_t maxN = *std::max_element(lengths.begin(), lengths.end());
    for (std::size_t i = 0; i < pairs; ++i) {
        const SystemDescriptor& sys = systems[i % systems.size()];
        bool rotation = std::holds_alternative<systems::Rotation>(sys.kind);
        SampleStrategy strategy =
            rotation ? SampleStrategy(spaces::Dyadic{24}) : samplerFor(sys.space, i);
        std::uint64_t pairSeed = deriveSeed(seed, i);
        StatePoint x = spaces::samplePoint(sys.space, strategy, deriveSeed(pairSeed, 1));
        StatePoint y = spaces::samplePoint(sys.space, strategy, deriveSeed(pairSeed, 2));
        OrbitSegment ox = systems::orbitSegment(sys, x, maxN);
        OrbitSegment oTx = systems::orbitSegment(sys, systems::step(sys, x), maxN);
        OrbitSegment oy = systems::orbitSegment(sys, y, maxN);
        Rational diam = spaces::diameter(sys.space);
        for (std::size_t n : lengths) {
            Rational base = weakMeanValue(orbitstats::segmentPrefix(ox, n),
                                          orbitstats::segmentPrefix(oy, n));
            Rational stepped = weakMeanValue(orbitstats::segmentPrefix(oTx, n),
                                             orbitstats::segmentPrefix(oy, n));
            Rational gap = base < stepped ? stepped - base : base - stepped;
            c.check(gap * static_cast<long>(n) <= diam,
                    "shift stability at n=" + std::to_string(n));
        }
    }
    return c.result;
}

SuiteResult checkJointVisitClosedForm(std::size_t maxN) {
    Collector c("joint-visit-closed-form");
    for (std::size_t n = 1; n <= maxN; ++n) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        // count[a][b] = #{i < a : sigma(i) < b} for A = {0..a-1}, B = {0..b-1};
        // by relabeling, the extremes depend only on the sizes.
        std::vector<std::vector<int>> minCount(n + 1, std::vector<int>(n + 1, static_cast<int>(n) + 1));
        std::vector<std::vector<int>> maxCount(n + 1, std::vector<int>(n + 1, -1));
        std::vector<std::vector<int>> count(n + 1, std::vector<int>(n + 1, 0));
        do {
            for (std::size_t a = 1; a <= n; ++a)
                for (std::size_t b = 0; b <= n; ++b)
                    count[a][b] = count[a - 1][b] + (perm[a - 1] < static_cast<int>(b) ? 1 : 0);
            for (std::size_t a = 0; a <= n; ++a)
                for (std::size_t b = 0; b <= n; ++b) {
                    minCount[a][b] = std::min(minCount[a][b], count[a][b]);
                    maxCount[a][b] = std::max(maxCount[a][b], count[a][b]);
                }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (std::size_t a = 0; a <= n; ++a) {
            for (std::size_t b = 0; b <= n; ++b) {
                c.check(minCount[a][b] == matching::minJointVisitCount(static_cast<long>(a),
                                                                       static_cast<long>(b),
                                                                       static_cast<long>(n)),
                        "min joint-visit closed form at n=" + std::to_string(n));
                c.check(maxCount[a][b] == matching::maxJointVisitCount(static_cast<long>(a),
                                                                       static_cast<long>(b),
                                                                       static_cast<long>(n)),
                        "max joint-visit closed form at n=" + std::to_string(n));
            }
        }
    }
    return c.result;
}

SuiteResult checkObservableSandwich(std::size_t evaluations, std::uint64_t seed) {
    Collector c("observable-sandwich");
    const auto systems = referenceSystems();
    const Rational deltas[2] = {makeRational(1, 4), makeRational(1, 10)};
    const std::size_t lengths[3] = {8, 16, 24};
    for (std::size_t i = 0; i < evaluations; ++i) {
        const SystemDescriptor& sys = systems[i % systems.size()];
        std::uint64_t evalSeed = deriveSeed(seed, i);
        auto registry = orbitstats::observableRegistry(sys.space);
        const orbitstats::Observable& f = registry[(i / systems.size()) % registry.size()];
        const Rational& delta = deltas[i % 2];
        std::size_t n = lengths[(i / 2) % 3];
        StatePoint x = spaces::samplePoint(sys.space, samplerFor(sys.space, i), deriveSeed(evalSeed, 1));
        StatePoint y = spaces::samplePoint(sys.space, samplerFor(sys.space, i), deriveSeed(evalSeed, 2));
        OrbitSegment sx = systems::orbitSegment(sys, x, n);
        OrbitSegment sy = systems::orbitSegment(sys, y, n);
        try {
            orbitstats::SandwichReport report = orbitstats::statSandwichCheck(sx, sy, f, delta);
            c.check(report.lowerOk, "observable count/cost sandwich lower bound");
            c.check(report.upperOk, "observable count/cost sandwich upper bound");
        } catch (const std::logic_error& err) {
            c.check(false, std::string("observable sandwich threw: ") + err.what());
        }
        if (f.lipschitzBound) {
            Rational obs = segmentStat(orbitstats::ObservableStat{f}, sx, sy).value;
            c.check(obs <= *f.lipschitzBound * weakMeanValue(sx, sy),
                    "observable Lipschitz contraction for " + f.name);
        }
    }
    return c.result;
}

VerifyReport runVerify(VerifyLevel level, std::uint64_t seed) {
    VerifyReport report;
    report.level = level;
    const bool full = level == VerifyLevel::full;
    report.suites = {
        checkSolverOracles(full ? 100 : 20, full ? 7 : 5, deriveSeed(seed, 0xA1)),
        checkFastPathEquivalence(full ? 100 : 20,
                                 full ? std::vector<std::size_t>{8, 16, 32, 64}
                                      : std::vector<std::size_t>{8, 16},
                                 deriveSeed(seed, 0xA2)),
        checkPseudometricLaws(full ? 50 : 8,
                              full ? std::vector<std::size_t>{8, 16} : std::vector<std::size_t>{8, 12},
                              deriveSeed(seed, 0xA3)),
        checkExceedanceSandwich(full ? 512 : 120, deriveSeed(seed, 0xA4)),
        checkShiftStability(full ? 100 : 20,
                            full ? std::vector<std::size_t>{16, 64, 256}
                                 : std::vector<std::size_t>{16, 64},
                            deriveSeed(seed, 0xA5)),
        checkJointVisitClosedForm(full ? 8 : 6),
        checkObservableSandwich(full ? 200 : 60, deriveSeed(seed, 0xA6)),
    };
    return report;
}

}  // namespace orbitmetrics::verify
