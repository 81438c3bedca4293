// Acceptance gate: every release-blocking behavior gets exactly one pass/fail
// line with its tolerances pinned here, not in config files.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "orbitmetrics/serialize.hpp"
#include "orbitmetrics/verify.hpp"

namespace {

using namespace orbitmetrics;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 0x20260819ULL;

struct Criterion {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<Criterion> results;

void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    Criterion c;
    c.name = name;
    auto start = Clock::now();
    try {
        auto [ok, detail] = body();
        c.passed = ok;
        c.detail = detail;
    } catch (const std::exception& err) {
        c.passed = false;
        c.detail = std::string("exception: ") + err.what();
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    results.push_back(c);
    std::printf("[%2zu/12] %-52s %s  (%s, %.2fs)\n", results.size(), c.name.c_str(),
                c.passed ? "PASS" : "FAIL", c.detail.c_str(), c.seconds);
    std::fflush(stdout);
}

std::pair<bool, std::string> fromSuite(const verify::SuiteResult& suite, bool extraOk = true,
                                       const std::string& extraWhat = "") {
    std::string detail = std::to_string(suite.checksRun) + " checks";
    if (!suite.passed()) detail += ", first failure: " + suite.firstFailure;
    if (!extraOk) detail += ", " + extraWhat;
    return {suite.passed() && extraOk, detail};
}

BoundedValue statAt(const orbitstats::SegmentStatKind& kind,
                                const systems::OrbitSegment& ox, const systems::OrbitSegment& oy,
                                std::size_t n) {
    return orbitstats::segmentStat(kind, orbitstats::segmentPrefix(ox, n),
                                   orbitstats::segmentPrefix(oy, n));
}

}  // namespace

int main() {
    std::printf("acceptance gate (seed %llu)\n", static_cast<unsigned long long>(kSeed));

    // 1. Exact assignment solver agrees with brute-force enumeration (and the
    //    exceedance counter with its threshold oracle) on random matrices, n <= 7,
    //    well inside a 30-second budget.
    run("assignment solver matches brute force", [] {
        auto start = Clock::now();
        verify::SuiteResult suite = verify::checkSolverOracles(100, 7, deriveSeed(kSeed, 1));
        double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        return fromSuite(suite, elapsed < 30.0, "exceeded 30s budget");
    });

    // 2. Sorted line/circle fast paths reproduce the general solver exactly.
    run("sorted fast paths match the solver", [] {
        return fromSuite(
            verify::checkFastPathEquivalence(100, {8, 16, 32, 64}, deriveSeed(kSeed, 2)));
    });

    // 3. Symmetry is exact and the triangle inequality holds within twice the
    //    truncation bound, 50 sampled triples in each of the four space kinds.
    run("pseudometric laws on sampled triples", [] {
        return fromSuite(verify::checkPseudometricLaws(50, {8, 16}, deriveSeed(kSeed, 3)));
    });

    // 4. eps * minExceedance/n <= weak mean <= diam * minExceedance/n + eps,
    //    at least 500 evaluations.
    run("exceedance sandwich bounds", [] {
        return fromSuite(verify::checkExceedanceSandwich(512, deriveSeed(kSeed, 4)));
    });

    // 5. |F_n(Tx, y) - F_n(x, y)| <= diam/n exactly, 100 pairs, n in {16, 64, 256}.
    run("one-step shift stability", [] {
        return fromSuite(verify::checkShiftStability(100, {16, 64, 256}, deriveSeed(kSeed, 5)));
    });

    // 6. Irrational-convergent rotation, x = 0, y = 1/4: the paired mean stays
    //    exactly 1/4 at every n while the matched mean falls to <= 1/50 by
    //    n = 4096 with a non-increasing tail, all under two minutes.
    run("rotation pair: matched mean vanishes, paired persists", [] {
        auto start = Clock::now();
        systems::SystemDescriptor rot = systems::makeRotation(systems::goldenConvergentAngle());
        spaces::StatePoint x = spaces::makeCirclePoint(makeRational(0, 1));
        spaces::StatePoint y = spaces::makeCirclePoint(makeRational(1, 4));
        std::vector<std::size_t> schedule = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
        systems::OrbitSegment ox = systems::orbitSegment(rot, x, schedule.back());
        systems::OrbitSegment oy = systems::orbitSegment(rot, y, schedule.back());

        const Rational quarter = makeRational(1, 4);
        std::vector<BoundedValue> matched;
        for (std::size_t n : schedule) {
            BoundedValue paired =
                statAt(orbitstats::BesicovitchStat{}, ox, oy, n);
            if (paired.value != quarter || !paired.exact())
                return std::pair{false, "paired mean not exactly 1/4 at n=" + std::to_string(n)};
            matched.push_back(statAt(orbitstats::WeakMeanStat{}, ox, oy, n));
        }
        for (std::size_t i = schedule.size() - 4; i + 1 < schedule.size(); ++i)
            if (matched[i + 1].value > matched[i].value)
                return std::pair{false, std::string("matched mean increased across the tail")};
        if (!matched.back().certifiesAtMost(makeRational(1, 50)))
            return std::pair{false, "matched mean at n=4096 is " +
                                        approxDecimal(matched.back().value) + " > 1/50"};
        double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        if (elapsed >= 120.0) return std::pair{false, std::string("exceeded 120s budget")};
        return std::pair{true, "final matched mean " + approxDecimal(matched.back().value)};
    });

    // 7. Doubling map: the matched mean between a stream point and a dyadic point
    //    sits in [1/5, 3/10] at n = 4096, and the dichotomy probe lands on the
    //    sensitive side with a certified constant >= 3/20.
    run("doubling pair level and sensitive dichotomy", [] {
        systems::SystemDescriptor dbl = systems::makeDoubling();
        spaces::StatePoint x =
            spaces::samplePoint(dbl.space, spaces::Stream{}, deriveSeed(kSeed, 0x71));
        spaces::StatePoint y =
            spaces::samplePoint(dbl.space, spaces::Dyadic{20}, deriveSeed(kSeed, 0x72));
        systems::OrbitSegment ox = systems::orbitSegment(dbl, x, 4096);
        systems::OrbitSegment oy = systems::orbitSegment(dbl, y, 4096);
        BoundedValue level =
            statAt(orbitstats::WeakMeanStat{}, ox, oy, 4096);
        bool levelOk = level.value - level.error >= makeRational(1, 5) &&
                       level.value + level.error <= makeRational(3, 10);
        if (!levelOk)
            return std::pair{false, "matched mean " + approxDecimal(level.value) +
                                        " outside [0.2, 0.3]"};

        classify::ProbeConfig cfg = classify::defaultProbeConfig(dbl);
        cfg.schedule = {16, 32, 64, 128, 256, 512, 1024, 2048};
        cfg.tolerance = makeRational(1, 50);
        classify::DichotomyReport report =
            classify::dichotomyReport(dbl, cfg, classify::SensitivityMode::strongMean);
        if (report.side != classify::DichotomySide::sensitiveSide)
            return std::pair{false, std::string("dichotomy did not land sensitive")};
        if (!report.achievedConstant || *report.achievedConstant < makeRational(3, 20))
            return std::pair{false, std::string("certified constant below 3/20")};
        return std::pair{true, "level " + approxDecimal(level.value) + ", constant " +
                                   approxDecimal(*report.achievedConstant)};
    });

    // 8. The block set union of [4^k, 2*4^k) up to 4^10 oscillates: upper density
    //    >= 63/100, lower density <= 37/100.
    run("block set density oscillation", [] {
        orbitstats::IntegerSetView view;
        std::size_t horizon = 2;
        for (int k = 0; k < 10; ++k) horizon *= 4;
        view.horizon = 2 * horizon;
        view.member = [](std::size_t v) {
            if (v == 0) return false;
            std::size_t power = 1;
            while (power * 4 <= v) power *= 4;
            return v < 2 * power;
        };
        std::vector<std::size_t> schedule;
        std::size_t power = 1;
        for (int k = 1; k <= 10; ++k) {
            power *= 4;
            schedule.push_back(power);
            schedule.push_back(2 * power);
        }
        orbitstats::LimitEstimate estimate = orbitstats::densityEstimate(
            view, schedule, orbitstats::kDefaultTailWindow, orbitstats::defaultTolerance());
        BoundedValue upper = orbitstats::upperDensity(estimate);
        BoundedValue lower = orbitstats::lowerDensity(estimate);
        bool ok = upper.value >= makeRational(63, 100) && lower.value <= makeRational(37, 100);
        return std::pair{ok, "upper " + approxDecimal(upper.value) + ", lower " +
                                 approxDecimal(lower.value)};
    });

    // 9. delta * Delta <= matched f-sum <= Delta + delta * (n - Delta) and every
    //    registry observable with a declared bound contracts through the matched
    //    mean, 200 evaluations.
    run("observable sandwich and contraction", [] {
        return fromSuite(verify::checkObservableSandwich(200, deriveSeed(kSeed, 9)));
    });

    // 10. Joint-visit closed forms agree with exhaustive permutation search, n <= 8.
    run("joint-visit closed forms", [] {
        return fromSuite(verify::checkJointVisitClosedForm(8));
    });

    // 11. Mean-based and in-mean-based verdicts agree on both reference systems
    //     at the default probe configuration.
    run("mean vs in-mean verdict agreement", [] {
        systems::SystemDescriptor rot = systems::makeRotation(systems::goldenConvergentAngle());
        systems::SystemDescriptor dbl = systems::makeDoubling();
        for (const auto& system : {rot, dbl}) {
            classify::AgreementReport report = classify::checkMeanVsInMeanAgreement(
                system, classify::defaultProbeConfig(system));
            if (!report.agree || report.resolutionInsufficient)
                return std::pair{false, std::string("verdict modes disagree or underspecified")};
        }
        return std::pair{true, std::string("rotation and doubling agree")};
    });

    // 12. Re-running the pinned dichotomy configuration with the same seed yields
    //     byte-identical payload JSON and CSV tables.
    run("byte-identical reruns", [] {
        auto runOnce = [] {
            systems::SystemDescriptor dbl = systems::makeDoubling();
            classify::ProbeConfig cfg = classify::defaultProbeConfig(dbl);
            cfg.schedule = {16, 32, 64, 128, 256, 512};
            cfg.tolerance = makeRational(1, 20);
            cfg.samplesPerBall = 4;
            classify::DichotomyReport report =
                classify::dichotomyReport(dbl, cfg, classify::SensitivityMode::strongMean);
            serialize::Json payload = serialize::dichotomyToJson(report);
            std::vector<serialize::CsvRow> rows;
            for (std::size_t i = 0; i < report.sensitivity.witnesses.size(); ++i)
                rows.push_back({"ball" + std::to_string(i), "strongMean",
                                report.sensitivity.witnesses[i].n,
                                report.sensitivity.witnesses[i].statistic.value});
            return std::pair{payload.dump(), serialize::csvTable(rows)};
        };
        auto first = runOnce();
        auto second = runOnce();
        if (first.first != second.first)
            return std::pair{false, std::string("payload JSON differs between reruns")};
        if (first.second != second.second)
            return std::pair{false, std::string("CSV table differs between reruns")};
        return std::pair{true, std::to_string(first.first.size()) + " payload bytes stable"};
    });

    std::size_t passed = 0;
    for (const auto& c : results) passed += c.passed ? 1 : 0;
    std::printf("acceptance: %zu/12 passed\n", passed);
    return passed == results.size() ? 0 : 1;
}
