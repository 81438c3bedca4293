#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "orbitmetrics/orbitstats.hpp"

using namespace orbitmetrics;
using namespace orbitmetrics::spaces;
using namespace orbitmetrics::systems;
using namespace orbitmetrics::orbitstats;

namespace {

StatePoint streamPoint(std::uint64_t seed) {
    return makeCircleStreamPoint(SymbolStream({}, RandomTail{seed}, 2));
}

OrbitSegment doublingSeg(std::uint64_t seed, std::size_t n) {
    return orbitSegment(makeDoubling(), streamPoint(seed), n);
}

Rational statValue(const SegmentStatKind& kind, const OrbitSegment& a, const OrbitSegment& b) {
    return segmentStat(kind, a, b).value;
}

}  // namespace

TEST_CASE("besicovitch statistic is the orbit distance for the rotation isometry") {
    auto sys = makeRotation(goldenConvergentAngle());
    for (std::size_t n : {1, 5, 16, 33}) {
        OrbitSegment sx = orbitSegment(sys, makeCirclePoint(Rational(0)), n);
        OrbitSegment sy = orbitSegment(sys, makeCirclePoint(makeRational(1, 4)), n);
        BoundedValue b = segmentStat(BesicovitchStat{}, sx, sy);
        CHECK(b.exact());
        CHECK(b.value == makeRational(1, 4));
    }
}

TEST_CASE("weak-mean statistic of a segment against itself is zero") {
    auto sys = makeDoubling();
    OrbitSegment s = orbitSegment(sys, streamPoint(3), 24);
    CHECK(statValue(WeakMeanStat{}, s, s) == 0);
    auto shift = makeFullShift();
    OrbitSegment t = orbitSegment(shift, makeSymbolPoint(SymbolStream({}, RandomTail{4}, 2)), 12);
    CHECK(statValue(WeakMeanStat{}, t, t) == 0);
}

TEST_CASE("golden rotation weak mean at n=16 matches the frozen exact value") {
    // Frozen from an independent exact-fractions evaluation (cyclic-offset
    // scan over sorted circle samples, python/fractions).
    const Rational frozen = rationalFromParts("61305790721611591", "2933567408976271816");
    auto sys = makeRotation(goldenConvergentAngle());
    OrbitSegment sx = orbitSegment(sys, makeCirclePoint(Rational(0)), 16);
    OrbitSegment sy = orbitSegment(sys, makeCirclePoint(makeRational(1, 4)), 16);
    BoundedValue fast = segmentStat(WeakMeanStat{}, sx, sy);
    CHECK(fast.exact());
    CHECK(fast.value == frozen);

    // Second route: the dense exact solver on the full cost matrix.
    matching::CostMatrix costs(16, std::vector<Rational>(16));
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            costs[i][j] = distance(sys.space, sx.states[i], sy.states[j]).value;
        }
    }
    CHECK(matching::solveMinAssignment(costs).meanCost == frozen);
}

TEST_CASE("statistic ordering: weakMean <= besicovitch <= supPerm") {
    std::vector<std::pair<OrbitSegment, OrbitSegment>> pairs;
    auto rot = makeRotation(makeRational(2, 7));
    pairs.emplace_back(orbitSegment(rot, makeCirclePoint(makeRational(1, 9)), 20),
                       orbitSegment(rot, makeCirclePoint(makeRational(5, 11)), 20));
    pairs.emplace_back(doublingSeg(10, 18), doublingSeg(11, 18));
    auto tent = makeTent();
    pairs.emplace_back(orbitSegment(tent, makeIntervalPoint(makeRational(2, 7)), 25),
                       orbitSegment(tent, makeIntervalPoint(makeRational(3, 13)), 25));
    auto shift = makeFullShift();
    pairs.emplace_back(orbitSegment(shift, makeSymbolPoint(SymbolStream({}, RandomTail{21}, 2)), 16),
                       orbitSegment(shift, makeSymbolPoint(SymbolStream({}, RandomTail{22}, 2)), 16));
    auto prod = makeProductSystem(makeRotation(makeRational(1, 5)), makeTent());
    pairs.emplace_back(
        orbitSegment(prod,
                     makeProductPoint(makeCirclePoint(makeRational(1, 8)),
                                      makeIntervalPoint(makeRational(1, 7))),
                     14),
        orbitSegment(prod,
                     makeProductPoint(makeCirclePoint(makeRational(6, 11)),
                                      makeIntervalPoint(makeRational(9, 10))),
                     14));
    for (const auto& [sx, sy] : pairs) {
        Rational weak = statValue(WeakMeanStat{}, sx, sy);
        Rational besi = statValue(BesicovitchStat{}, sx, sy);
        Rational sup = statValue(SupPermStat{}, sx, sy);
        CHECK(weak <= besi);
        CHECK(besi <= sup);
        CHECK(weak == statValue(WeakMeanStat{}, sy, sx));
    }
}

TEST_CASE("exceedance sandwich holds exactly at every n") {
    const Rational epsilons[] = {makeRational(1, 20), makeRational(1, 10), makeRational(1, 4)};
    auto sys = makeDoubling();
    for (std::size_t n : {8, 33, 100}) {
        OrbitSegment sx = orbitSegment(sys, makeCirclePoint(makeRational(17, 101)), n);
        OrbitSegment sy = doublingSeg(31, n);
        Rational weak = statValue(WeakMeanStat{}, sx, sy);
        Rational diam = diameter(sys.space);
        for (const auto& eps : epsilons) {
            Rational exc = statValue(ExceedanceStat{eps}, sx, sy);
            CHECK(eps * exc <= weak);
            CHECK(weak <= diam * exc + eps);
        }
    }
}

TEST_CASE("one-step shift moves the weak mean by at most diam/n") {
    auto sys = makeDoubling();
    for (std::size_t n : {16, 64}) {
        StatePoint x = streamPoint(77);
        OrbitSegment sx = orbitSegment(sys, x, n);
        OrbitSegment sxShift = orbitSegment(sys, step(sys, x), n);
        OrbitSegment sy = doublingSeg(78, n);
        Rational a = statValue(WeakMeanStat{}, sx, sy);
        Rational b = statValue(WeakMeanStat{}, sxShift, sy);
        Rational gap = a > b ? a - b : b - a;
        Rational bound = diameter(sys.space) / Rational(static_cast<unsigned long>(n));
        bound.canonicalize();
        CHECK(gap <= bound);
    }
}

TEST_CASE("exceedance statistics match brute force on small general-space segments") {
    auto shift = makeFullShift(2, 16);
    OrbitSegment sx = orbitSegment(shift, makeSymbolPoint(SymbolStream({}, RandomTail{5}, 2)), 6);
    OrbitSegment sy = orbitSegment(shift, makeSymbolPoint(SymbolStream({}, RandomTail{6}, 2)), 6);
    matching::CostMatrix costs(6, std::vector<Rational>(6));
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            costs[i][j] = distance(shift.space, sx.states[i], sy.states[j]).value;
        }
    }
    for (const auto& eps : {makeRational(1, 8), makeRational(1, 2), makeRational(3, 4)}) {
        Rational freq = statValue(ExceedanceStat{eps}, sx, sy);
        int brute = matching::bruteForceExceedanceCount(costs, eps);
        CHECK(freq == Rational(brute) / 6);
    }
}

TEST_CASE("besicovitch exceedance counts identity-paired distances") {
    auto rot = makeRotation(makeRational(1, 3));
    OrbitSegment sx = orbitSegment(rot, makeCirclePoint(Rational(0)), 9);
    OrbitSegment sy = orbitSegment(rot, makeCirclePoint(makeRational(1, 5)), 9);
    // Isometry: every identity pair sits at distance exactly 1/5.
    CHECK(statValue(BesicovitchExceedanceStat{makeRational(1, 10)}, sx, sy) == 1);
    CHECK(statValue(BesicovitchExceedanceStat{makeRational(1, 4)}, sx, sy) == 0);
    CHECK(statValue(BesicovitchExceedanceStat{makeRational(1, 5)}, sx, sy) == 0);  // strict >
}

TEST_CASE("observable statistics contract through the Lipschitz bound") {
    auto tent = makeTent();
    OrbitSegment sx = orbitSegment(tent, makeIntervalPoint(makeRational(2, 7)), 40);
    OrbitSegment sy = orbitSegment(tent, makeIntervalPoint(makeRational(5, 17)), 40);
    for (const auto& f : observableRegistry(tent.space)) {
        REQUIRE(f.lipschitzBound.has_value());
        Rational obs = statValue(ObservableStat{f}, sx, sy);
        Rational weak = statValue(WeakMeanStat{}, sx, sy);
        CHECK(obs <= *f.lipschitzBound * weak);
    }
    auto rot = makeRotation(goldenConvergentAngle());
    OrbitSegment rx = orbitSegment(rot, makeCirclePoint(Rational(0)), 32);
    OrbitSegment ry = orbitSegment(rot, makeCirclePoint(makeRational(1, 4)), 32);
    Observable coord = coordinateObservable(rot.space);
    CHECK(statValue(ObservableStat{coord}, rx, ry) <= statValue(WeakMeanStat{}, rx, ry));
}

TEST_CASE("observable exceedance matches brute force on the f-cost matrix") {
    auto tent = makeTent();
    OrbitSegment sx = orbitSegment(tent, makeIntervalPoint(makeRational(3, 11)), 7);
    OrbitSegment sy = orbitSegment(tent, makeIntervalPoint(makeRational(4, 9)), 7);
    Observable coord = coordinateObservable(tent.space);
    matching::CostMatrix costs(7, std::vector<Rational>(7));
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            Rational a = coord.eval(sx.states[i]).value;
            Rational b = coord.eval(sy.states[j]).value;
            costs[i][j] = a > b ? a - b : b - a;
        }
    }
    const Rational delta = makeRational(1, 6);
    Rational freq = statValue(ObservableExceedanceStat{coord, delta}, sx, sy);
    CHECK(freq == Rational(matching::bruteForceExceedanceCount(costs, delta)) / 7);
}

TEST_CASE("count/cost sandwich report") {
    auto tent = makeTent();
    OrbitSegment sx = orbitSegment(tent, makeIntervalPoint(makeRational(2, 7)), 64);
    OrbitSegment sy = orbitSegment(tent, makeIntervalPoint(makeRational(19, 23)), 64);
    Observable coord = coordinateObservable(tent.space);

    SandwichReport r = statSandwichCheck(sx, sy, coord, makeRational(1, 8));
    CHECK(r.lowerOk);
    CHECK(r.upperOk);
    CHECK(r.n == 64);

    // Threshold at the full range: no pair can exceed it.
    SandwichReport wide = statSandwichCheck(sx, sy, coord, Rational(1));
    CHECK(wide.exceedCount == 0);
    CHECK(wide.matchedSum <= Rational(64));

    // Constant observable: all three quantities vanish.
    Observable constant{"constant", [](const StatePoint&) { return BoundedValue(makeRational(1, 2)); },
                        Rational(0)};
    SandwichReport flat = statSandwichCheck(sx, sy, constant, makeRational(1, 8));
    CHECK(flat.exceedCount == 0);
    CHECK(flat.matchedSum == 0);

    CHECK_THROWS_AS((void)statSandwichCheck(sx, sy, coord, Rational(0)), std::invalid_argument);
}

TEST_CASE("limit estimation reads the tail window") {
    auto constant = [](std::size_t) { return BoundedValue(makeRational(1, 3)); };
    std::vector<std::size_t> schedule = {16, 32, 64, 128, 256, 512, 1024};
    LimitEstimate c = estimateLimit(constant, schedule, 3, makeRational(1, 100));
    CHECK(c.converged);
    CHECK(c.limsupEstimate.value == makeRational(1, 3));
    CHECK(c.liminfEstimate.value == makeRational(1, 3));

    auto decay = [](std::size_t n) {
        Rational r(1, static_cast<unsigned long>(n));
        r.canonicalize();
        return BoundedValue(std::move(r));
    };
    LimitEstimate d = estimateLimit(decay, schedule, 3, makeRational(1, 100));
    CHECK(d.converged);
    CHECK(d.limsupEstimate.value == makeRational(1, 256));  // third from last
    CHECK(d.liminfEstimate.value == makeRational(1, 1024));

    LimitEstimate shortRun = estimateLimit(constant, {16, 32}, 3, makeRational(1, 100));
    CHECK_FALSE(shortRun.converged);  // window never filled
    CHECK(shortRun.limsupEstimate.value == makeRational(1, 3));

    auto oscillate = [](std::size_t n) {
        return BoundedValue(n % 2 == 0 ? makeRational(1, 2) : makeRational(1, 4));
    };
    LimitEstimate osc = estimateLimit(oscillate, {2, 3, 4, 5, 6, 7}, 4, makeRational(1, 100));
    CHECK_FALSE(osc.converged);
    CHECK(osc.limsupEstimate.value == makeRational(1, 2));
    CHECK(osc.liminfEstimate.value == makeRational(1, 4));

    CHECK_THROWS_AS((void)estimateLimit(constant, {}, 3, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS((void)estimateLimit(constant, {16, 16}, 3, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS((void)estimateLimit(constant, schedule, 0, Rational(1)), std::invalid_argument);
}

TEST_CASE("error-inflated tails refuse to converge") {
    auto noisy = [](std::size_t) { return BoundedValue(makeRational(1, 3), makeRational(1, 10)); };
    LimitEstimate e = estimateLimit(noisy, {16, 32, 64}, 3, makeRational(1, 100));
    CHECK_FALSE(e.converged);  // spread includes the declared error radius
    LimitEstimate fine = estimateLimit(noisy, {16, 32, 64}, 3, Rational(1));
    CHECK(fine.converged);
}

TEST_CASE("pair relations: identical points are asymptotic at tolerance zero") {
    auto sys = makeRotation(makeRational(3, 8));
    StatePoint x = makeCirclePoint(makeRational(1, 6));
    RelationReport r = pairRelation(sys, x, x, {4, 8, 16, 32}, 3, Rational(0));
    CHECK(r.weakMeanAsymptotic);
    CHECK(r.weakMeanProximal);
    // The sup-over-pairings statistic does not vanish on a spread-out orbit,
    // even against itself: the worst pairing matches distant points.
    CHECK_FALSE(r.strongMeanProximal);

    // Orbits absorbed by a fixed point are strong mean proximal: every pairing
    // of two all-zero tails costs nothing.
    auto doubling = makeDoubling();
    StatePoint half = makeCirclePoint(makeRational(1, 2));
    RelationReport fixed = pairRelation(doubling, half, half, {4, 8, 16, 32}, 3, Rational(0));
    CHECK(fixed.weakMeanAsymptotic);
    CHECK(fixed.strongMeanProximal);
}

TEST_CASE("pair relations: golden rotation pairs are weak-mean asymptotic, not strong-mean proximal") {
    auto sys = makeRotation(goldenConvergentAngle());
    std::vector<std::size_t> schedule = {16, 32, 64, 128, 256, 512};
    RelationReport r = pairRelation(sys, makeCirclePoint(Rational(0)), makeCirclePoint(makeRational(1, 4)),
                                    schedule, 3, makeRational(1, 50));
    CHECK(r.weakMeanAsymptotic);
    CHECK(r.weakMeanProximal);
    CHECK_FALSE(r.strongMeanProximal);
    CHECK(r.supPermEstimate.liminfEstimate.value > makeRational(1, 5));
}

TEST_CASE("pair relations: doubling orbits that merge after a prefix are asymptotic") {
    std::uint64_t seed = 99;
    SymbolStream x({}, RandomTail{seed}, 2);
    std::vector<std::uint8_t> head;
    for (unsigned i = 0; i < 7; ++i) head.push_back(x.at(i));
    head[6] ^= 1;  // flip one early bit; tails coincide beyond index 6
    SymbolStream y(head, RandomTail{seed}, 2);
    auto sys = makeDoubling();
    RelationReport r = pairRelation(sys, makeCircleStreamPoint(x), makeCircleStreamPoint(y),
                                    {16, 64, 256, 1024}, 3, makeRational(1, 100));
    CHECK(r.weakMeanAsymptotic);
    CHECK(r.weakMeanProximal);
}

TEST_CASE("density estimates: parity, blocks, and the complement identity") {
    std::vector<std::size_t> schedule = {16, 64, 256, 1024, 4096};
    IntegerSetView evens{[](std::size_t i) { return i % 2 == 0; }, 4096};
    LimitEstimate e = densityEstimate(evens, schedule, 3, makeRational(1, 100));
    CHECK(e.converged);
    CHECK(upperDensity(e).value == makeRational(1, 2));
    CHECK(lowerDensity(e).value == makeRational(1, 2));

    // Blocks [4^k, 2*4^k): density oscillates between 2/3 and 1/3.
    auto inBlocks = [](std::size_t i) {
        if (i == 0) return false;
        std::size_t p = 1;
        while (p * 4 <= i) p *= 4;
        return i < 2 * p;
    };
    std::vector<std::size_t> blockSchedule;
    std::size_t p = 4;
    while (p <= (std::size_t{1} << 20)) {
        blockSchedule.push_back(p);
        blockSchedule.push_back(2 * p);
        p *= 4;
    }
    IntegerSetView blocks{inBlocks, (std::size_t{2} << 20)};
    LimitEstimate b = densityEstimate(blocks, blockSchedule, 4, makeRational(1, 100));
    CHECK(upperDensity(b).value >= makeRational(63, 100));
    CHECK(lowerDensity(b).value <= makeRational(37, 100));
    CHECK_FALSE(b.converged);

    IntegerSetView empty{[](std::size_t) { return false; }, 4096};
    LimitEstimate z = densityEstimate(empty, schedule, 3, makeRational(1, 100));
    CHECK(upperDensity(z).value == 0);
    CHECK(lowerDensity(z).value == 0);

    IntegerSetView odds{[](std::size_t i) { return i % 2 == 1; }, 4096};
    LimitEstimate o = densityEstimate(odds, schedule, 3, makeRational(1, 100));
    CHECK(upperDensity(e).value + lowerDensity(o).value == 1);

    LimitEstimate ex = densityEstimate(explicitSet({0, 2, 4, 6}, 16), {2, 4, 8, 16}, 2, Rational(1));
    CHECK(ex.samples[1].value == makeRational(1, 2));  // {0,2} in [0,4)
    CHECK(ex.samples[3].value == makeRational(1, 4));

    CHECK_THROWS_AS((void)densityEstimate(evens, {16, 8192}, 3, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS((void)explicitSet({20}, 16), std::invalid_argument);
}

TEST_CASE("segment statistics validate their inputs") {
    auto rot = makeRotation(makeRational(1, 3));
    auto tent = makeTent();
    OrbitSegment a = orbitSegment(rot, makeCirclePoint(Rational(0)), 5);
    OrbitSegment b = orbitSegment(rot, makeCirclePoint(makeRational(1, 7)), 6);
    OrbitSegment c = orbitSegment(tent, makeIntervalPoint(Rational(0)), 5);
    CHECK_THROWS_AS((void)segmentStat(WeakMeanStat{}, a, b), std::invalid_argument);
    CHECK_THROWS_AS((void)segmentStat(WeakMeanStat{}, a, c), std::invalid_argument);
    CHECK_THROWS_AS((void)segmentStat(ExceedanceStat{makeRational(-1, 2)}, a, a),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)segmentPrefix(a, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)segmentPrefix(a, 6), std::invalid_argument);
    CHECK_THROWS_AS((void)coordinateObservable(SpaceDescriptor{SymbolicSpace{}}), std::invalid_argument);
    CHECK_THROWS_AS((void)smoothedIndicatorObservable(tent.space, makeIntervalPoint(Rational(0)),
                                                      Rational(0)),
                    std::invalid_argument);
}

TEST_CASE("default schedules depend on the space lane") {
    auto circleSchedule = defaultSchedule(SpaceDescriptor{CircleSpace{}});
    CHECK(circleSchedule.front() == 16);
    CHECK(circleSchedule.back() == 4096);
    auto symbolicSchedule = defaultSchedule(SpaceDescriptor{SymbolicSpace{}});
    CHECK(symbolicSchedule.back() == 512);
    CHECK(defaultTolerance() == makeRational(1, 100));
}

TEST_CASE("doubling-map weak mean against the fixed point matches the direct-mean identity") {
    // Matching against n copies of one point makes every pairing equal, so the
    // optimal assignment must coincide with the plain orbit average.
    auto sys = makeDoubling();
    const std::size_t n = 256;
    OrbitSegment sx = orbitSegment(sys, streamPoint(2026), n);
    OrbitSegment sy = orbitSegment(sys, makeCirclePoint(Rational(0)), n);
    BoundedValue viaSolver = segmentStat(WeakMeanStat{}, sx, sy);

    BoundedValue direct;
    for (std::size_t k = 0; k < n; ++k) {
        direct = direct + distance(sys.space, sx.states[k], sy.states[k]);
    }
    direct.value /= static_cast<unsigned long>(n);
    direct.value.canonicalize();
    CHECK(viaSolver.value == direct.value);
    // Typical orbits sit near the theoretical mean distance 1/4 to the fixed point.
    CHECK(viaSolver.value > makeRational(1, 5));
    CHECK(viaSolver.value < makeRational(3, 10));
}
