#include "orbitmetrics/orbitstats.hpp"

#include <algorithm>
#include <stdexcept>

namespace orbitmetrics::orbitstats {

using namespace spaces;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

BoundedValue clampToUnit(BoundedValue v) {
    if (v.value > 1) v.value = 1;
    return v;
}

/// Rational representatives of circle/interval states plus the worst per-point
/// truncation error (nonzero only for stream-backed circle points).
struct UnitReps {
    std::vector<Rational> values;
    Rational maxPointError;
};

UnitReps unitReps(const SpaceDescriptor& space, const std::vector<StatePoint>& states) {
    UnitReps reps;
    reps.values.reserve(states.size());
    reps.maxPointError = 0;
    for (const auto& s : states) {
        BoundedValue v = unitValue(space, s);
        reps.values.push_back(std::move(v.value));
        if (v.error > reps.maxPointError) reps.maxPointError = v.error;
    }
    return reps;
}

struct MatrixCosts {
    matching::CostMatrix costs;
    Rational maxEntryError;
};

MatrixCosts pairwiseCosts(const SpaceDescriptor& space, const std::vector<StatePoint>& xs,
                          const std::vector<StatePoint>& ys) {
    const std::size_t n = xs.size();
    MatrixCosts m;
    m.maxEntryError = 0;
    m.costs.assign(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            BoundedValue d = distance(space, xs[i], ys[j]);
            m.costs[i][j] = std::move(d.value);
            if (d.error > m.maxEntryError) m.maxEntryError = d.error;
        }
    }
    return m;
}

UnitReps observableReps(const Observable& f, const std::vector<StatePoint>& states) {
    UnitReps reps;
    reps.values.reserve(states.size());
    reps.maxPointError = 0;
    for (const auto& s : states) {
        BoundedValue v = f.eval(s);
        if (v.value < 0 || v.value > 1) {
            throw std::logic_error("observable '" + f.name + "' left [0,1]");
        }
        reps.values.push_back(std::move(v.value));
        if (v.error > reps.maxPointError) reps.maxPointError = v.error;
    }
    return reps;
}

enum class SpaceLane { circle, interval, general };

SpaceLane laneOf(const SpaceDescriptor& space) {
    if (std::holds_alternative<CircleSpace>(space)) return SpaceLane::circle;
    if (std::holds_alternative<IntervalSpace>(space)) return SpaceLane::interval;
    return SpaceLane::general;
}

/// Exceedance frequency with a two-sided count bracket when the entry costs
/// carry truncation error: entries within E of the truth can only cross the
/// threshold inside (eps - E, eps + E].
BoundedValue bracketedExceedance(const std::function<int(const Rational&)>& countAt,
                                 const Rational& eps, const Rational& entryError, std::size_t n) {
    const Rational den(static_cast<unsigned long>(n));
    Rational v(countAt(eps));
    if (entryError == 0) {
        Rational freq = v / den;
        freq.canonicalize();
        return BoundedValue(std::move(freq));
    }
    Rational hi(countAt(eps - entryError));
    Rational lo(countAt(eps + entryError));
    Rational err = hi - v > v - lo ? hi - v : v - lo;
    Rational freq = v / den;
    freq.canonicalize();
    err /= den;
    err.canonicalize();
    return {std::move(freq), std::move(err)};
}

void validatePair(const OrbitSegment& segX, const OrbitSegment& segY) {
    if (segX.length() == 0 || segX.length() != segY.length()) {
        fail("segmentStat: segments must have equal positive length");
    }
    if (!sameSpace(segX.system.space, segY.system.space)) {
        fail("segmentStat: segments live in different spaces");
    }
}

}  // namespace

// --- observables -------------------------------------------------------------

Observable coordinateObservable(const SpaceDescriptor& space) {
    if (std::holds_alternative<IntervalSpace>(space)) {
        return {"coordinate",
                [](const StatePoint& p) { return BoundedValue(std::get<IntervalPoint>(p).coord); },
                Rational(1)};
    }
    if (std::holds_alternative<CircleSpace>(space)) {
        StatePoint zero = originPoint(space);
        return {"coordinate",
                [space, zero](const StatePoint& p) { return distance(space, p, zero); }, Rational(1)};
    }
    fail("coordinate observable needs a circle or interval space");
}

Observable distanceObservable(const SpaceDescriptor& space, StatePoint anchor, const std::string& name) {
    if (!contains(space, anchor)) fail("distance observable: anchor outside the space");
    return {name,
            [space, anchor = std::move(anchor)](const StatePoint& p) {
                return clampToUnit(distance(space, p, anchor));
            },
            Rational(1)};
}

Observable smoothedIndicatorObservable(const SpaceDescriptor& space, StatePoint anchor, Rational q,
                                       const std::string& name) {
    if (q <= 0) fail("smoothed indicator: scale must be positive");
    if (!contains(space, anchor)) fail("smoothed indicator: anchor outside the space");
    return {name,
            [space, anchor = std::move(anchor), q](const StatePoint& p) {
                BoundedValue d = distance(space, p, anchor);
                d.value *= q;
                d.error *= q;
                return clampToUnit(std::move(d));
            },
            q};
}

std::vector<Observable> observableRegistry(const SpaceDescriptor& space) {
    std::vector<Observable> registry;
    if (std::holds_alternative<CircleSpace>(space) || std::holds_alternative<IntervalSpace>(space)) {
        registry.push_back(coordinateObservable(space));
    }
    StatePoint anchor = originPoint(space);
    registry.push_back(distanceObservable(space, anchor));
    registry.push_back(smoothedIndicatorObservable(space, anchor, Rational(8), "indicator8"));
    return registry;
}

// --- per-n statistics ----------------------------------------------------------

std::string statKindName(const SegmentStatKind& kind) {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, WeakMeanStat>) return "weakMean";
            if constexpr (std::is_same_v<T, BesicovitchStat>) return "besicovitch";
            if constexpr (std::is_same_v<T, SupPermStat>) return "supPerm";
            if constexpr (std::is_same_v<T, ExceedanceStat>) return "exceedance";
            if constexpr (std::is_same_v<T, BesicovitchExceedanceStat>) return "besicovitchExceedance";
            if constexpr (std::is_same_v<T, ObservableStat>) return "observable:" + k.f.name;
            if constexpr (std::is_same_v<T, ObservableExceedanceStat>)
                return "observableExceedance:" + k.f.name;
        },
        kind);
}

OrbitSegment segmentPrefix(const OrbitSegment& seg, std::size_t n) {
    if (n == 0 || n > seg.length()) fail("segmentPrefix: invalid prefix length");
    OrbitSegment out{seg.system, seg.base, {}};
    out.states.assign(seg.states.begin(), seg.states.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

BoundedValue segmentStat(const SegmentStatKind& kind, const OrbitSegment& segX, const OrbitSegment& segY) {
    validatePair(segX, segY);
    const SpaceDescriptor& space = segX.system.space;
    const std::size_t n = segX.length();
    const SpaceLane lane = laneOf(space);

    if (std::holds_alternative<BesicovitchStat>(kind)) {
        BoundedValue sum;
        for (std::size_t k = 0; k < n; ++k) {
            sum = sum + distance(space, segX.states[k], segY.states[k]);
        }
        const Rational den(static_cast<unsigned long>(n));
        sum.value /= den;
        sum.value.canonicalize();
        sum.error /= den;
        sum.error.canonicalize();
        return sum;
    }
    if (const auto* bex = std::get_if<BesicovitchExceedanceStat>(&kind)) {
        if (bex->epsilon < 0) fail("exceedance: threshold must be nonnegative");
        int v = 0, hi = 0, lo = 0;
        for (std::size_t k = 0; k < n; ++k) {
            BoundedValue d = distance(space, segX.states[k], segY.states[k]);
            if (d.value > bex->epsilon) ++v;
            if (d.value + d.error > bex->epsilon) ++hi;
            if (d.value - d.error > bex->epsilon) ++lo;
        }
        const Rational den(static_cast<unsigned long>(n));
        Rational freq(v);
        freq /= den;
        freq.canonicalize();
        Rational err(std::max(hi - v, v - lo));
        err /= den;
        err.canonicalize();
        return {std::move(freq), std::move(err)};
    }

    if (const auto* obs = std::get_if<ObservableStat>(&kind)) {
        UnitReps fx = observableReps(obs->f, segX.states);
        UnitReps fy = observableReps(obs->f, segY.states);
        matching::Matching m = matching::solveSortedLine(fx.values, fy.values);
        return {std::move(m.meanCost), fx.maxPointError + fy.maxPointError};
    }
    if (const auto* oex = std::get_if<ObservableExceedanceStat>(&kind)) {
        if (oex->delta < 0) fail("exceedance: threshold must be nonnegative");
        UnitReps fx = observableReps(oex->f, segX.states);
        UnitReps fy = observableReps(oex->f, segY.states);
        return bracketedExceedance(
            [&](const Rational& t) { return matching::lineExceedanceCount(fx.values, fy.values, t); },
            oex->delta, fx.maxPointError + fy.maxPointError, n);
    }

    // Native-metric kinds: weakMean / supPerm / exceedance.
    if (lane == SpaceLane::circle || lane == SpaceLane::interval) {
        UnitReps xs = unitReps(space, segX.states);
        UnitReps ys = unitReps(space, segY.states);
        const Rational entryError = xs.maxPointError + ys.maxPointError;
        if (std::holds_alternative<WeakMeanStat>(kind)) {
            matching::Matching m = lane == SpaceLane::circle
                                       ? matching::solveSortedCircle(xs.values, ys.values)
                                       : matching::solveSortedLine(xs.values, ys.values);
            return {std::move(m.meanCost), entryError};
        }
        if (std::holds_alternative<SupPermStat>(kind)) {
            matching::Matching m = lane == SpaceLane::circle
                                       ? matching::solveSortedCircleMax(xs.values, ys.values)
                                       : matching::solveSortedLineMax(xs.values, ys.values);
            return {std::move(m.meanCost), entryError};
        }
        const auto& ex = std::get<ExceedanceStat>(kind);
        if (ex.epsilon < 0) fail("exceedance: threshold must be nonnegative");
        auto countAt = [&](const Rational& t) {
            return lane == SpaceLane::circle ? matching::circleExceedanceCount(xs.values, ys.values, t)
                                             : matching::lineExceedanceCount(xs.values, ys.values, t);
        };
        return bracketedExceedance(countAt, ex.epsilon, entryError, n);
    }

    MatrixCosts m = pairwiseCosts(space, segX.states, segY.states);
    if (std::holds_alternative<WeakMeanStat>(kind)) {
        return {matching::solveMinAssignment(m.costs).meanCost, m.maxEntryError};
    }
    if (std::holds_alternative<SupPermStat>(kind)) {
        return {matching::solveMaxAssignment(m.costs).meanCost, m.maxEntryError};
    }
    const auto& ex = std::get<ExceedanceStat>(kind);
    if (ex.epsilon < 0) fail("exceedance: threshold must be nonnegative");
    return bracketedExceedance(
        [&](const Rational& t) { return matching::minExceedanceCount(m.costs, t); }, ex.epsilon,
        m.maxEntryError, n);
}

// --- the count/cost sandwich ---------------------------------------------------

SandwichReport statSandwichCheck(const OrbitSegment& segX, const OrbitSegment& segY, const Observable& f,
                                 const Rational& delta) {
    validatePair(segX, segY);
    if (delta <= 0) fail("statSandwichCheck: delta must be positive");
    const std::size_t n = segX.length();
    UnitReps fx = observableReps(f, segX.states);
    UnitReps fy = observableReps(f, segY.states);

    SandwichReport report;
    report.delta = delta;
    report.n = n;
    report.exceedCount = matching::lineExceedanceCount(fx.values, fy.values, delta);
    report.matchedSum = matching::solveSortedLine(fx.values, fy.values).totalCost;
    const Rational nRat(static_cast<unsigned long>(n));
    report.lowerOk = delta * report.exceedCount <= report.matchedSum;
    report.upperOk = report.matchedSum <= report.exceedCount + delta * (nRat - report.exceedCount);
    if (!report.lowerOk || !report.upperOk) {
        throw std::logic_error("statSandwichCheck: count/cost sandwich violated (solver bug)");
    }
    return report;
}

// --- limit estimation ------------------------------------------------------------

LimitEstimate estimateLimit(const std::function<BoundedValue(std::size_t)>& statFn,
                            const std::vector<std::size_t>& schedule, unsigned tailWindow,
                            const Rational& tolerance) {
    if (schedule.empty()) fail("estimateLimit: empty schedule");
    if (tailWindow == 0) fail("estimateLimit: tail window must be positive");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (schedule[i] <= schedule[i - 1]) fail("estimateLimit: schedule must increase strictly");
    }

    LimitEstimate est;
    est.schedule = schedule;
    est.tailWindow = tailWindow;
    est.tolerance = tolerance;
    est.samples.reserve(schedule.size());
    for (std::size_t n : schedule) est.samples.push_back(statFn(n));

    const std::size_t window = std::min<std::size_t>(tailWindow, est.samples.size());
    const std::size_t start = est.samples.size() - window;
    est.limsupEstimate = est.samples[start];
    est.liminfEstimate = est.samples[start];
    for (std::size_t i = start + 1; i < est.samples.size(); ++i) {
        if (est.samples[i].value > est.limsupEstimate.value) est.limsupEstimate = est.samples[i];
        if (est.samples[i].value < est.liminfEstimate.value) est.liminfEstimate = est.samples[i];
    }
    const Rational spread = (est.limsupEstimate.value + est.limsupEstimate.error) -
                            (est.liminfEstimate.value - est.liminfEstimate.error);
    est.converged = est.samples.size() >= tailWindow && spread <= tolerance;
    return est;
}

std::vector<std::size_t> defaultSchedule(const SpaceDescriptor& space) {
    const unsigned top = laneOf(space) == SpaceLane::general ? 9 : 12;
    std::vector<std::size_t> schedule;
    for (unsigned j = 4; j <= top; ++j) schedule.push_back(std::size_t{1} << j);
    return schedule;
}

Rational defaultTolerance() { return makeRational(1, 100); }

// --- pair relations ----------------------------------------------------------------

RelationReport pairRelation(const SystemDescriptor& system, const StatePoint& x, const StatePoint& y,
                            const std::vector<std::size_t>& schedule, unsigned tailWindow,
                            const Rational& tolerance) {
    if (schedule.empty()) fail("pairRelation: empty schedule");
    const std::size_t maxN = schedule.back();
    const OrbitSegment segX = systems::orbitSegment(system, x, maxN);
    const OrbitSegment segY = systems::orbitSegment(system, y, maxN);

    auto statOn = [&](const SegmentStatKind& kind) {
        return [&, kind](std::size_t n) {
            return segmentStat(kind, segmentPrefix(segX, n), segmentPrefix(segY, n));
        };
    };

    RelationReport report;
    report.weakMeanEstimate = estimateLimit(statOn(WeakMeanStat{}), schedule, tailWindow, tolerance);
    report.supPermEstimate = estimateLimit(statOn(SupPermStat{}), schedule, tailWindow, tolerance);
    report.weakMeanAsymptotic = report.weakMeanEstimate.limsupEstimate.certifiesAtMost(tolerance);
    report.weakMeanProximal = report.weakMeanEstimate.liminfEstimate.certifiesAtMost(tolerance);
    report.strongMeanProximal = report.supPermEstimate.liminfEstimate.certifiesAtMost(tolerance);
    return report;
}

// --- integer-set densities -------------------------------------------------------------

IntegerSetView explicitSet(std::vector<std::size_t> indices, std::size_t horizon) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!indices.empty() && indices.back() >= horizon) fail("explicitSet: index beyond the horizon");
    auto shared = std::make_shared<const std::vector<std::size_t>>(std::move(indices));
    return {[shared](std::size_t i) {
                return std::binary_search(shared->begin(), shared->end(), i);
            },
            horizon};
}

LimitEstimate densityEstimate(const IntegerSetView& view, const std::vector<std::size_t>& schedule,
                              unsigned tailWindow, const Rational& tolerance) {
    if (schedule.empty()) fail("densityEstimate: empty schedule");
    if (schedule.back() > view.horizon) fail("densityEstimate: schedule exceeds the horizon");
    std::size_t cursor = 0;
    std::size_t count = 0;
    auto statFn = [&](std::size_t n) {
        while (cursor < n) {
            if (view.member(cursor)) ++count;
            ++cursor;
        }
        Rational freq(static_cast<unsigned long>(count), static_cast<unsigned long>(n));
        freq.canonicalize();
        return BoundedValue(std::move(freq));
    };
    return estimateLimit(statFn, schedule, tailWindow, tolerance);
}

BoundedValue upperDensity(const LimitEstimate& densities) { return densities.limsupEstimate; }
BoundedValue lowerDensity(const LimitEstimate& densities) { return densities.liminfEstimate; }

}  // namespace orbitmetrics::orbitstats
