#include "orbitmetrics/classify.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "orbitmetrics/matching.hpp"

namespace orbitmetrics::classify {

using orbitstats::estimateLimit;
using orbitstats::ExceedanceStat;
using orbitstats::ObservableStat;
using orbitstats::segmentPrefix;
using orbitstats::segmentStat;
using orbitstats::SegmentStatKind;
using orbitstats::WeakMeanStat;
using spaces::SpaceDescriptor;
using systems::OrbitSegment;
using systems::orbitSegment;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void requireDecreasing(const std::vector<Rational>& grid, const char* name) {
    if (grid.empty()) fail(std::string("probe config: empty ") + name);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 0) fail(std::string("probe config: ") + name + " entries must be positive");
        if (i > 0 && grid[i] >= grid[i - 1]) fail(std::string("probe config: ") + name + " must decrease");
    }
}

std::string strategyName(const SampleStrategy& s) {
    if (std::get_if<spaces::Uniform>(&s)) return "uniform";
    if (const auto* d = std::get_if<spaces::Dyadic>(&s)) return "dyadic:" + std::to_string(d->depth);
    if (const auto* g = std::get_if<spaces::RationalGrid>(&s)) return "grid:" + std::to_string(g->modulus);
    if (const auto* p = std::get_if<spaces::PeriodicTailStrategy>(&s))
        return "periodic:" + std::to_string(p->period);
    return "stream";
}

std::uint64_t mixSalt(std::uint64_t a, std::uint64_t b) { return deriveSeed(a, b); }

struct Candidate {
    StatePoint point;
    std::string origin;
};

/// Ball candidates: sampler-rotated in-ball draws plus any adversarial points
/// certified inside the ball. Samplers unfit for the space or radius are
/// skipped, so the candidate count may fall short of samplesPerBall.
std::vector<Candidate> ballCandidates(const SpaceDescriptor& space, const StatePoint& center,
                                      const Rational& radius, const ProbeConfig& config,
                                      std::uint64_t salt) {
    std::vector<Candidate> out;
    for (std::size_t k = 0; k < config.samplesPerBall; ++k) {
        const auto& strat = config.samplers[k % config.samplers.size()];
        const std::uint64_t s = deriveSeed(config.seed, mixSalt(salt, 0x5A00 + k));
        try {
            out.push_back({spaces::sampleInBall(space, center, radius, strat, s), strategyName(strat)});
        } catch (const std::invalid_argument&) {
            continue;
        }
    }
    for (const auto& p : config.adversarial) {
        const BoundedValue d = spaces::distance(space, center, p);
        if (d.value + d.error <= radius) out.push_back({p, "adversarial"});
    }
    return out;
}

std::vector<StatePoint> probeCenters(const SpaceDescriptor& space, const ProbeConfig& config,
                                     std::uint64_t salt) {
    std::vector<StatePoint> out;
    for (std::size_t i = 0; i < config.centerCount; ++i) {
        const auto& strat = config.samplers[i % config.samplers.size()];
        try {
            out.push_back(spaces::samplePoint(space, strat, deriveSeed(config.seed, mixSalt(salt, 0xCE00 + i))));
        } catch (const std::invalid_argument&) {
            continue;
        }
    }
    if (out.empty()) fail("probe config: no sampler fits the space");
    return out;
}

/// Per-pair statistics along the schedule: the tail estimate plus the running
/// maxima used by the single-n (in-the-mean) readings.
struct PairStats {
    LimitEstimate estimate;
    BoundedValue scheduleMax;
    std::size_t scheduleMaxN = 0;
    BoundedValue lateMax;
    std::size_t lateMaxN = 0;  // 0 when no schedule point reaches minWitnessN
};

PairStats pairStats(const SystemDescriptor& system, const OrbitSegment& segX, const StatePoint& y,
                    const SegmentStatKind& kind, const ProbeConfig& config) {
    const OrbitSegment segY = orbitSegment(system, y, config.schedule.back());
    PairStats st;
    st.estimate = estimateLimit(
        [&](std::size_t n) { return segmentStat(kind, segmentPrefix(segX, n), segmentPrefix(segY, n)); },
        config.schedule, config.tailWindow, config.tolerance);
    for (std::size_t i = 0; i < st.estimate.schedule.size(); ++i) {
        const BoundedValue& v = st.estimate.samples[i];
        const std::size_t n = st.estimate.schedule[i];
        if (st.scheduleMaxN == 0 || v.value > st.scheduleMax.value) {
            st.scheduleMax = v;
            st.scheduleMaxN = n;
        }
        if (n >= config.minWitnessN && (st.lateMaxN == 0 || v.value > st.lateMax.value)) {
            st.lateMax = v;
            st.lateMaxN = n;
        }
    }
    return st;
}

/// Fresh double evaluation of a witness statistic; any drift between the two
/// evaluations indicates hidden state and is an internal invariant violation.
void recheckWitness(const SystemDescriptor& system, const Witness& w, const SegmentStatKind& kind,
                    const ProbeConfig& config) {
    const OrbitSegment ax = orbitSegment(system, w.a, config.schedule.back());
    const OrbitSegment ay = orbitSegment(system, w.b, config.schedule.back());
    BoundedValue again;
    if (w.n == 0) {
        again = estimateLimit(
                    [&](std::size_t n) {
                        return segmentStat(kind, segmentPrefix(ax, n), segmentPrefix(ay, n));
                    },
                    config.schedule, config.tailWindow, config.tolerance)
                    .limsupEstimate;
    } else {
        again = segmentStat(kind, segmentPrefix(ax, w.n), segmentPrefix(ay, w.n));
    }
    if (again.value != w.statistic.value || again.error != w.statistic.error)
        throw std::logic_error("witness recomputation mismatch for " + orbitstats::statKindName(kind));
}

struct PointProbeSpec {
    std::function<SegmentStatKind(const Rational&)> statForEps;
    std::function<Rational(const Rational&)> boundForEps;
    bool strictBound = true;       // ok under "< bound"; violation at ">= bound"
    bool tailAggregation = true;   // tail limsup with converged gate, else schedule max
    bool epsIndependentStat = true;  // statForEps ignores eps, so evaluations can be shared
    std::uint64_t salt = 0;
};

/// The candidate pool for each ball is shared across epsilon levels (the ball
/// does not depend on eps), and pair evaluations are memoized whenever the
/// statistic itself is eps-independent.
ProbeVerdict probePoint(const SystemDescriptor& system, const StatePoint& x, const ProbeConfig& config,
                        const PointProbeSpec& spec) {
    validateProbeConfig(system, config);
    if (!spaces::contains(system.space, x)) fail("probe: point outside the space");
    ProbeVerdict out;
    out.config = config;
    const OrbitSegment segX = orbitSegment(system, x, config.schedule.back());

    std::vector<std::optional<std::vector<Candidate>>> pools(config.deltaGrid.size());
    auto poolFor = [&](std::size_t di) -> const std::vector<Candidate>& {
        if (!pools[di])
            pools[di] =
                ballCandidates(system.space, x, config.deltaGrid[di], config, mixSalt(spec.salt, di));
        return *pools[di];
    };
    std::map<std::pair<std::size_t, std::size_t>, PairStats> memo;
    auto statsFor = [&](std::size_t di, std::size_t k, const SegmentStatKind& kind) -> PairStats {
        const auto key = std::make_pair(di, k);
        if (spec.epsIndependentStat) {
            const auto it = memo.find(key);
            if (it != memo.end()) return it->second;
        }
        PairStats st = pairStats(system, segX, poolFor(di)[k].point, kind, config);
        if (spec.epsIndependentStat) memo.emplace(key, st);
        return st;
    };

    bool allEpsSatisfied = true;
    for (std::size_t ei = 0; ei < config.epsGrid.size(); ++ei) {
        const Rational& eps = config.epsGrid[ei];
        const SegmentStatKind kind = spec.statForEps(eps);
        const Rational bound = spec.boundForEps(eps);
        bool satisfied = false;
        std::vector<Witness> smallestBallViolators;
        for (std::size_t di = 0; di < config.deltaGrid.size(); ++di) {
            const Rational& delta = config.deltaGrid[di];
            GridCellRecord cell{eps, delta};
            const auto& cands = poolFor(di);
            cell.sampleCount = cands.size();
            bool cellOk = !cands.empty();
            std::vector<Witness> violators;
            for (std::size_t k = 0; k < cands.size(); ++k) {
                const auto& cand = cands[k];
                const PairStats st = statsFor(di, k, kind);
                const BoundedValue& stat =
                    spec.tailAggregation ? st.estimate.limsupEstimate : st.scheduleMax;
                const bool settled = !spec.tailAggregation || st.estimate.converged;
                bool ok, violated;
                if (spec.strictBound) {
                    ok = settled && stat.value + stat.error < bound;
                    violated = settled && stat.value - stat.error >= bound;
                } else {
                    ok = settled && stat.certifiesAtMost(bound);
                    violated = settled && stat.certifiesAbove(bound);
                }
                if (violated) {
                    ++cell.violations;
                    cellOk = false;
                    violators.push_back(
                        {x, cand.point, spec.tailAggregation ? 0 : st.scheduleMaxN, stat, cand.origin});
                } else if (!ok) {
                    ++cell.unresolved;
                    cellOk = false;
                }
            }
            cell.satisfied = cellOk;
            out.diagnostics.push_back(cell);
            if (di + 1 == config.deltaGrid.size()) smallestBallViolators = std::move(violators);
            if (cellOk) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) {
            allEpsSatisfied = false;
            // A certified violator in the smallest ball defeats every probed
            // radius, since the smaller ball sits inside the larger ones.
            if (!smallestBallViolators.empty() && !out.achievedConstant) out.achievedConstant = eps;
            for (auto& w : smallestBallViolators) {
                recheckWitness(system, w, kind, config);
                out.witnesses.push_back(std::move(w));
            }
        }
    }
    if (allEpsSatisfied) {
        out.verdict = VerdictKind::equicontinuousConsistent;
    } else if (!out.witnesses.empty()) {
        out.verdict = VerdictKind::sensitiveWitnessed;
    } else {
        out.verdict = VerdictKind::inconclusive;
    }
    return out;
}

Rational certifiedLowerBound(const BoundedValue& v) { return v.value - v.error; }

}  // namespace

// --- configuration ------------------------------------------------------------

void validateProbeConfig(const SystemDescriptor& system, const ProbeConfig& config) {
    requireDecreasing(config.epsGrid, "epsGrid");
    requireDecreasing(config.deltaGrid, "deltaGrid");
    requireDecreasing(config.candidateConstants, "candidateConstants");
    if (config.schedule.empty()) fail("probe config: empty schedule");
    for (std::size_t i = 0; i < config.schedule.size(); ++i) {
        if (config.schedule[i] == 0) fail("probe config: schedule entries must be positive");
        if (i > 0 && config.schedule[i] <= config.schedule[i - 1])
            fail("probe config: schedule must strictly increase");
    }
    if (config.tailWindow == 0) fail("probe config: tail window must be positive");
    if (config.tolerance < 0) fail("probe config: negative tolerance");
    if (config.samplers.empty()) fail("probe config: no samplers");
    if (config.samplesPerBall == 0) fail("probe config: samplesPerBall must be positive");
    if (config.centerCount == 0) fail("probe config: centerCount must be positive");
    for (const Rational& t : config.tGrid) {
        if (t < 0 || t > 1) fail("probe config: tGrid entries must lie in [0,1]");
    }
    for (const auto& p : config.adversarial) {
        if (!spaces::contains(system.space, p)) fail("probe config: adversarial point outside the space");
    }
}

ProbeConfig defaultProbeConfig(const SystemDescriptor& system) {
    ProbeConfig c;
    c.epsGrid = {makeRational(1, 4), makeRational(1, 10), makeRational(1, 20)};
    c.deltaGrid = {makeRational(1, 8), makeRational(1, 32), makeRational(1, 128)};
    c.candidateConstants = {makeRational(1, 4), makeRational(1, 5), makeRational(3, 20),
                            makeRational(1, 10), makeRational(1, 20)};
    c.tGrid = {Rational(0), makeRational(1, 2), makeRational(9, 10), makeRational(99, 100)};
    c.samplesPerBall = 6;
    c.centerCount = 2;

    const bool smallSpace = std::holds_alternative<spaces::CircleSpace>(system.space) ||
                            std::holds_alternative<spaces::IntervalSpace>(system.space);
    c.schedule.clear();
    for (std::size_t n = 16; n <= (smallSpace ? 4096u : 256u); n *= 2) c.schedule.push_back(n);

    // The sampler mix must produce points the map can iterate exactly, and it
    // must include degenerate generators (dyadic collapse, periodic tails)
    // because uniform-looking samples alone never witness sensitivity.
    using spaces::Dyadic;
    using spaces::PeriodicTailStrategy;
    using spaces::RationalGrid;
    using spaces::Stream;
    using spaces::Uniform;
    if (std::holds_alternative<systems::Rotation>(system.kind) ||
        std::holds_alternative<systems::ProductMap>(system.kind)) {
        // Rotations need rational coordinates; small denominators keep the
        // sorted solvers on the integer lane.
        c.samplers = {Dyadic{20}, RationalGrid{65521}, PeriodicTailStrategy{6}};
    } else if (std::holds_alternative<systems::Doubling>(system.kind) ||
               std::holds_alternative<systems::Tent>(system.kind)) {
        if (std::holds_alternative<spaces::IntervalSpace>(system.space)) {
            c.samplers = {Dyadic{20}, Uniform{}, RationalGrid{577}};
        } else {
            c.samplers = {Dyadic{20}, Stream{}, PeriodicTailStrategy{6}};
        }
    } else {
        c.samplers = {Stream{}, PeriodicTailStrategy{6}, Dyadic{12}};
    }
    return c;
}

// --- verdict names -----------------------------------------------------------------

std::string verdictName(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::equicontinuousConsistent: return "equicontinuous-consistent";
        case VerdictKind::sensitiveWitnessed: return "sensitive-witnessed";
        case VerdictKind::inconclusive: return "inconclusive";
    }
    throw std::logic_error("unknown verdict kind");
}

std::string tupleKindName(TupleKind kind) {
    switch (kind) {
        case TupleKind::meanTuple: return "mean";
        case TupleKind::inMeanTuple: return "inMean";
        case TupleKind::weakInMeanTuple: return "weakInMean";
        case TupleKind::densityTuple: return "density";
    }
    throw std::logic_error("unknown tuple kind");
}

std::string dichotomySideName(DichotomySide side) {
    switch (side) {
        case DichotomySide::equicontinuousSide: return "equicontinuous-side";
        case DichotomySide::sensitiveSide: return "sensitive-side";
        case DichotomySide::inconclusive: return "inconclusive";
    }
    throw std::logic_error("unknown dichotomy side");
}

// --- point probes -----------------------------------------------------------------

ProbeVerdict probeWeakMeanEquicontinuousPoint(const SystemDescriptor& system, const StatePoint& x,
                                              const ProbeConfig& config) {
    PointProbeSpec spec;
    spec.statForEps = [](const Rational&) -> SegmentStatKind { return WeakMeanStat{}; };
    spec.boundForEps = [](const Rational& eps) { return eps; };
    spec.strictBound = true;
    spec.tailAggregation = true;
    spec.salt = 0xE1;
    return probePoint(system, x, config, spec);
}

ProbeVerdict probeEquicontinuousInMeanPoint(const SystemDescriptor& system, const StatePoint& x,
                                            const ProbeConfig& config) {
    PointProbeSpec spec;
    spec.statForEps = [](const Rational&) -> SegmentStatKind { return WeakMeanStat{}; };
    spec.boundForEps = [](const Rational& eps) { return eps; };
    spec.strictBound = true;
    spec.tailAggregation = false;  // running max over the schedule stands in for sup n
    spec.salt = 0xE2;
    return probePoint(system, x, config, spec);
}

ProbeVerdict probeDensityTEquicontinuity(const SystemDescriptor& system, const StatePoint& x,
                                         const Rational& t, const ProbeConfig& config) {
    if (t < 0 || t > 1) fail("density probe: t must lie in [0,1]");
    PointProbeSpec spec;
    spec.statForEps = [](const Rational& eps) -> SegmentStatKind { return ExceedanceStat{eps}; };
    spec.boundForEps = [t, tol = config.tolerance](const Rational&) -> Rational {
        return Rational(1 - t + tol);
    };
    spec.strictBound = false;
    spec.tailAggregation = true;
    spec.epsIndependentStat = false;  // the exceedance threshold is eps itself
    spec.salt = 0xD0;  // shared across t so every level sees the same pairs
    return probePoint(system, x, config, spec);
}

ProbeVerdict probeObservableEquicontinuity(const SystemDescriptor& system, const StatePoint& x,
                                           const Observable& f, const ProbeConfig& config,
                                           ObservableProbeMode mode) {
    PointProbeSpec spec;
    spec.statForEps = [&f](const Rational&) -> SegmentStatKind { return ObservableStat{f}; };
    spec.boundForEps = [](const Rational& eps) { return eps; };
    spec.strictBound = true;
    spec.tailAggregation = mode == ObservableProbeMode::mean;
    spec.salt = 0x0B;  // shared across observables so implications compare like with like
    return probePoint(system, x, config, spec);
}

// --- sensitivity constants ------------------------------------------------------------

namespace {

struct ScanEntry {
    Candidate cand;
    PairStats stats;
};
struct BallScan {
    StatePoint center;
    Rational radius;
    std::vector<ScanEntry> entries;
};

/// One weak-mean evaluation pass over every (center, radius) ball; both
/// sensitivity modes read their statistics off the same scan.
std::vector<BallScan> sensitivityScan(const SystemDescriptor& system, const ProbeConfig& config) {
    validateProbeConfig(system, config);
    const std::vector<StatePoint> centers = probeCenters(system.space, config, 0x5E);
    std::vector<BallScan> scan;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        const OrbitSegment segC = orbitSegment(system, centers[ci], config.schedule.back());
        for (std::size_t di = 0; di < config.deltaGrid.size(); ++di) {
            BallScan ball{centers[ci], config.deltaGrid[di], {}};
            const auto cands = ballCandidates(system.space, centers[ci], ball.radius, config,
                                              mixSalt(0x5E10, ci * 0x40 + di));
            for (const auto& cand : cands)
                ball.entries.push_back({cand, pairStats(system, segC, cand.point, WeakMeanStat{}, config)});
            scan.push_back(std::move(ball));
        }
    }
    return scan;
}

ProbeVerdict readSensitivity(const SystemDescriptor& system, const ProbeConfig& config,
                             SensitivityMode mode, const std::vector<BallScan>& scan) {
    ProbeVerdict out;
    out.config = config;
    const Rational smallest = config.candidateConstants.back();

    struct BallBest {
        Witness best;
        bool any = false;
        bool fullyResolved = true;  // strongMean: every candidate's estimate converged
    };
    std::vector<BallBest> balls;
    for (const BallScan& scanned : scan) {
        BallBest ball;
        GridCellRecord cell{Rational(0), scanned.radius};  // epsilon reports the ball's best bound
        cell.sampleCount = scanned.entries.size();
        for (const ScanEntry& entry : scanned.entries) {
            const PairStats& st = entry.stats;
            BoundedValue stat;
            std::size_t witnessN = 0;
            bool usable = false;
            if (mode == SensitivityMode::strongMean) {
                stat = st.estimate.limsupEstimate;
                usable = st.estimate.converged;
                if (!usable) {
                    ball.fullyResolved = false;
                    ++cell.unresolved;
                }
            } else {
                stat = st.lateMax;
                witnessN = st.lateMaxN;
                usable = st.lateMaxN != 0;
                if (!usable) ++cell.unresolved;
            }
            if (!usable) continue;
            if (stat.certifiesAbove(smallest)) ++cell.violations;
            if (!ball.any || certifiedLowerBound(stat) > certifiedLowerBound(ball.best.statistic)) {
                ball.best = {scanned.center, entry.cand.point, witnessN, stat, entry.cand.origin};
                ball.any = true;
            }
        }
        if (ball.any) cell.epsilon = certifiedLowerBound(ball.best.statistic);
        out.diagnostics.push_back(cell);
        balls.push_back(std::move(ball));
    }

    std::optional<Rational> achieved;
    for (const Rational& c : config.candidateConstants) {
        bool everyBall = !balls.empty();
        for (const auto& ball : balls) {
            if (!ball.any || !ball.best.statistic.certifiesAbove(c)) {
                everyBall = false;
                break;
            }
        }
        if (everyBall) {
            achieved = c;
            break;
        }
    }

    if (achieved) {
        out.verdict = VerdictKind::sensitiveWitnessed;
        out.achievedConstant = achieved;
        for (const auto& ball : balls) {
            recheckWitness(system, ball.best, WeakMeanStat{}, config);
            out.witnesses.push_back(ball.best);
        }
    } else {
        bool resolved = true;
        for (const auto& ball : balls) resolved = resolved && ball.fullyResolved && ball.any;
        out.verdict = resolved ? VerdictKind::equicontinuousConsistent : VerdictKind::inconclusive;
    }
    return out;
}

}  // namespace

ProbeVerdict estimateSensitivityConstant(const SystemDescriptor& system, const ProbeConfig& config,
                                         SensitivityMode mode) {
    return readSensitivity(system, config, mode, sensitivityScan(system, config));
}

AgreementReport checkMeanVsInMeanAgreement(const SystemDescriptor& system, const ProbeConfig& config) {
    AgreementReport report;
    const std::vector<BallScan> scan = sensitivityScan(system, config);
    report.meanVerdict = readSensitivity(system, config, SensitivityMode::strongMean, scan);
    report.inMeanVerdict = readSensitivity(system, config, SensitivityMode::strongInMean, scan);
    const VerdictKind a = report.meanVerdict.verdict;
    const VerdictKind b = report.inMeanVerdict.verdict;
    const bool decisive =
        a != VerdictKind::inconclusive && b != VerdictKind::inconclusive;
    report.agree = decisive && a == b;
    report.resolutionInsufficient = !report.agree;
    return report;
}

// --- sensitive tuples ---------------------------------------------------------------

namespace {

/// Matched joint-visit frequency samples for one witness pair against one
/// anchor pair: memberships are counted only when certified inside the
/// epsilon-balls, so every sample is an exact lower bound. The max-pairing
/// variant rides along for diagnostics.
struct TupleEval {
    std::vector<BoundedValue> samples;
    std::vector<Rational> maxVariant;
};

TupleEval tupleFrequency(const SpaceDescriptor& space, const StatePoint& a1, const StatePoint& a2,
                         const Rational& eps, const OrbitSegment& segY1, const OrbitSegment& segY2,
                         const std::vector<std::size_t>& schedule) {
    const std::size_t maxN = schedule.back();
    std::vector<long> countA(maxN + 1, 0), countB(maxN + 1, 0);
    for (std::size_t i = 0; i < maxN; ++i) {
        const BoundedValue dA = spaces::distance(space, segY1.states[i], a1);
        const BoundedValue dB = spaces::distance(space, segY2.states[i], a2);
        countA[i + 1] = countA[i] + (dA.value + dA.error < eps ? 1 : 0);
        countB[i + 1] = countB[i] + (dB.value + dB.error < eps ? 1 : 0);
    }
    TupleEval ev;
    for (const std::size_t n : schedule) {
        const long mn = matching::minJointVisitCount(countA[n], countB[n], static_cast<long>(n));
        const long mx = matching::maxJointVisitCount(countA[n], countB[n], static_cast<long>(n));
        ev.samples.emplace_back(makeRational(mn, static_cast<long>(n)));
        ev.maxVariant.push_back(makeRational(mx, static_cast<long>(n)));
    }
    return ev;
}

BoundedValue lookupSample(const std::vector<std::size_t>& schedule,
                          const std::vector<BoundedValue>& samples, std::size_t n) {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] == n) return samples[i];
    }
    throw std::logic_error("schedule lookup miss");
}

struct TupleReading {
    BoundedValue stat;
    std::size_t witnessN = 0;  // 0 = tail estimate
    bool usable = false;
};

TupleReading readTuple(const TupleEval& ev, const ProbeConfig& config, TupleKind kind) {
    TupleReading r;
    if (kind == TupleKind::inMeanTuple || kind == TupleKind::weakInMeanTuple) {
        for (std::size_t i = 0; i < config.schedule.size(); ++i) {
            if (!r.usable || ev.samples[i].value > r.stat.value) {
                r.stat = ev.samples[i];
                r.witnessN = config.schedule[i];
                r.usable = true;
            }
        }
        return r;
    }
    const LimitEstimate est = estimateLimit(
        [&](std::size_t n) { return lookupSample(config.schedule, ev.samples, n); }, config.schedule,
        config.tailWindow, config.tolerance);
    r.stat = est.limsupEstimate;
    r.witnessN = 0;
    // A mean-tuple claim needs a settled tail; density tuples only claim the
    // limsup stays positive, which an oscillating tail already witnesses.
    r.usable = kind == TupleKind::densityTuple || est.converged;
    return r;
}

}  // namespace

std::vector<TupleCandidate> searchSensitiveTuples(const SystemDescriptor& system,
                                                  const ProbeConfig& config, TupleKind kind) {
    validateProbeConfig(system, config);
    const SpaceDescriptor& space = system.space;
    const std::size_t maxN = config.schedule.back();

    std::vector<StatePoint> anchors = probeCenters(space, config, 0xA1);
    for (const auto& p : config.adversarial) anchors.push_back(p);

    std::vector<TupleCandidate> rows;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        for (std::size_t j = i + 1; j < anchors.size(); ++j) {
            const BoundedValue gap = spaces::distance(space, anchors[i], anchors[j]);
            if (!gap.certifiesAbove(Rational(0))) continue;  // anchors must be distinct
            for (std::size_t ei = 0; ei < config.epsGrid.size(); ++ei) {
                const Rational& eps = config.epsGrid[ei];
                const std::uint64_t salt = mixSalt(
                    0xA200 + (kind == TupleKind::weakInMeanTuple ? 1 : 0), (i * 0x100 + j) * 0x10 + ei);

                // Witness pools: one pool per locality level. Ball kinds pool
                // pairs inside each probed ball; the weak kind pools pairs at
                // each closeness level without a shared ball.
                struct Pool {
                    std::string label;
                    std::vector<std::pair<Candidate, Candidate>> pairs;
                };
                std::vector<Pool> pools;
                if (kind == TupleKind::weakInMeanTuple) {
                    for (std::size_t ti = 0; ti < config.deltaGrid.size(); ++ti) {
                        const Rational& tau = config.deltaGrid[ti];
                        Pool pool{"tau=" + approxDecimal(tau), {}};
                        for (std::size_t k = 0; k < config.samplesPerBall; ++k) {
                            const auto& stratA = config.samplers[k % config.samplers.size()];
                            const auto& stratB = config.samplers[(k + 1) % config.samplers.size()];
                            try {
                                StatePoint y1 = spaces::samplePoint(
                                    space, stratA, deriveSeed(config.seed, mixSalt(salt, 0x70 + ti * 0x20 + k)));
                                StatePoint y2 = spaces::sampleInBall(
                                    space, y1, tau, stratB,
                                    deriveSeed(config.seed, mixSalt(salt, 0x71 + ti * 0x20 + k)));
                                pool.pairs.push_back({{std::move(y1), strategyName(stratA)},
                                                      {std::move(y2), strategyName(stratB)}});
                            } catch (const std::invalid_argument&) {
                                continue;
                            }
                        }
                        pools.push_back(std::move(pool));
                    }
                } else {
                    const std::vector<StatePoint> centers = probeCenters(space, config, mixSalt(salt, 0xC0));
                    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
                        for (std::size_t di = 0; di < config.deltaGrid.size(); ++di) {
                            const Rational& radius = config.deltaGrid[di];
                            Pool pool{"ball#" + std::to_string(ci) + " r=" + approxDecimal(radius), {}};
                            auto cands = ballCandidates(space, centers[ci], radius, config,
                                                        mixSalt(salt, ci * 0x40 + di));
                            Candidate centerCand{centers[ci], "center"};
                            for (const auto& cand : cands) pool.pairs.push_back({centerCand, cand});
                            for (std::size_t a = 0; a + 1 < cands.size(); ++a)
                                pool.pairs.push_back({cands[a], cands[a + 1]});
                            pools.push_back(std::move(pool));
                        }
                    }
                }

                // Best witness per pool, then the anchor-level constant is what
                // every pool can certify simultaneously.
                std::vector<Witness> bestPerPool;
                bool everyPool = !pools.empty();
                for (const auto& pool : pools) {
                    bool any = false;
                    Witness best;
                    for (const auto& [c1, c2] : pool.pairs) {
                        const OrbitSegment s1 = orbitSegment(system, c1.point, maxN);
                        const OrbitSegment s2 = orbitSegment(system, c2.point, maxN);
                        const TupleEval ev =
                            tupleFrequency(space, anchors[i], anchors[j], eps, s1, s2, config.schedule);
                        const TupleReading r = readTuple(ev, config, kind);
                        if (!r.usable) continue;
                        if (!any || certifiedLowerBound(r.stat) > certifiedLowerBound(best.statistic)) {
                            std::size_t idx = r.witnessN == 0 ? ev.maxVariant.size() - 1 : 0;
                            for (std::size_t q = 0; q < config.schedule.size(); ++q)
                                if (config.schedule[q] == r.witnessN) idx = q;
                            best = {c1.point, c2.point, r.witnessN, r.stat,
                                    pool.label + " via " + c1.origin + "/" + c2.origin +
                                        " maxPairing=" + approxDecimal(ev.maxVariant[idx])};
                            any = true;
                        }
                    }
                    if (!any) {
                        everyPool = false;
                        break;
                    }
                    bestPerPool.push_back(std::move(best));
                }
                if (!everyPool) continue;

                Rational floorBound;
                bool first = true;
                for (const auto& w : bestPerPool) {
                    const Rational lb = certifiedLowerBound(w.statistic);
                    if (first || lb < floorBound) floorBound = lb;
                    first = false;
                }
                std::optional<Rational> achieved;
                if (kind == TupleKind::densityTuple) {
                    if (floorBound > 0) achieved = floorBound;
                } else {
                    for (const Rational& c : config.candidateConstants) {
                        if (floorBound > c) {
                            achieved = c;
                            break;
                        }
                    }
                }
                if (!achieved) continue;

                TupleCandidate row;
                row.anchor1 = anchors[i];
                row.anchor2 = anchors[j];
                row.epsilon = eps;
                row.frequencyBound = *achieved;
                row.witnesses = std::move(bestPerPool);
                for (const auto& w : row.witnesses) {
                    const OrbitSegment s1 = orbitSegment(system, w.a, maxN);
                    const OrbitSegment s2 = orbitSegment(system, w.b, maxN);
                    const TupleEval ev =
                        tupleFrequency(space, anchors[i], anchors[j], eps, s1, s2, config.schedule);
                    const TupleReading r = readTuple(ev, config, kind);
                    if (r.stat.value != w.statistic.value || r.witnessN != w.n)
                        throw std::logic_error("tuple witness recomputation mismatch");
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

// --- density equivalence ---------------------------------------------------------------

DensityEquivalenceReport checkDensityEquivalence(const SystemDescriptor& system,
                                                 const ProbeConfig& config) {
    validateProbeConfig(system, config);
    DensityEquivalenceReport report;
    const std::vector<StatePoint> centers = probeCenters(system.space, config, 0xDE);
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        DensityAgreementRow row;
        row.centerIndex = ci;
        row.weakMeanVerdict = probeWeakMeanEquicontinuousPoint(system, centers[ci], config).verdict;
        bool anyDensitySensitive = false;
        bool allDensityEquicontinuous = true;
        bool anyInconclusive = row.weakMeanVerdict == VerdictKind::inconclusive;
        for (const Rational& t : config.tGrid) {
            const VerdictKind v = probeDensityTEquicontinuity(system, centers[ci], t, config).verdict;
            row.densityVerdicts.push_back({t, v});
            anyDensitySensitive = anyDensitySensitive || v == VerdictKind::sensitiveWitnessed;
            allDensityEquicontinuous =
                allDensityEquicontinuous && v == VerdictKind::equicontinuousConsistent;
            anyInconclusive = anyInconclusive || v == VerdictKind::inconclusive;
        }
        // Weak-mean equicontinuity should match density equicontinuity at every
        // level t < 1; a sensitive weak-mean verdict should show up at some level.
        row.disagree =
            (row.weakMeanVerdict == VerdictKind::equicontinuousConsistent && anyDensitySensitive) ||
            (row.weakMeanVerdict == VerdictKind::sensitiveWitnessed && allDensityEquicontinuous);
        report.anyDisagreement = report.anyDisagreement || row.disagree;
        report.resolutionInsufficient = report.resolutionInsufficient || anyInconclusive;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --- observable implications ---------------------------------------------------------

ObservableImplicationReport checkObservableImplications(const SystemDescriptor& system,
                                                        const StatePoint& x, const ProbeConfig& config) {
    ObservableImplicationReport report;
    report.weakMeanVerdict = probeWeakMeanEquicontinuousPoint(system, x, config).verdict;
    for (const Observable& f : orbitstats::observableRegistry(system.space)) {
        ObservableImplicationRow row;
        row.observableName = f.name;
        row.observableVerdict =
            probeObservableEquicontinuity(system, x, f, config, ObservableProbeMode::mean).verdict;
        row.violatesImplication = report.weakMeanVerdict == VerdictKind::equicontinuousConsistent &&
                                  row.observableVerdict == VerdictKind::sensitiveWitnessed;
        report.anyViolation = report.anyViolation || row.violatesImplication;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --- dichotomy -----------------------------------------------------------------------

DichotomyReport dichotomyReport(const SystemDescriptor& system, const ProbeConfig& config,
                                SensitivityMode mode) {
    validateProbeConfig(system, config);
    DichotomyReport report;
    report.mode = mode;
    report.sensitivity = estimateSensitivityConstant(system, config, mode);

    const std::vector<StatePoint> centers = probeCenters(system.space, config, 0x5E);
    bool allPointsEquicontinuous = true;
    for (const StatePoint& c : centers) {
        ProbeVerdict v = mode == SensitivityMode::strongMean
                             ? probeWeakMeanEquicontinuousPoint(system, c, config)
                             : probeEquicontinuousInMeanPoint(system, c, config);
        allPointsEquicontinuous =
            allPointsEquicontinuous && v.verdict == VerdictKind::equicontinuousConsistent;
        report.pointProbes.push_back(std::move(v));
    }

    if (report.sensitivity.verdict == VerdictKind::sensitiveWitnessed) {
        report.side = DichotomySide::sensitiveSide;
        report.achievedConstant = report.sensitivity.achievedConstant;
    } else if (report.sensitivity.verdict == VerdictKind::equicontinuousConsistent &&
               allPointsEquicontinuous) {
        report.side = DichotomySide::equicontinuousSide;
    } else {
        report.side = DichotomySide::inconclusive;
    }
    return report;
}

}  // namespace orbitmetrics::classify
