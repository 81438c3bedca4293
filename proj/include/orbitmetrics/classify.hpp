#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitmetrics/orbitstats.hpp"

namespace orbitmetrics::classify {

using orbitstats::LimitEstimate;
using orbitstats::Observable;
using spaces::SampleStrategy;
using spaces::StatePoint;
using systems::SystemDescriptor;

// --- configuration ------------------------------------------------------------

struct ProbeConfig {
    std::vector<Rational> epsGrid;          // decreasing
    std::vector<Rational> deltaGrid;        // decreasing ball radii
    std::vector<std::size_t> schedule;      // strictly increasing n values
    unsigned tailWindow = 3;
    Rational tolerance = Rational(1, 100);
    std::vector<SampleStrategy> samplers;   // rotated across draws
    std::vector<StatePoint> adversarial;    // injected candidates, used when certified in-ball
    std::size_t samplesPerBall = 8;
    std::size_t centerCount = 3;
    std::size_t minWitnessN = 256;          // earliest n a single-n witness may cite
    std::vector<Rational> candidateConstants;  // decreasing sensitivity constants
    std::vector<Rational> tGrid;            // density levels in [0,1]
    std::uint64_t seed = 0x20260819ULL;
};

/// Space-aware defaults: grids, schedule, and a sampler mix that includes the
/// degenerate-orbit generators (dyadic points, periodic tails) needed to find
/// sensitivity witnesses that uniform sampling alone misses.
[[nodiscard]] ProbeConfig defaultProbeConfig(const SystemDescriptor& system);

void validateProbeConfig(const SystemDescriptor& system, const ProbeConfig& config);

// --- verdicts --------------------------------------------------------------------

enum class VerdictKind { equicontinuousConsistent, sensitiveWitnessed, inconclusive };
[[nodiscard]] std::string verdictName(VerdictKind kind);

struct Witness {
    StatePoint a;
    StatePoint b;
    std::size_t n = 0;       // schedule point backing the statistic; 0 = tail estimate
    BoundedValue statistic;
    std::string origin;      // sampler or construction that produced the pair
};

struct GridCellRecord {
    Rational epsilon;
    Rational delta;
    std::size_t sampleCount = 0;
    std::size_t violations = 0;   // certified above the bound
    std::size_t unresolved = 0;   // not certifiable either way (or non-converged)
    bool satisfied = false;       // every sample certified under the bound
};

struct ProbeVerdict {
    VerdictKind verdict = VerdictKind::inconclusive;
    std::vector<Witness> witnesses;
    std::optional<Rational> achievedConstant;
    std::vector<GridCellRecord> diagnostics;
    ProbeConfig config;
};

// --- point probes -----------------------------------------------------------------

/// For every eps, search the delta grid for a ball whose sampled points all
/// keep the tail-limsup weak-mean estimate certified below eps. Sensitive
/// requires a converged, certified violator inside the smallest ball.
[[nodiscard]] ProbeVerdict probeWeakMeanEquicontinuousPoint(const SystemDescriptor& system,
                                                            const StatePoint& x, const ProbeConfig& config);

/// Same search with the running maximum of the weak-mean statistic over the
/// whole schedule (finite surrogate for the sup over n).
[[nodiscard]] ProbeVerdict probeEquicontinuousInMeanPoint(const SystemDescriptor& system,
                                                          const StatePoint& x, const ProbeConfig& config);

// --- sensitivity constants ------------------------------------------------------------

enum class SensitivityMode {
    strongMean,    // converged tail-limsup of the weak-mean statistic
    strongInMean,  // a single schedule point n >= minWitnessN
};

/// Largest candidate constant such that every probed ball contains a pair
/// (center, sample) whose statistic is certified above it.
[[nodiscard]] ProbeVerdict estimateSensitivityConstant(const SystemDescriptor& system,
                                                       const ProbeConfig& config, SensitivityMode mode);

struct AgreementReport {
    ProbeVerdict meanVerdict;
    ProbeVerdict inMeanVerdict;
    bool agree = false;                  // same decisive verdict in both modes
    bool resolutionInsufficient = false; // any inconclusive or a split verdict
};
[[nodiscard]] AgreementReport checkMeanVsInMeanAgreement(const SystemDescriptor& system,
                                                         const ProbeConfig& config);

// --- sensitive tuples ---------------------------------------------------------------

enum class TupleKind {
    meanTuple,        // tail-limsup of the matched joint-visit frequency, converged
    inMeanTuple,      // a single schedule point
    weakInMeanTuple,  // witness pairs merely close, not inside a common ball
    densityTuple,     // tail-limsup positivity, no constant demanded
};
[[nodiscard]] std::string tupleKindName(TupleKind kind);

struct TupleCandidate {
    StatePoint anchor1;
    StatePoint anchor2;
    Rational epsilon;
    Rational frequencyBound;  // certified lower bound c on the matched joint-visit frequency
    std::vector<Witness> witnesses;
};

/// Anchor pairs are drawn from the sampler mix plus the adversarial list; the
/// matched joint-visit frequency uses the exact closed form max(0,|A|+|B|-n)/n
/// with memberships counted only when certified inside the epsilon-balls.
[[nodiscard]] std::vector<TupleCandidate> searchSensitiveTuples(const SystemDescriptor& system,
                                                                const ProbeConfig& config, TupleKind kind);

// --- density equicontinuity ------------------------------------------------------------

/// Per eps, search delta so that sampled pairs (x, y) keep the tail-limsup of
/// the exceedance(eps) frequency certified at most 1 - t + tolerance.
[[nodiscard]] ProbeVerdict probeDensityTEquicontinuity(const SystemDescriptor& system, const StatePoint& x,
                                                       const Rational& t, const ProbeConfig& config);

struct DensityAgreementRow {
    std::size_t centerIndex = 0;
    VerdictKind weakMeanVerdict = VerdictKind::inconclusive;
    std::vector<std::pair<Rational, VerdictKind>> densityVerdicts;  // per t
    bool disagree = false;
};
struct DensityEquivalenceReport {
    std::vector<DensityAgreementRow> rows;
    bool anyDisagreement = false;
    bool resolutionInsufficient = false;
};
/// Finite-scale check of "weak-mean equicontinuous iff density-t for all t<1".
[[nodiscard]] DensityEquivalenceReport checkDensityEquivalence(const SystemDescriptor& system,
                                                               const ProbeConfig& config);

// --- observable probes --------------------------------------------------------------

enum class ObservableProbeMode { mean, inMean };

[[nodiscard]] ProbeVerdict probeObservableEquicontinuity(const SystemDescriptor& system,
                                                         const StatePoint& x, const Observable& f,
                                                         const ProbeConfig& config,
                                                         ObservableProbeMode mode);

struct ObservableImplicationRow {
    std::string observableName;
    VerdictKind observableVerdict = VerdictKind::inconclusive;
    bool violatesImplication = false;
};
struct ObservableImplicationReport {
    VerdictKind weakMeanVerdict = VerdictKind::inconclusive;
    std::vector<ObservableImplicationRow> rows;
    bool anyViolation = false;  // weak-mean consistent but some f-probe witnessed sensitivity
};
/// A weak-mean equicontinuous sample must stay equicontinuous for every
/// registered Lipschitz observable; violations are reported, never asserted.
[[nodiscard]] ObservableImplicationReport checkObservableImplications(const SystemDescriptor& system,
                                                                      const StatePoint& x,
                                                                      const ProbeConfig& config);

// --- the system-level dichotomy --------------------------------------------------------

enum class DichotomySide { equicontinuousSide, sensitiveSide, inconclusive };
[[nodiscard]] std::string dichotomySideName(DichotomySide side);

struct DichotomyReport {
    DichotomySide side = DichotomySide::inconclusive;
    SensitivityMode mode = SensitivityMode::strongMean;
    std::vector<ProbeVerdict> pointProbes;  // per sampled center
    ProbeVerdict sensitivity;
    std::optional<Rational> achievedConstant;
};

/// Point probes over sampled centers plus the sensitivity-constant search,
/// folded into one side-or-inconclusive verdict (never both sides).
[[nodiscard]] DichotomyReport dichotomyReport(const SystemDescriptor& system, const ProbeConfig& config,
                                              SensitivityMode mode = SensitivityMode::strongMean);

}  // namespace orbitmetrics::classify
