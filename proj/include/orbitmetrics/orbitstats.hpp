#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "orbitmetrics/matching.hpp"
#include "orbitmetrics/systems.hpp"

namespace orbitmetrics::orbitstats {

using spaces::SpaceDescriptor;
using spaces::StatePoint;
using systems::OrbitSegment;
using systems::SystemDescriptor;

// --- observables -------------------------------------------------------------

/// Point functional with range inside [0,1]; evaluations may carry truncation
/// error. A declared Lipschitz bound licenses the contraction inequality
/// (observable statistic <= bound * weakMean).
struct Observable {
    std::string name;
    std::function<BoundedValue(const StatePoint&)> eval;
    std::optional<Rational> lipschitzBound;
};

/// Interval position, or geodesic distance from the marked point 0 on the
/// circle (the 1-Lipschitz coordinate substitute there). L = 1.
[[nodiscard]] Observable coordinateObservable(const SpaceDescriptor& space);
/// min(1, d(., anchor)); L = 1 on every space.
[[nodiscard]] Observable distanceObservable(const SpaceDescriptor& space, StatePoint anchor,
                                            const std::string& name = "distanceTo");
/// min(1, q * d(., anchor)): a q-Lipschitz indicator surrogate.
[[nodiscard]] Observable smoothedIndicatorObservable(const SpaceDescriptor& space, StatePoint anchor,
                                                     Rational q, const std::string& name = "indicator");
/// The default registry for a space: coordinate (where defined), distance to a
/// sampled anchor, smoothed indicator around the same anchor.
[[nodiscard]] std::vector<Observable> observableRegistry(const SpaceDescriptor& space);

// --- per-n statistics ----------------------------------------------------------

struct WeakMeanStat {};                 // inf over pairings of the mean matched distance
struct BesicovitchStat {};              // mean distance under the identity pairing
struct SupPermStat {};                  // sup over pairings of the mean matched distance
struct ExceedanceStat {                 // inf over pairings of #(matched distance > eps) / n
    Rational epsilon;
};
struct BesicovitchExceedanceStat {      // #(identity-paired distance > eps) / n
    Rational epsilon;
};
struct ObservableStat {                 // inf over pairings of mean |f x_i - f y_j|
    Observable f;
};
struct ObservableExceedanceStat {       // inf over pairings of #(|f x_i - f y_j| > delta) / n
    Observable f;
    Rational delta;
};
using SegmentStatKind = std::variant<WeakMeanStat, BesicovitchStat, SupPermStat, ExceedanceStat,
                                     BesicovitchExceedanceStat, ObservableStat, ObservableExceedanceStat>;

[[nodiscard]] std::string statKindName(const SegmentStatKind& kind);

/// Exact statistic on the truncated representatives; the error field bounds
/// the distance to the untruncated statistic. Circle and interval segments
/// use the sorted fast paths; observable kinds always reduce to line costs.
[[nodiscard]] BoundedValue segmentStat(const SegmentStatKind& kind, const OrbitSegment& segX,
                                       const OrbitSegment& segY);

/// First n states of a longer segment.
[[nodiscard]] OrbitSegment segmentPrefix(const OrbitSegment& seg, std::size_t n);

// --- the count/cost sandwich for observables --------------------------------------

struct SandwichReport {
    Rational exceedCount;    // Delta: inf over pairings of #(|f-f| > delta)
    Rational matchedSum;     // inf over pairings of the summed |f-f| costs
    Rational delta;
    std::size_t n = 0;
    bool lowerOk = false;    // delta * Delta <= matchedSum
    bool upperOk = false;    // matchedSum <= Delta + delta * (n - Delta)
};

/// Evaluates both inequalities exactly on the representative costs; a
/// violation indicates a solver bug and throws logic_error.
[[nodiscard]] SandwichReport statSandwichCheck(const OrbitSegment& segX, const OrbitSegment& segY,
                                               const Observable& f, const Rational& delta);

// --- limit estimation -------------------------------------------------------------

struct LimitEstimate {
    std::vector<std::size_t> schedule;
    std::vector<BoundedValue> samples;  // aligned with schedule
    BoundedValue limsupEstimate;        // max over the tail window
    BoundedValue liminfEstimate;        // min over the tail window
    unsigned tailWindow = 3;
    Rational tolerance;
    bool converged = false;  // tail oscillation (error-inflated) within tolerance
};

/// Evaluates statFn on the schedule and reads limsup/liminf surrogates off the
/// tail window. A schedule shorter than the window yields converged = false.
[[nodiscard]] LimitEstimate estimateLimit(const std::function<BoundedValue(std::size_t)>& statFn,
                                          const std::vector<std::size_t>& schedule, unsigned tailWindow,
                                          const Rational& tolerance);

[[nodiscard]] std::vector<std::size_t> defaultSchedule(const SpaceDescriptor& space);
[[nodiscard]] Rational defaultTolerance();  // 1/100
inline constexpr unsigned kDefaultTailWindow = 3;

// --- pair relations -----------------------------------------------------------------

struct RelationReport {
    LimitEstimate weakMeanEstimate;
    LimitEstimate supPermEstimate;
    bool weakMeanAsymptotic = false;   // limsup weakMean <= tolerance, certified
    bool weakMeanProximal = false;     // liminf weakMean <= tolerance, certified
    bool strongMeanProximal = false;   // liminf supPerm <= tolerance, certified
};

[[nodiscard]] RelationReport pairRelation(const SystemDescriptor& system, const StatePoint& x,
                                          const StatePoint& y, const std::vector<std::size_t>& schedule,
                                          unsigned tailWindow, const Rational& tolerance);

// --- integer-set densities -------------------------------------------------------------

struct IntegerSetView {
    std::function<bool(std::size_t)> member;  // membership on [0, horizon)
    std::size_t horizon = 0;
};

[[nodiscard]] IntegerSetView explicitSet(std::vector<std::size_t> indices, std::size_t horizon);

/// Samples #(F intersect [0,n)) / n over the schedule. The upper/lower density
/// surrogates are the limsup/liminf fields of the shared estimate.
[[nodiscard]] LimitEstimate densityEstimate(const IntegerSetView& view,
                                            const std::vector<std::size_t>& schedule, unsigned tailWindow,
                                            const Rational& tolerance);
[[nodiscard]] BoundedValue upperDensity(const LimitEstimate& densities);
[[nodiscard]] BoundedValue lowerDensity(const LimitEstimate& densities);

}  // namespace orbitmetrics::orbitstats
