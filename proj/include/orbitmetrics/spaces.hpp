#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "orbitmetrics/rational.hpp"

namespace orbitmetrics::spaces {

// --- symbol streams ---------------------------------------------------------

struct PeriodicTail {
    std::vector<std::uint8_t> word;  // repeats forever after the head
};
struct RandomTail {
    std::uint64_t seed;  // counter-based draws, random access
};
struct SturmianTail {
    Rational angle;  // symbol i is 1 iff frac(start + i*angle) lands in [1-angle, 1)
    Rational start;
};
using TailRule = std::variant<PeriodicTail, RandomTail, SturmianTail>;

/// One-sided infinite symbol sequence with an explicit head and a deterministic
/// tail rule. Shifting is O(1): streams share their body and carry an offset.
class SymbolStream {
  public:
    SymbolStream(std::vector<std::uint8_t> head, TailRule tail, int alphabet);

    [[nodiscard]] int alphabet() const { return body_->alphabet; }
    [[nodiscard]] std::uint8_t at(std::uint64_t i) const;
    [[nodiscard]] SymbolStream shifted(std::uint64_t k) const;
    [[nodiscard]] std::uint64_t offset() const { return offset_; }
    [[nodiscard]] const std::vector<std::uint8_t>& head() const { return body_->head; }
    [[nodiscard]] const TailRule& tail() const { return body_->tail; }
    /// Same body and offset: the streams are the same point by construction.
    [[nodiscard]] bool sameRepresentation(const SymbolStream& other) const {
        return body_ == other.body_ && offset_ == other.offset_;
    }
    /// Value of sum_{i<depth} at(i) * 2^-(i+1); binary streams only.
    [[nodiscard]] Rational prefixValue(unsigned depth) const;

  private:
    struct Body {
        std::vector<std::uint8_t> head;
        TailRule tail;
        int alphabet;
    };
    std::shared_ptr<const Body> body_;
    std::uint64_t offset_ = 0;
};

// --- points ------------------------------------------------------------------

struct CirclePoint {
    // Either an exact coordinate in [0,1) or a binary expansion stream.
    std::variant<Rational, SymbolStream> rep;
};
struct IntervalPoint {
    Rational coord;  // in [0,1]
};
struct SymbolPoint {
    SymbolStream stream;
};
struct ProductPoint;
using StatePoint = std::variant<CirclePoint, IntervalPoint, SymbolPoint, ProductPoint>;
struct ProductPoint {
    std::shared_ptr<const StatePoint> left;
    std::shared_ptr<const StatePoint> right;
};

[[nodiscard]] StatePoint makeProductPoint(StatePoint left, StatePoint right);
[[nodiscard]] StatePoint makeCirclePoint(Rational coord);          // reduced mod 1
[[nodiscard]] StatePoint makeCircleStreamPoint(SymbolStream bits); // alphabet 2
[[nodiscard]] StatePoint makeIntervalPoint(Rational coord);
[[nodiscard]] StatePoint makeSymbolPoint(SymbolStream stream);

// --- spaces -------------------------------------------------------------------

struct CircleSpace {
    unsigned streamDepth = 64;  // truncation depth for stream-backed coordinates
};
struct IntervalSpace {};
struct SymbolicSpace {
    int alphabet = 2;
    unsigned truncationDepth = 64;
};
struct ProductSpace;
using SpaceDescriptor = std::variant<CircleSpace, IntervalSpace, SymbolicSpace, ProductSpace>;
struct ProductSpace {
    std::shared_ptr<const SpaceDescriptor> left;
    std::shared_ptr<const SpaceDescriptor> right;
};

[[nodiscard]] SpaceDescriptor makeProductSpace(SpaceDescriptor left, SpaceDescriptor right);

[[nodiscard]] bool sameSpace(const SpaceDescriptor&, const SpaceDescriptor&);

/// The canonical marked point: coordinate 0, or the all-zeros stream.
[[nodiscard]] StatePoint originPoint(const SpaceDescriptor&);

/// Exact diameter of the metric actually computed (truncated for symbolic).
[[nodiscard]] Rational diameter(const SpaceDescriptor&);
/// Declared bound on metric-evaluation error from truncation (0 when exact).
[[nodiscard]] Rational truncationBound(const SpaceDescriptor&);
[[nodiscard]] bool contains(const SpaceDescriptor&, const StatePoint&);

/// Distance between two points; value is exact on truncated representatives,
/// error bounds the gap to the untruncated metric.
[[nodiscard]] BoundedValue distance(const SpaceDescriptor&, const StatePoint&, const StatePoint&);

/// Rational representative of a circle/interval coordinate (streams truncated
/// at the circle's streamDepth), with its truncation error.
[[nodiscard]] BoundedValue unitValue(const SpaceDescriptor&, const StatePoint&);

// --- sampling -----------------------------------------------------------------

struct Uniform {};  // circle/interval: denominator 2^64; symbolic: random stream
struct Dyadic {
    unsigned depth;
};
struct RationalGrid {
    long modulus;
};
struct PeriodicTailStrategy {
    unsigned period;
};
struct Stream {};  // random-bit symbolic backing (circle and symbolic spaces)
using SampleStrategy = std::variant<Uniform, Dyadic, RationalGrid, PeriodicTailStrategy, Stream>;

[[nodiscard]] StatePoint samplePoint(const SpaceDescriptor&, const SampleStrategy&, std::uint64_t seed);
/// Point within the closed ball B(center, radius); the bound holds for the
/// untruncated metric, not just the representatives.
[[nodiscard]] StatePoint sampleInBall(const SpaceDescriptor&, const StatePoint& center,
                                      const Rational& radius, const SampleStrategy&, std::uint64_t seed);

/// First `count` binary digits of a rational in [0,1).
[[nodiscard]] std::vector<std::uint8_t> binaryDigitsOf(const Rational& value, unsigned count);

}  // namespace orbitmetrics::spaces
