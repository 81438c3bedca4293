#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "orbitmetrics/spaces.hpp"

namespace orbitmetrics::systems {

using spaces::SpaceDescriptor;
using spaces::StatePoint;
using spaces::SymbolStream;

struct SystemDescriptor;

struct Rotation {
    Rational angle;  // in (0,1)
};
struct Doubling {};
struct Tent {};
struct FullShift {};
struct Sturmian {
    Rational angle;  // shift acting on the rotation coding with this angle
};
struct ProductMap {
    std::shared_ptr<const SystemDescriptor> left;
    std::shared_ptr<const SystemDescriptor> right;
};
using MapKind = std::variant<Rotation, Doubling, Tent, FullShift, Sturmian, ProductMap>;

struct SystemDescriptor {
    MapKind kind;
    SpaceDescriptor space;
};

[[nodiscard]] SystemDescriptor makeRotation(Rational angle);
[[nodiscard]] SystemDescriptor makeDoubling(unsigned streamDepth = 64);
[[nodiscard]] SystemDescriptor makeTent();
[[nodiscard]] SystemDescriptor makeFullShift(int alphabet = 2, unsigned truncationDepth = 64);
[[nodiscard]] SystemDescriptor makeSturmian(Rational angle, unsigned truncationDepth = 64);
[[nodiscard]] SystemDescriptor makeProductSystem(SystemDescriptor left, SystemDescriptor right);

/// Golden-mean continued-fraction convergent with denominator > 10^18; the
/// default stand-in angle for an irrational rotation at every tested scale.
[[nodiscard]] Rational goldenConvergentAngle();

/// Exact value of a circle point backed by an eventually periodic binary
/// stream. Throws for stream rules with no finite rational form.
[[nodiscard]] Rational exactStreamValue(const SymbolStream& stream);

/// One application of the system map. Rotation accepts stream-backed circle
/// points only when the stream is eventually periodic (exact conversion).
[[nodiscard]] StatePoint step(const SystemDescriptor& system, const StatePoint& p);

/// States T^1 x .. T^n x; the base point itself is excluded.
struct OrbitSegment {
    SystemDescriptor system;
    StatePoint base;
    std::vector<StatePoint> states;  // states[k-1] = T^k base

    [[nodiscard]] std::size_t length() const { return states.size(); }
};

[[nodiscard]] OrbitSegment orbitSegment(const SystemDescriptor& system, const StatePoint& x, std::size_t n);

/// Binary coding of the rotation orbit of x: symbol k (k = 0..n-1) is 1 iff
/// frac(x + k*angle) lies in the left-closed cell [1-angle, 1).
[[nodiscard]] std::vector<std::uint8_t> sturmianCode(const Rational& angle, const Rational& x,
                                                     std::size_t n);

/// Stream form of the same coding (infinite, O(1) shift).
[[nodiscard]] SymbolStream sturmianStream(const Rational& angle, const Rational& start);

}  // namespace orbitmetrics::systems
