#include "orbitmetrics/systems.hpp"

#include <stdexcept>
#include <utility>

namespace orbitmetrics::systems {

using namespace spaces;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void requireAngle(const Rational& angle) {
    if (angle <= 0 || angle >= 1) fail("system: angle must lie in (0,1)");
}

}  // namespace

SystemDescriptor makeRotation(Rational angle) {
    requireAngle(angle);
    return {Rotation{std::move(angle)}, CircleSpace{}};
}

SystemDescriptor makeDoubling(unsigned streamDepth) {
    return {Doubling{}, CircleSpace{streamDepth}};
}

SystemDescriptor makeTent() { return {Tent{}, IntervalSpace{}}; }

SystemDescriptor makeFullShift(int alphabet, unsigned truncationDepth) {
    if (alphabet < 2) fail("full shift: alphabet must have at least 2 symbols");
    return {FullShift{}, SymbolicSpace{alphabet, truncationDepth}};
}

SystemDescriptor makeSturmian(Rational angle, unsigned truncationDepth) {
    requireAngle(angle);
    return {Sturmian{std::move(angle)}, SymbolicSpace{2, truncationDepth}};
}

SystemDescriptor makeProductSystem(SystemDescriptor left, SystemDescriptor right) {
    SpaceDescriptor space = makeProductSpace(left.space, right.space);
    return {ProductMap{std::make_shared<const SystemDescriptor>(std::move(left)),
                       std::make_shared<const SystemDescriptor>(std::move(right))},
            std::move(space)};
}

Rational goldenConvergentAngle() {
    // Consecutive Fibonacci numbers; the ratio is a continued-fraction
    // convergent of 1/phi = 0.618033988..., denominator ~1.1e18.
    return rationalFromParts("679891637638612258", "1100087778366101931");
}

Rational exactStreamValue(const SymbolStream& stream) {
    if (stream.alphabet() != 2) fail("exactStreamValue: binary streams only");
    const auto* periodic = std::get_if<PeriodicTail>(&stream.tail());
    if (!periodic) fail("exactStreamValue: stream has no finite rational form");
    const std::size_t headLen = stream.head().size();
    const std::size_t effHead = headLen > stream.offset() ? headLen - stream.offset() : 0;
    const std::size_t period = periodic->word.size();

    Rational headValue(0);
    for (std::size_t i = 0; i < effHead; ++i) {
        if (stream.at(i)) headValue += pow2Inv(static_cast<unsigned>(i + 1));
    }
    Integer wordNum = 0;
    for (std::size_t i = 0; i < period; ++i) {
        wordNum <<= 1;
        wordNum += stream.at(effHead + i);
    }
    Integer wordDen = 1;
    mpz_mul_2exp(wordDen.get_mpz_t(), wordDen.get_mpz_t(), period);
    wordDen -= 1;  // 0.www... = w / (2^p - 1)
    Rational tailValue(wordNum, wordDen);
    tailValue.canonicalize();
    Rational value = headValue + pow2Inv(static_cast<unsigned>(effHead)) * tailValue;
    value.canonicalize();
    return value;
}

StatePoint step(const SystemDescriptor& system, const StatePoint& p) {
    if (!contains(system.space, p)) fail("step: point outside the system's space");

    if (const auto* rot = std::get_if<Rotation>(&system.kind)) {
        const auto& rep = std::get<CirclePoint>(p).rep;
        if (const auto* c = std::get_if<Rational>(&rep)) return makeCirclePoint(*c + rot->angle);
        return makeCirclePoint(exactStreamValue(std::get<SymbolStream>(rep)) + rot->angle);
    }
    if (std::get_if<Doubling>(&system.kind)) {
        const auto& rep = std::get<CirclePoint>(p).rep;
        if (const auto* c = std::get_if<Rational>(&rep)) return makeCirclePoint(*c * 2);
        return makeCircleStreamPoint(std::get<SymbolStream>(rep).shifted(1));
    }
    if (std::get_if<Tent>(&system.kind)) {
        const auto& c = std::get<IntervalPoint>(p).coord;
        return makeIntervalPoint(2 * c <= 1 ? Rational(2 * c) : Rational(2 - 2 * c));
    }
    if (std::get_if<FullShift>(&system.kind) || std::get_if<Sturmian>(&system.kind)) {
        return makeSymbolPoint(std::get<SymbolPoint>(p).stream.shifted(1));
    }
    const auto& prod = std::get<ProductMap>(system.kind);
    const auto& pp = std::get<ProductPoint>(p);
    return makeProductPoint(step(*prod.left, *pp.left), step(*prod.right, *pp.right));
}

OrbitSegment orbitSegment(const SystemDescriptor& system, const StatePoint& x, std::size_t n) {
    if (n == 0) fail("orbitSegment: length must be at least 1");
    OrbitSegment seg{system, x, {}};
    seg.states.reserve(n);
    StatePoint current = x;
    for (std::size_t k = 0; k < n; ++k) {
        current = step(system, current);
        seg.states.push_back(current);
    }
    return seg;
}

std::vector<std::uint8_t> sturmianCode(const Rational& angle, const Rational& x, std::size_t n) {
    requireAngle(angle);
    std::vector<std::uint8_t> word(n);
    Rational pos = fracPart(x);
    const Rational cut = 1 - angle;
    for (std::size_t k = 0; k < n; ++k) {
        word[k] = pos >= cut ? 1 : 0;
        pos += angle;
        if (pos >= 1) pos -= 1;
    }
    return word;
}

SymbolStream sturmianStream(const Rational& angle, const Rational& start) {
    requireAngle(angle);
    return SymbolStream({}, SturmianTail{angle, fracPart(start)}, 2);
}

}  // namespace orbitmetrics::systems
