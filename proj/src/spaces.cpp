#include "orbitmetrics/spaces.hpp"

#include <algorithm>
#include <stdexcept>

namespace orbitmetrics::spaces {

namespace {

constexpr unsigned kMaxPrefix = 4096;  // sanity cap on ball-prefix lengths

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

/// Smallest m >= 0 with 2^-m <= r; r must be positive.
unsigned ceilLog2Inv(const Rational& r) {
    if (r <= 0) fail("ball radius must be positive");
    unsigned m = 0;
    Rational p(1);
    while (p > r) {
        p /= 2;
        if (++m > kMaxPrefix) fail("ball radius too small");
    }
    return m;
}

std::vector<std::uint8_t> seedWord(std::uint64_t seed, unsigned length, int alphabet) {
    if (length == 0 || length > 64) fail("periodicTail period must be in 1..64");
    std::vector<std::uint8_t> word(length);
    std::uint64_t acc = seed;
    for (unsigned i = 0; i < length; ++i) {
        word[i] = static_cast<std::uint8_t>(acc % static_cast<unsigned>(alphabet));
        acc /= static_cast<unsigned>(alphabet);
    }
    return word;
}

Rational uint64Unit(std::uint64_t k) {  // k / 2^64 in [0,1)
    Integer num;
    mpz_import(num.get_mpz_t(), 1, 1, sizeof(k), 0, 0, &k);
    Integer den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), 64);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::vector<std::uint8_t> streamPrefix(const SymbolStream& s, unsigned count) {
    std::vector<std::uint8_t> out(count);
    for (unsigned i = 0; i < count; ++i) out[i] = s.at(i);
    return out;
}

}  // namespace

// --- SymbolStream ------------------------------------------------------------

SymbolStream::SymbolStream(std::vector<std::uint8_t> head, TailRule tail, int alphabet) {
    if (alphabet < 2) fail("symbol stream: alphabet must have at least 2 symbols");
    for (const auto s : head) {
        if (s >= alphabet) fail("symbol stream: head symbol outside alphabet");
    }
    if (const auto* p = std::get_if<PeriodicTail>(&tail)) {
        if (p->word.empty()) fail("symbol stream: periodic tail needs a nonempty word");
        for (const auto s : p->word) {
            if (s >= alphabet) fail("symbol stream: tail symbol outside alphabet");
        }
    }
    if (const auto* st = std::get_if<SturmianTail>(&tail)) {
        if (alphabet != 2) fail("symbol stream: sturmian tail is binary");
        if (st->angle <= 0 || st->angle >= 1) fail("symbol stream: sturmian angle must lie in (0,1)");
    }
    body_ = std::make_shared<const Body>(Body{std::move(head), std::move(tail), alphabet});
}

std::uint8_t SymbolStream::at(std::uint64_t i) const {
    const std::uint64_t idx = offset_ + i;
    const auto& head = body_->head;
    if (idx < head.size()) return head[idx];
    const std::uint64_t tailIdx = idx - head.size();
    if (const auto* p = std::get_if<PeriodicTail>(&body_->tail)) {
        return p->word[tailIdx % p->word.size()];
    }
    if (const auto* r = std::get_if<RandomTail>(&body_->tail)) {
        return static_cast<std::uint8_t>(drawAt(r->seed, idx) % static_cast<unsigned>(body_->alphabet));
    }
    const auto& st = std::get<SturmianTail>(body_->tail);
    Rational pos = fracPart(st.start + Rational(Integer(idx)) * st.angle);
    return pos >= 1 - st.angle ? 1 : 0;
}

SymbolStream SymbolStream::shifted(std::uint64_t k) const {
    SymbolStream s = *this;
    s.offset_ += k;
    return s;
}

Rational SymbolStream::prefixValue(unsigned depth) const {
    if (alphabet() != 2) fail("prefixValue: binary streams only");
    Integer num = 0;
    for (unsigned i = 0; i < depth; ++i) {
        num <<= 1;
        num += at(i);
    }
    Integer den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), depth);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// --- point constructors --------------------------------------------------------

StatePoint makeProductPoint(StatePoint left, StatePoint right) {
    return ProductPoint{std::make_shared<const StatePoint>(std::move(left)),
                        std::make_shared<const StatePoint>(std::move(right))};
}

StatePoint makeCirclePoint(Rational coord) {
    return CirclePoint{fracPart(std::move(coord))};
}

StatePoint makeCircleStreamPoint(SymbolStream bits) {
    if (bits.alphabet() != 2) fail("circle stream point: binary expansion required");
    return CirclePoint{std::move(bits)};
}

StatePoint makeIntervalPoint(Rational coord) {
    if (coord < 0 || coord > 1) fail("interval point: coordinate outside [0,1]");
    return IntervalPoint{std::move(coord)};
}

StatePoint makeSymbolPoint(SymbolStream stream) { return SymbolPoint{std::move(stream)}; }

// --- space descriptors ----------------------------------------------------------

SpaceDescriptor makeProductSpace(SpaceDescriptor left, SpaceDescriptor right) {
    return ProductSpace{std::make_shared<const SpaceDescriptor>(std::move(left)),
                        std::make_shared<const SpaceDescriptor>(std::move(right))};
}

StatePoint originPoint(const SpaceDescriptor& space) {
    if (std::get_if<CircleSpace>(&space)) return makeCirclePoint(Rational(0));
    if (std::get_if<IntervalSpace>(&space)) return makeIntervalPoint(Rational(0));
    if (const auto* s = std::get_if<SymbolicSpace>(&space)) {
        return makeSymbolPoint(SymbolStream({}, PeriodicTail{{0}}, s->alphabet));
    }
    const auto& s = std::get<ProductSpace>(space);
    return makeProductPoint(originPoint(*s.left), originPoint(*s.right));
}

bool sameSpace(const SpaceDescriptor& a, const SpaceDescriptor& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ca = std::get_if<CircleSpace>(&a)) {
        return ca->streamDepth == std::get<CircleSpace>(b).streamDepth;
    }
    if (std::get_if<IntervalSpace>(&a)) return true;
    if (const auto* sa = std::get_if<SymbolicSpace>(&a)) {
        const auto& sb = std::get<SymbolicSpace>(b);
        return sa->alphabet == sb.alphabet && sa->truncationDepth == sb.truncationDepth;
    }
    const auto& pa = std::get<ProductSpace>(a);
    const auto& pb = std::get<ProductSpace>(b);
    return sameSpace(*pa.left, *pb.left) && sameSpace(*pa.right, *pb.right);
}

Rational diameter(const SpaceDescriptor& space) {
    return std::visit(
        [](const auto& s) -> Rational {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CircleSpace>) {
                return Rational(1, 2);
            } else if constexpr (std::is_same_v<T, IntervalSpace>) {
                return Rational(1);
            } else if constexpr (std::is_same_v<T, SymbolicSpace>) {
                return 1 - pow2Inv(s.truncationDepth);
            } else {
                return diameter(*s.left) + diameter(*s.right);
            }
        },
        space);
}

Rational truncationBound(const SpaceDescriptor& space) {
    return std::visit(
        [](const auto& s) -> Rational {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CircleSpace>) {
                return Rational(0);  // stream-backed points report their own error
            } else if constexpr (std::is_same_v<T, IntervalSpace>) {
                return Rational(0);
            } else if constexpr (std::is_same_v<T, SymbolicSpace>) {
                return pow2Inv(s.truncationDepth);
            } else {
                return truncationBound(*s.left) + truncationBound(*s.right);
            }
        },
        space);
}

bool contains(const SpaceDescriptor& space, const StatePoint& point) {
    if (std::get_if<CircleSpace>(&space)) {
        const auto* p = std::get_if<CirclePoint>(&point);
        if (!p) return false;
        if (const auto* c = std::get_if<Rational>(&p->rep)) return *c >= 0 && *c < 1;
        return std::get<SymbolStream>(p->rep).alphabet() == 2;
    }
    if (std::get_if<IntervalSpace>(&space)) {
        const auto* p = std::get_if<IntervalPoint>(&point);
        return p && p->coord >= 0 && p->coord <= 1;
    }
    if (const auto* s = std::get_if<SymbolicSpace>(&space)) {
        const auto* p = std::get_if<SymbolPoint>(&point);
        return p && p->stream.alphabet() == s->alphabet;
    }
    const auto& s = std::get<ProductSpace>(space);
    const auto* p = std::get_if<ProductPoint>(&point);
    return p && contains(*s.left, *p->left) && contains(*s.right, *p->right);
}

BoundedValue unitValue(const SpaceDescriptor& space, const StatePoint& point) {
    if (const auto* s = std::get_if<CircleSpace>(&space)) {
        const auto* p = std::get_if<CirclePoint>(&point);
        if (!p) fail("unitValue: point is not a circle point");
        if (const auto* c = std::get_if<Rational>(&p->rep)) return BoundedValue(*c);
        const auto& bits = std::get<SymbolStream>(p->rep);
        return {bits.prefixValue(s->streamDepth), pow2Inv(s->streamDepth)};
    }
    if (std::get_if<IntervalSpace>(&space)) {
        const auto* p = std::get_if<IntervalPoint>(&point);
        if (!p) fail("unitValue: point is not an interval point");
        return BoundedValue(p->coord);
    }
    fail("unitValue: defined for circle and interval spaces only");
}

BoundedValue distance(const SpaceDescriptor& space, const StatePoint& a, const StatePoint& b) {
    if (!contains(space, a) || !contains(space, b)) fail("distance: point outside the space");
    if (std::get_if<CircleSpace>(&space)) {
        const auto& pa = std::get<CirclePoint>(a);
        const auto& pb = std::get<CirclePoint>(b);
        const auto* sa = std::get_if<SymbolStream>(&pa.rep);
        const auto* sb = std::get_if<SymbolStream>(&pb.rep);
        if (sa && sb && sa->sameRepresentation(*sb)) return BoundedValue(Rational(0));
        const BoundedValue va = unitValue(space, a);
        const BoundedValue vb = unitValue(space, b);
        return {circleDistance(va.value, vb.value), va.error + vb.error};
    }
    if (std::get_if<IntervalSpace>(&space)) {
        const auto& x = std::get<IntervalPoint>(a).coord;
        const auto& y = std::get<IntervalPoint>(b).coord;
        return BoundedValue(x < y ? y - x : x - y);
    }
    if (const auto* s = std::get_if<SymbolicSpace>(&space)) {
        const auto& sa = std::get<SymbolPoint>(a).stream;
        const auto& sb = std::get<SymbolPoint>(b).stream;
        if (sa.sameRepresentation(sb)) return BoundedValue(Rational(0));
        Integer num = 0;
        for (unsigned i = 0; i < s->truncationDepth; ++i) {
            num <<= 1;
            if (sa.at(i) != sb.at(i)) num += 1;
        }
        Integer den = 1;
        mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), s->truncationDepth);
        Rational d(num, den);
        d.canonicalize();
        return {std::move(d), pow2Inv(s->truncationDepth)};
    }
    const auto& s = std::get<ProductSpace>(space);
    const auto& pa = std::get<ProductPoint>(a);
    const auto& pb = std::get<ProductPoint>(b);
    return distance(*s.left, *pa.left, *pb.left) + distance(*s.right, *pa.right, *pb.right);
}

// --- sampling -------------------------------------------------------------------

namespace {

Rational dyadicFloor(const Rational& value, unsigned depth) {
    Integer scaled;
    Rational shifted = value;
    Integer den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), depth);
    shifted *= Rational(den);
    mpz_fdiv_q(scaled.get_mpz_t(), shifted.get_num().get_mpz_t(), shifted.get_den().get_mpz_t());
    Rational r(scaled, den);
    r.canonicalize();
    return r;
}

StatePoint sampleUnit(const SpaceDescriptor& space, bool circle, const SampleStrategy& strategy,
                      std::uint64_t seed) {
    auto wrap = [&](Rational v) {
        return circle ? makeCirclePoint(std::move(v)) : makeIntervalPoint(std::move(v));
    };
    if (std::get_if<Uniform>(&strategy)) {
        return wrap(uint64Unit(drawAt(seed, 7)));
    }
    if (const auto* d = std::get_if<Dyadic>(&strategy)) {
        if (d->depth == 0 || d->depth > 62) fail("dyadic strategy: depth must be in 1..62");
        const std::uint64_t cells = 1ULL << d->depth;
        Rational r(static_cast<unsigned long>(seed % cells), static_cast<unsigned long>(cells));
        r.canonicalize();
        return wrap(std::move(r));
    }
    if (const auto* g = std::get_if<RationalGrid>(&strategy)) {
        if (g->modulus <= 0) fail("rationalGrid strategy: modulus must be positive");
        Rational r(static_cast<unsigned long>(seed % static_cast<std::uint64_t>(g->modulus)),
                   static_cast<unsigned long>(g->modulus));
        r.canonicalize();
        return wrap(std::move(r));
    }
    if (const auto* p = std::get_if<PeriodicTailStrategy>(&strategy)) {
        if (!circle) fail("periodicTail strategy: interval points are exact rationals");
        return makeCircleStreamPoint(SymbolStream({}, PeriodicTail{seedWord(seed, p->period, 2)}, 2));
    }
    if (!circle) fail("stream strategy: interval points are exact rationals");
    return makeCircleStreamPoint(SymbolStream({}, RandomTail{deriveSeed(seed, 0xC1)}, 2));
}

StatePoint sampleSymbolic(const SymbolicSpace& space, const SampleStrategy& strategy, std::uint64_t seed) {
    const int k = space.alphabet;
    if (std::get_if<Uniform>(&strategy) || std::get_if<Stream>(&strategy)) {
        return makeSymbolPoint(SymbolStream({}, RandomTail{deriveSeed(seed, 0xC2)}, k));
    }
    if (const auto* d = std::get_if<Dyadic>(&strategy)) {
        // Finitely many nonzero symbols: seed digits, then the zero tail.
        return makeSymbolPoint(SymbolStream(seedWord(seed, d->depth, k),
                                            PeriodicTail{{0}}, k));
    }
    if (const auto* p = std::get_if<PeriodicTailStrategy>(&strategy)) {
        return makeSymbolPoint(SymbolStream({}, PeriodicTail{seedWord(seed, p->period, k)}, k));
    }
    fail("rationalGrid strategy: not defined for symbolic spaces");
}

SymbolStream tailAfterPrefix(std::vector<std::uint8_t> prefix, int alphabet, const SampleStrategy& strategy,
                             std::uint64_t seed) {
    if (std::get_if<Uniform>(&strategy) || std::get_if<Stream>(&strategy)) {
        return SymbolStream(std::move(prefix), RandomTail{deriveSeed(seed, 0xC3)}, alphabet);
    }
    if (std::get_if<Dyadic>(&strategy)) {
        return SymbolStream(std::move(prefix), PeriodicTail{{0}}, alphabet);
    }
    if (const auto* p = std::get_if<PeriodicTailStrategy>(&strategy)) {
        return SymbolStream(std::move(prefix), PeriodicTail{seedWord(seed, p->period, alphabet)}, alphabet);
    }
    fail("rationalGrid strategy: not defined for symbolic ball sampling");
}

}  // namespace

StatePoint samplePoint(const SpaceDescriptor& space, const SampleStrategy& strategy, std::uint64_t seed) {
    if (std::get_if<CircleSpace>(&space)) return sampleUnit(space, true, strategy, seed);
    if (std::get_if<IntervalSpace>(&space)) return sampleUnit(space, false, strategy, seed);
    if (const auto* s = std::get_if<SymbolicSpace>(&space)) return sampleSymbolic(*s, strategy, seed);
    const auto& s = std::get<ProductSpace>(space);
    return makeProductPoint(samplePoint(*s.left, strategy, deriveSeed(seed, 0xA1)),
                            samplePoint(*s.right, strategy, deriveSeed(seed, 0xA2)));
}

std::vector<std::uint8_t> binaryDigitsOf(const Rational& value, unsigned count) {
    if (value < 0 || value >= 1) fail("binaryDigitsOf: value must lie in [0,1)");
    std::vector<std::uint8_t> digits(count);
    Rational v = value;
    for (unsigned i = 0; i < count; ++i) {
        v *= 2;
        if (v >= 1) {
            digits[i] = 1;
            v -= 1;
        } else {
            digits[i] = 0;
        }
    }
    return digits;
}

StatePoint sampleInBall(const SpaceDescriptor& space, const StatePoint& center, const Rational& radius,
                        const SampleStrategy& strategy, std::uint64_t seed) {
    if (!contains(space, center)) fail("sampleInBall: center outside the space");
    if (radius <= 0) fail("sampleInBall: radius must be positive");

    if (std::get_if<CircleSpace>(&space) || std::get_if<IntervalSpace>(&space)) {
        const bool circle = std::holds_alternative<CircleSpace>(space);
        const auto* streamRep =
            circle ? std::get_if<SymbolStream>(&std::get<CirclePoint>(center).rep) : nullptr;

        if (streamRep || std::get_if<PeriodicTailStrategy>(&strategy) || std::get_if<Stream>(&strategy)) {
            if (!circle) fail("sampleInBall: interval points are exact rationals");
            // Share a prefix of the center's binary expansion; agreement to depth m
            // pins the true distance below 2^-m <= radius.
            const unsigned m = ceilLog2Inv(radius) + static_cast<unsigned>(drawAt(seed, 11) % 4);
            std::vector<std::uint8_t> prefix =
                streamRep ? streamPrefix(*streamRep, m)
                          : binaryDigitsOf(std::get<Rational>(std::get<CirclePoint>(center).rep), m);
            return makeCircleStreamPoint(tailAfterPrefix(std::move(prefix), 2, strategy, seed));
        }

        const Rational c = circle ? std::get<Rational>(std::get<CirclePoint>(center).rep)
                                  : std::get<IntervalPoint>(center).coord;
        if (std::get_if<Uniform>(&strategy)) {
            Rational offset = uint64Unit(drawAt(seed, 13)) * 2 * radius - radius;
            Rational v = c + offset;
            if (circle) return makeCirclePoint(std::move(v));
            if (v < 0) v = 0;
            if (v > 1) v = 1;
            return makeIntervalPoint(std::move(v));
        }
        if (const auto* d = std::get_if<Dyadic>(&strategy)) {
            const unsigned m =
                std::max(d->depth, ceilLog2Inv(radius)) + static_cast<unsigned>(drawAt(seed, 17) % 4);
            Rational v = dyadicFloor(c, m);
            return circle ? makeCirclePoint(std::move(v)) : makeIntervalPoint(std::move(v));
        }
        const auto& g = std::get<RationalGrid>(strategy);
        if (g.modulus <= 0) fail("rationalGrid strategy: modulus must be positive");
        Rational halfCell(1, 2 * g.modulus);
        halfCell.canonicalize();
        if (halfCell > radius) fail("rationalGrid strategy: grid too coarse for the requested ball");
        Rational v = c * g.modulus + Rational(1, 2);
        Integer idx;
        mpz_fdiv_q(idx.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
        Rational snapped(idx, Integer(g.modulus));
        snapped.canonicalize();
        if (circle) return makeCirclePoint(std::move(snapped));
        if (snapped < 0) snapped = 0;
        if (snapped > 1) snapped = 1;
        return makeIntervalPoint(std::move(snapped));
    }

    if (const auto* s = std::get_if<SymbolicSpace>(&space)) {
        const auto& streamCenter = std::get<SymbolPoint>(center).stream;
        const unsigned m = ceilLog2Inv(radius) + static_cast<unsigned>(drawAt(seed, 19) % 4);
        return makeSymbolPoint(
            tailAfterPrefix(streamPrefix(streamCenter, m), s->alphabet, strategy, seed));
    }

    const auto& s = std::get<ProductSpace>(space);
    const auto& p = std::get<ProductPoint>(center);
    Rational half = radius / 2;
    half.canonicalize();
    return makeProductPoint(sampleInBall(*s.left, *p.left, half, strategy, deriveSeed(seed, 0xB1)),
                            sampleInBall(*s.right, *p.right, half, strategy, deriveSeed(seed, 0xB2)));
}

}  // namespace orbitmetrics::spaces
