#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbitmetrics {

using Rational = mpq_class;
using Integer = mpz_class;

[[nodiscard]] inline Rational makeRational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

[[nodiscard]] inline Rational rationalFromParts(const std::string& num, const std::string& den) {
    Integer n, d;
    if (n.set_str(num, 10) != 0) throw std::invalid_argument("rational: bad numerator '" + num + "'");
    if (d.set_str(den, 10) != 0) throw std::invalid_argument("rational: bad denominator '" + den + "'");
    if (d == 0) throw std::invalid_argument("rational: zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

[[nodiscard]] inline std::string numeratorString(const Rational& r) { return r.get_num().get_str(); }
[[nodiscard]] inline std::string denominatorString(const Rational& r) { return r.get_den().get_str(); }

/// Human-readable decimal approximation, 6 significant digits by default.
/// The exact value always travels alongside as num/den strings.
[[nodiscard]] inline std::string approxDecimal(const Rational& r, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, r.get_d());
    return std::string(buf);
}

/// x mod 1 into [0, 1).
[[nodiscard]] inline Rational fracPart(const Rational& x) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    Rational r = x - Rational(q);
    r.canonicalize();
    return r;
}

/// 2^-k as an exact rational.
[[nodiscard]] inline Rational pow2Inv(unsigned k) {
    Integer d = 1;
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), k);
    return Rational(Integer(1), d);
}

[[nodiscard]] inline Rational integerPow(unsigned base, unsigned k) {
    Integer v;
    mpz_ui_pow_ui(v.get_mpz_t(), base, k);
    return Rational(v);
}

/// Exact value with a one-sided uncertainty radius. error == 0 means exact.
/// Truncated symbolic evaluations carry error > 0; all arithmetic on values
/// stays exact and errors propagate by the triangle inequality.
struct BoundedValue {
    Rational value;
    Rational error;

    BoundedValue() : value(0), error(0) {}
    explicit BoundedValue(Rational v) : value(std::move(v)), error(0) {}
    BoundedValue(Rational v, Rational e) : value(std::move(v)), error(std::move(e)) {}

    [[nodiscard]] bool exact() const { return error == 0; }
    /// Soundly certify value <= bound (true even for the untruncated quantity).
    [[nodiscard]] bool certifiesAtMost(const Rational& bound) const { return value + error <= bound; }
    /// Soundly certify value > bound.
    [[nodiscard]] bool certifiesAbove(const Rational& bound) const { return value - error > bound; }
};

[[nodiscard]] inline BoundedValue operator+(const BoundedValue& a, const BoundedValue& b) {
    return {a.value + b.value, a.error + b.error};
}

/// Geodesic distance on the unit circle for coordinates in [0,1).
[[nodiscard]] inline Rational circleDistance(const Rational& a, const Rational& b) {
    Rational diff = a < b ? b - a : a - b;
    Rational wrap = 1 - diff;
    Rational d = diff < wrap ? diff : wrap;
    d.canonicalize();
    return d;
}

// --- deterministic seeding -------------------------------------------------

[[nodiscard]] inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stable child-seed derivation; salts are small fixed tags per call site.
[[nodiscard]] inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

/// Counter-based deterministic stream: draw i from seed, random access.
[[nodiscard]] inline std::uint64_t drawAt(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x51'7C'C1'B7'27'22'0A'95ULL));
}

}  // namespace orbitmetrics
