#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <algorithm>

#include "orbitcert/errors.hpp"

namespace orbitcert {

// ---------------------------------------------------------------------------
// Directed rounding by next-representable-float nudging.
//
// All basic IEEE-754 operations (+,-,*,/,sqrt) are correctly rounded, so the
// true result lies within one ulp of the computed one.  Where an error-free
// transform (TwoSum / FMA residual) proves the computed result exact, no
// nudge is applied; exact endpoint arithmetic like [1,2]+[3,4] = [4,6] stays
// exact.  No FPU rounding-mode switching: portable and thread-safe.
// ---------------------------------------------------------------------------

namespace detail {

inline double next_up(double x) {
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) return x;
    if (x == 0.0) return std::numeric_limits<double>::denorm_min();
    auto bits = std::bit_cast<std::uint64_t>(x);
    bits = (x > 0.0) ? bits + 1 : bits - 1;
    return std::bit_cast<double>(bits);
}

inline double next_down(double x) {
    if (std::isnan(x) || x == -std::numeric_limits<double>::infinity()) return x;
    if (x == 0.0) return -std::numeric_limits<double>::denorm_min();
    auto bits = std::bit_cast<std::uint64_t>(x);
    bits = (x > 0.0) ? bits - 1 : bits + 1;
    return std::bit_cast<double>(bits);
}

// TwoSum (Knuth): err = (a+b) - fl(a+b) exactly, barring overflow.
inline double sum_err(double a, double b, double s) {
    double t = s - a;
    return (a - (s - t)) + (b - t);
}

constexpr double kMinNormal = std::numeric_limits<double>::min();

// Round fl(a+b) to a lower/upper bound of the true sum.
inline double add_down(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) {
        if (s == std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::max();
        return s; // -inf is a valid lower bound; nan propagates
    }
    double e = sum_err(a, b, s);
    return e < 0.0 ? next_down(s) : s;
}
inline double add_up(double a, double b) {
    double s = a + b;
    if (!std::isfinite(s)) {
        if (s == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::max();
        return s;
    }
    double e = sum_err(a, b, s);
    return e > 0.0 ? next_up(s) : s;
}
inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// FMA residual is exact unless the product is subnormal; nudge
// unconditionally in that range.
inline double mul_down(double a, double b) {
    double p = a * b;
    if (!std::isfinite(p)) {
        if (p == std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::max();
        return p;
    }
    if (std::abs(p) < kMinNormal) {
        if (p == 0.0 && (a == 0.0 || b == 0.0)) return 0.0;
        return next_down(p);
    }
    double e = std::fma(a, b, -p);
    return e < 0.0 ? next_down(p) : p;
}
inline double mul_up(double a, double b) {
    double p = a * b;
    if (!std::isfinite(p)) {
        if (p == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::max();
        return p;
    }
    if (std::abs(p) < kMinNormal) {
        if (p == 0.0 && (a == 0.0 || b == 0.0)) return 0.0;
        return next_up(p);
    }
    double e = std::fma(a, b, -p);
    return e > 0.0 ? next_up(p) : p;
}

// true(a/b) - q has the sign of (a - q*b)/b.
inline double div_down(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q)) {
        if (q == std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::max();
        return q;
    }
    if (std::abs(q) < kMinNormal) {
        if (a == 0.0) return 0.0;
        return next_down(q);
    }
    double r = std::fma(q, b, -a); // = q*b - a
    double num = -r;               // a - q*b
    bool truth_above = (num > 0.0) == (b > 0.0) && num != 0.0;
    bool truth_below = (num > 0.0) != (b > 0.0) && num != 0.0;
    (void)truth_above;
    return truth_below ? next_down(q) : q;
}
inline double div_up(double a, double b) {
    double q = a / b;
    if (!std::isfinite(q)) {
        if (q == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::max();
        return q;
    }
    if (std::abs(q) < kMinNormal) {
        if (a == 0.0) return 0.0;
        return next_up(q);
    }
    double r = std::fma(q, b, -a);
    double num = -r;
    bool truth_above = (num > 0.0) == (b > 0.0) && num != 0.0;
    return truth_above ? next_up(q) : q;
}

inline double sqrt_down(double a) {
    double r = std::sqrt(a);
    if (r == 0.0 || !std::isfinite(r)) return r;
    double e = std::fma(r, r, -a); // r^2 - a
    return e > 0.0 ? next_down(r) : r;
}
inline double sqrt_up(double a) {
    double r = std::sqrt(a);
    if (!std::isfinite(r)) return r;
    double e = std::fma(r, r, -a);
    return e < 0.0 ? next_up(r) : r;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Interval: closed real interval [lo, hi] with outward-rounded arithmetic.
// Every operation encloses the exact set image.  Immutable value type.
// ---------------------------------------------------------------------------
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    explicit Interval(double v) : lo(v), hi(v) {
        if (std::isnan(v)) throw DomainError("Interval: NaN endpoint");
    }
    Interval(double l, double h) : lo(l), hi(h) {
        if (std::isnan(l) || std::isnan(h) || l > h)
            throw DomainError("Interval: invalid endpoints");
    }

    static Interval unchecked(double l, double h) {
        Interval r;
        r.lo = l;
        r.hi = h;
        return r;
    }

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
    bool is_point() const { return lo == hi; }

    double mid() const {
        double m = 0.5 * (lo + hi);
        if (!std::isfinite(m)) m = 0.5 * lo + 0.5 * hi;
        if (m < lo) m = lo;
        if (m > hi) m = hi;
        return m;
    }
    double width() const { return detail::sub_up(hi, lo); }
    double rad() const { return 0.5 * width(); }
    // max |x| over the interval
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    // min |x| over the interval (0 if it straddles)
    double mig() const { return contains_zero() ? 0.0 : std::min(std::abs(lo), std::abs(hi)); }

    bool strictly_positive() const { return lo > 0.0; }
    bool strictly_negative() const { return hi < 0.0; }
};

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval::unchecked(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}
inline Interval hull(const Interval& a, double x) {
    return Interval::unchecked(std::min(a.lo, x), std::max(a.hi, x));
}

// Empty intersection is a value (covering code branches on it constantly).
inline bool intersect(const Interval& a, const Interval& b, Interval& out) {
    double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
    if (l > h) return false;
    out = Interval::unchecked(l, h);
    return true;
}

inline Interval operator+(const Interval& a, const Interval& b) {
    return Interval::unchecked(detail::add_down(a.lo, b.lo), detail::add_up(a.hi, b.hi));
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return Interval::unchecked(detail::sub_down(a.lo, b.hi), detail::sub_up(a.hi, b.lo));
}
inline Interval operator-(const Interval& a) { return Interval::unchecked(-a.hi, -a.lo); }

inline Interval operator*(const Interval& a, const Interval& b) {
    using namespace detail;
    double l1 = mul_down(a.lo, b.lo), l2 = mul_down(a.lo, b.hi), l3 = mul_down(a.hi, b.lo),
           l4 = mul_down(a.hi, b.hi);
    double u1 = mul_up(a.lo, b.lo), u2 = mul_up(a.lo, b.hi), u3 = mul_up(a.hi, b.lo),
           u4 = mul_up(a.hi, b.hi);
    return Interval::unchecked(std::min(std::min(l1, l2), std::min(l3, l4)),
                               std::max(std::max(u1, u2), std::max(u3, u4)));
}

inline Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DomainError("interval division by interval containing zero");
    using namespace detail;
    double l1 = div_down(a.lo, b.lo), l2 = div_down(a.lo, b.hi), l3 = div_down(a.hi, b.lo),
           l4 = div_down(a.hi, b.hi);
    double u1 = div_up(a.lo, b.lo), u2 = div_up(a.lo, b.hi), u3 = div_up(a.hi, b.lo),
           u4 = div_up(a.hi, b.hi);
    return Interval::unchecked(std::min(std::min(l1, l2), std::min(l3, l4)),
                               std::max(std::max(u1, u2), std::max(u3, u4)));
}

// mixed scalar forms
inline Interval operator+(const Interval& a, double x) { return a + Interval(x); }
inline Interval operator+(double x, const Interval& a) { return Interval(x) + a; }
inline Interval operator-(const Interval& a, double x) { return a - Interval(x); }
inline Interval operator-(double x, const Interval& a) { return Interval(x) - a; }
inline Interval operator*(const Interval& a, double x) { return a * Interval(x); }
inline Interval operator*(double x, const Interval& a) { return Interval(x) * a; }
inline Interval operator/(const Interval& a, double x) { return a / Interval(x); }
inline Interval operator/(double x, const Interval& a) { return Interval(x) / a; }

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }

// Even-power sharpening: square([-2,1]) = [0,4], not [-2,1]*[-2,1].
inline Interval sqr(const Interval& a) {
    using namespace detail;
    double lm = a.mig(), hm = a.mag();
    return Interval::unchecked(mul_down(lm, lm), mul_up(hm, hm));
}

inline Interval sqrt_i(const Interval& a) {
    if (a.lo < 0.0) throw DomainError("sqrt of interval with negative part");
    return Interval::unchecked(detail::sqrt_down(a.lo), detail::sqrt_up(a.hi));
}

// sqrt intersected with [0, inf): accepts enclosures that dip below zero
// by rounding noise (locus boundary evaluation).
inline Interval sqrt_clamped(const Interval& a) {
    if (a.hi < 0.0) throw DomainError("sqrt_clamped: wholly negative interval");
    double lo = a.lo < 0.0 ? 0.0 : a.lo;
    return Interval::unchecked(detail::sqrt_down(lo), detail::sqrt_up(a.hi));
}

inline Interval abs_i(const Interval& a) {
    return Interval::unchecked(a.mig(), a.mag());
}

inline Interval recip(const Interval& a) {
    if (a.contains_zero()) throw DomainError("reciprocal of interval containing zero");
    return Interval::unchecked(detail::div_down(1.0, a.hi), detail::div_up(1.0, a.lo));
}

// Enclosure of pi.
inline Interval pi_i() {
    return Interval::unchecked(3.14159265358979311599796346854,
                               3.14159265358979355846616224595);
}

// --- serialization -----------------------------------------------------
// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);
// JSON-pair text: ["lo","hi"]
std::string to_json_pair(const Interval& a);

enum class RoundDir { Down, Up, Nearest };
// Parse a decimal literal with directed rounding; exactly representable
// decimals parse to themselves (no spurious ulp).
double parse_double_directed(const std::string& text, RoundDir dir);
// Parse "lo:hi" or a single value; endpoints rounded outward.
Interval parse_interval_literal(const std::string& text);

} // namespace orbitcert
