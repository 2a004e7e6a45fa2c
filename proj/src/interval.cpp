#include "orbitcert/interval.hpp"

#include <charconv>
#include <cctype>
#include <cstring>

namespace orbitcert {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_json_pair(const Interval& a) {
    return "[\"" + format_double(a.lo) + "\",\"" + format_double(a.hi) + "\"]";
}

namespace {

using u128 = unsigned __int128;

// Decompose a decimal literal into sign * M * 10^k.  Returns false when the
// mantissa overflows the digit budget (the literal is then surely inexact
// as a double unless the tail is zeros, which we fold into `truncated`).
struct DecimalParts {
    bool neg = false;
    u128 mantissa = 0;
    int exp10 = 0;
    bool truncated = false; // nonzero digits dropped
    bool valid = false;
};

DecimalParts decompose(const std::string& s) {
    DecimalParts d;
    const char* p = s.c_str();
    const char* end = p + s.size();
    if (p == end) return d;
    if (*p == '+' || *p == '-') {
        d.neg = (*p == '-');
        ++p;
    }
    int digits = 0;
    bool any = false, seen_dot = false;
    int frac = 0;
    for (; p != end; ++p) {
        if (*p == '.') {
            if (seen_dot) return d;
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(*p))) break;
        any = true;
        if (digits < 38) {
            d.mantissa = d.mantissa * 10 + static_cast<unsigned>(*p - '0');
            if (d.mantissa != 0) ++digits;
            if (seen_dot) ++frac;
        } else {
            if (*p != '0') d.truncated = true;
            if (!seen_dot) ++d.exp10;
        }
    }
    if (!any) return d;
    d.exp10 -= frac;
    if (p != end && (*p == 'e' || *p == 'E')) {
        ++p;
        int esign = 1;
        if (p != end && (*p == '+' || *p == '-')) {
            if (*p == '-') esign = -1;
            ++p;
        }
        if (p == end) return d;
        int e = 0;
        for (; p != end; ++p) {
            if (!std::isdigit(static_cast<unsigned char>(*p))) return d;
            e = e * 10 + (*p - '0');
            if (e > 100000) return d;
        }
        d.exp10 += esign * e;
    }
    if (p != end) return d;
    d.valid = true;
    return d;
}

constexpr u128 kTwo53 = u128(1) << 53;

// Does sign * M * 10^k equal a double exactly?  If so set out and return true.
bool exact_double_value(const DecimalParts& d, double& out) {
    if (d.truncated) return false;
    if (d.mantissa == 0) {
        out = d.neg ? -0.0 : 0.0;
        return true;
    }
    u128 m = d.mantissa;
    int k = d.exp10;
    if (k >= 0) {
        if (k > 30) return false;
        for (int i = 0; i < k; ++i) {
            if (m > (~u128(0)) / 5) return false;
            m *= 5;
        }
        if (m >= kTwo53) return false;
        double v = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(m)), k);
        out = d.neg ? -v : v;
        return std::isfinite(v);
    }
    int j = -k;
    if (j > 60) return false;
    for (int i = 0; i < j; ++i) {
        if (m % 5 != 0) return false;
        m /= 5;
    }
    if (m >= kTwo53) return false;
    double v = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(m)), -j);
    // reject if the ldexp lost bits to the subnormal range
    if (std::ldexp(v, j) != static_cast<double>(static_cast<std::uint64_t>(m))) return false;
    out = d.neg ? -v : v;
    return true;
}

} // namespace

double parse_double_directed(const std::string& text, RoundDir dir) {
    std::string s = text;
    // trim
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw UsageError("empty numeric literal");

    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw UsageError("malformed numeric literal: '" + text + "'");

    DecimalParts d = decompose(s);
    if (d.valid) {
        double exact;
        if (exact_double_value(d, exact)) return exact;
    }
    switch (dir) {
    case RoundDir::Down: return detail::next_down(v);
    case RoundDir::Up: return detail::next_up(v);
    default: return v;
    }
}

Interval parse_interval_literal(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        double lo = parse_double_directed(text, RoundDir::Down);
        double hi = parse_double_directed(text, RoundDir::Up);
        if (lo > hi) throw UsageError("interval literal collapsed: '" + text + "'");
        return Interval(lo, hi);
    }
    double lo = parse_double_directed(text.substr(0, colon), RoundDir::Down);
    double hi = parse_double_directed(text.substr(colon + 1), RoundDir::Up);
    if (lo > hi) throw UsageError("interval literal with lo > hi: '" + text + "'");
    return Interval(lo, hi);
}

} // namespace orbitcert
