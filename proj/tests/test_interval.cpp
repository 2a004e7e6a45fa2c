#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitcert/interval.hpp"

using namespace orbitcert;

namespace {

std::mt19937_64 rng(0x5eed0001);

double rand_endpoint() {
    std::uniform_real_distribution<double> mag(-30.0, 8.0);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    return mant(rng) * std::exp2(mag(rng));
}

Interval rand_interval() {
    double a = rand_endpoint(), b = rand_endpoint();
    if (a > b) std::swap(a, b);
    return Interval(a, b);
}

double rand_in(const Interval& iv) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double t = u(rng);
    double x = iv.lo + t * (iv.hi - iv.lo);
    if (x < iv.lo) x = iv.lo;
    if (x > iv.hi) x = iv.hi;
    return x;
}

// random subinterval for monotonicity checks
Interval rand_sub(const Interval& iv) {
    double a = rand_in(iv), b = rand_in(iv);
    if (a > b) std::swap(a, b);
    return Interval(a, b);
}

} // namespace

TEST_CASE("binary op examples hold with exact endpoints") {
    Interval a(1, 2), b(3, 4);
    Interval sum = a + b;
    CHECK(sum.lo == 4.0);
    CHECK(sum.hi == 6.0);

    Interval p = Interval(-1, 2) * Interval(3, 4);
    CHECK(p.lo == -4.0);
    CHECK(p.hi == 8.0);

    CHECK_THROWS_AS(Interval(1, 1) / Interval(-1, 1), DomainError);
}

TEST_CASE("unary op examples") {
    Interval s = sqrt_i(Interval(4, 9));
    CHECK(s.lo == 2.0);
    CHECK(s.hi == 3.0);

    Interval ab = abs_i(Interval(-3, 1));
    CHECK(ab.lo == 0.0);
    CHECK(ab.hi == 3.0);

    Interval sq = sqr(Interval(-2, 1));
    CHECK(sq.lo == 0.0);
    CHECK(sq.hi == 4.0);

    CHECK_THROWS_AS(sqrt_i(Interval(-1, 1)), DomainError);
    CHECK_THROWS_AS(recip(Interval(-1, 1)), DomainError);
    Interval r = recip(Interval(2, 4));
    CHECK(r.contains(0.25));
    CHECK(r.contains(0.5));
}

TEST_CASE("containment fuzzing over all operations") {
    // 1e5 samples as specified; zero violations allowed
    int violations = 0;
    for (int i = 0; i < 100000; ++i) {
        Interval a = rand_interval();
        Interval b = rand_interval();
        double x = rand_in(a), y = rand_in(b);

        if (!(a + b).contains(x + y)) ++violations;
        if (!(a - b).contains(x - y)) ++violations;
        if (!(a * b).contains(x * y)) ++violations;
        if (!b.contains_zero()) {
            if (!(a / b).contains(x / y)) ++violations;
            if (!recip(b).contains(1.0 / y)) ++violations;
        }
        if (!sqr(a).contains(x * x)) ++violations;
        if (!abs_i(a).contains(std::abs(x))) ++violations;
        if (!(-a).contains(-x)) ++violations;
        if (a.lo >= 0.0) {
            if (!sqrt_i(a).contains(std::sqrt(x))) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("inclusion monotonicity") {
    for (int i = 0; i < 2000; ++i) {
        Interval a2 = rand_interval();
        Interval b2 = rand_interval();
        Interval a = rand_sub(a2);
        Interval b = rand_sub(b2);

        CHECK(a2.contains(a));
        CHECK((a2 + b2).contains(a + b));
        CHECK((a2 - b2).contains(a - b));
        CHECK((a2 * b2).contains(a * b));
        if (!b2.contains_zero()) CHECK((a2 / b2).contains(a / b));
        CHECK(sqr(a2).contains(sqr(a)));
        CHECK(abs_i(a2).contains(abs_i(a)));
    }
}

TEST_CASE("degenerate intervals track floating arithmetic to one ulp") {
    for (int i = 0; i < 5000; ++i) {
        double x = rand_endpoint(), y = rand_endpoint();
        Interval a(x), b(y);
        Interval s = a + b;
        double fs = x + y;
        CHECK(s.contains(fs));
        CHECK(s.width() <= 2.0 * std::abs(fs) * 1e-15 + 1e-300);
        Interval m = a * b;
        double fm = x * y;
        CHECK(m.contains(fm));
        if (std::abs(fm) > 1e-290)
            CHECK(m.width() <= 2.0 * std::abs(fm) * 1e-15);
    }
}

TEST_CASE("hull, intersect, midpoint behave as set operations") {
    Interval a(0, 1), b(2, 3);
    Interval out;
    CHECK_FALSE(intersect(a, b, out)); // Empty is a value, not an error
    CHECK(intersect(Interval(0, 2), Interval(1, 3), out));
    CHECK(out.lo == 1.0);
    CHECK(out.hi == 2.0);
    CHECK(hull(a, b).lo == 0.0);
    CHECK(hull(a, b).hi == 3.0);
    CHECK(Interval(1, 3).mid() == 2.0);
}

TEST_CASE("construction with lo > hi is an error") {
    CHECK_THROWS_AS(Interval(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(Interval(std::nan("")), DomainError);
}

TEST_CASE("serialization round-trips exactly") {
    for (int i = 0; i < 2000; ++i) {
        double x = rand_endpoint();
        std::string s = format_double(x);
        double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == x);
    }
    CHECK(to_json_pair(Interval(0.5, 1.5)) == "[\"0.5\",\"1.5\"]");
}

TEST_CASE("literal parsing: exact decimals stay exact, inexact round outward") {
    CHECK(parse_double_directed("0.5", RoundDir::Down) == 0.5);
    CHECK(parse_double_directed("0.5", RoundDir::Up) == 0.5);
    CHECK(parse_double_directed("2", RoundDir::Down) == 2.0);
    CHECK(parse_double_directed("-0.25", RoundDir::Up) == -0.25);

    double lo = parse_double_directed("2.1", RoundDir::Down);
    double hi = parse_double_directed("2.1", RoundDir::Up);
    CHECK(lo < hi);
    CHECK(lo < 2.1000000000000001);
    CHECK(hi > 2.0999999999999996);

    Interval c = parse_interval_literal("2.1:2.100001");
    CHECK(c.lo < 2.1);
    CHECK(c.hi > 2.100001 - 1e-12);

    Interval m = parse_interval_literal("0.5");
    CHECK(m.lo == 0.5);
    CHECK(m.hi == 0.5);

    CHECK_THROWS_AS(parse_interval_literal("abc"), UsageError);
    CHECK_THROWS_AS(parse_interval_literal("3:2"), UsageError);
}
