#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbmc/rational.hpp"

#include <cstdint>
#include <random>

using qbmc::BigInt;
using qbmc::Rational;

TEST_CASE("bigints match 64-bit arithmetic on small values") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dist(-1'000'000'000, 1'000'000'000);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t a = dist(rng), b = dist(rng);
        CHECK((BigInt(a) + BigInt(b)).to_int64() == a + b);
        CHECK((BigInt(a) - BigInt(b)).to_int64() == a - b);
        CHECK((BigInt(a) * BigInt(b)).to_int64() == a * b);
        if (b != 0) {
            CHECK((BigInt(a) / BigInt(b)).to_int64() == a / b);
            CHECK((BigInt(a) % BigInt(b)).to_int64() == a % b);
        }
        CHECK((BigInt(a) < BigInt(b)) == (a < b));
        CHECK(BigInt(a).to_string() == std::to_string(a));
    }
}

TEST_CASE("bigint grows past 64 bits without losing information") {
    BigInt big(1);
    for (int i = 0; i < 40; ++i) big = big * BigInt(1000);
    // 1000^40 == 10^120
    std::string expected = "1";
    expected.append(120, '0');
    CHECK(big.to_string() == expected);
    CHECK_FALSE(big.fits_int64());
    CHECK((big - big).is_zero());
    CHECK((big / big).to_int64() == 1);
    // 1000 = 6 mod 7, 6^40 = 36^20 = 1^20 = 1 mod 7
    CHECK((big % BigInt(7)).to_int64() == 1);
}

TEST_CASE("bigint string round trip") {
    for (const char* s : {"0", "-1", "123456789012345678901234567890", "-987654321098765432109"}) {
        CHECK(BigInt::from_string(s).to_string() == s);
    }
}

TEST_CASE("rationals stay in lowest terms with positive denominator") {
    Rational r = Rational::from_int(4, -6);
    CHECK(r.to_string() == "-2/3");
    CHECK(Rational::from_int(0, 5).to_string() == "0");
    CHECK((Rational::from_int(1, 3) + Rational::from_int(1, 6)).to_string() == "1/2");
    CHECK((Rational::from_int(5, 2) * Rational::from_int(4, 5)).to_string() == "2");
}

TEST_CASE("decimal literals parse exactly") {
    CHECK(Rational::from_string("2.5") == Rational::from_int(5, 2));
    CHECK(Rational::from_string("-0.125") == Rational::from_int(-1, 8));
    CHECK(Rational::from_string("70") == Rational(70));
    CHECK(Rational::from_string("7/3").to_string() == "7/3");
}

TEST_CASE("rational field axioms on random values") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> dist(-50, 50);
    for (int i = 0; i < 500; ++i) {
        std::int64_t n1 = dist(rng), n2 = dist(rng);
        std::int64_t d1 = dist(rng), d2 = dist(rng);
        if (d1 == 0 || d2 == 0) continue;
        Rational a = Rational::from_int(n1, d1);
        Rational b = Rational::from_int(n2, d2);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK(a - a == Rational(0));
        if (!b.is_zero()) CHECK(a / b * b == a);
        CHECK((a < b) == !(a >= b));
    }
}
