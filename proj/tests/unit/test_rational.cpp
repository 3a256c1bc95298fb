#include "fullerlab/rational.hpp"

#include <doctest.h>

using fullerlab::Rational;

TEST_CASE("rational reduction and representation invariants") {
    CHECK(Rational(6, 4).str() == "3/2");
    CHECK(Rational(-6, 4).str() == "-3/2");
    CHECK(Rational(6, -4).str() == "-3/2");
    CHECK(Rational(0, 7).str() == "0");
    CHECK(Rational(0, 7).denominator() == 1);
    CHECK(Rational(5, 1).is_integer());
}

TEST_CASE("rational arithmetic is exact") {
    Rational a(1, 3), b(1, 6);
    CHECK((a + b).str() == "1/2");
    CHECK((a - b).str() == "1/6");
    CHECK((a * b).str() == "1/18");
    CHECK((a / b).str() == "2");
    CHECK((-a).str() == "-1/3");
    CHECK_THROWS_AS(a / Rational(0), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("rational parsing round-trips") {
    for (const char* s : {"0", "1", "-7", "3/2", "-9/8", "98765432123456789/64"}) {
        CHECK(Rational::from_string(s).str() == s);
    }
    CHECK(Rational::from_string(" 3 / 2 ").str() == "3/2");
    CHECK_THROWS_AS(Rational::from_string("abc"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::from_string(""), std::invalid_argument);
    CHECK_THROWS_AS(Rational::from_string("1/0"), std::invalid_argument);
}

TEST_CASE("arbitrary precision: no overflow at large exponents") {
    Rational two(2);
    Rational big = two.pow(100);
    CHECK(big.str() == "1267650600228229401496703205376");
    CHECK((big * big).str() == two.pow(200).str());
    Rational tiny = Rational(1, 3).pow(40);
    CHECK((tiny * Rational(3).pow(40)).is_one());
}

TEST_CASE("exact conversion from double") {
    CHECK(Rational::from_double(0.5).str() == "1/2");
    CHECK(Rational::from_double(-1.0).str() == "-1");
    CHECK(Rational::from_double(0.0).str() == "0");
    // 0.1 is not representable; the conversion is exact binary, not decimal.
    CHECK(Rational::from_double(0.1).denominator() != 10);
    CHECK_THROWS_AS(Rational::from_double(1.0 / 0.0), std::invalid_argument);
}

TEST_CASE("ordering") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(-1, 3));
    CHECK(Rational(2, 4) == Rational(1, 2));
}
