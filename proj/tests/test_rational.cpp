#include <catch2/catch_amalgamated.hpp>

#include "rwmax/rational.hpp"

using namespace rwmax;

TEST_CASE("parse accepts the interchange grammar") {
    CHECK(parse_rational("1/3") == Rat(1, 3));
    CHECK(parse_rational("-7/2") == Rat(-7, 2));
    CHECK(parse_rational("0") == 0);
    CHECK(parse_rational("42") == 42);
    CHECK(parse_rational("6/4") == Rat(3, 2));  // normalized on parse
}

TEST_CASE("parse rejects everything else") {
    for (const char* bad : {"", "1.5", "1/0", " 1/2", "1/2 ", "1//2", "a", "1/", "/2", "+1", "-", "0x3", "1e3"})
        CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
}

TEST_CASE("format round-trips and is canonical") {
    CHECK(format_rational(Rat(1, 3)) == "1/3");
    CHECK(format_rational(Rat(-6, 4)) == "-3/2");
    CHECK(format_rational(Rat(5)) == "5");
    CHECK(format_rational(Rat(0)) == "0");
    // property: parse(format(x)) == x
    for (int num = -20; num <= 20; ++num)
        for (int den = 1; den <= 9; ++den) CHECK(parse_rational(format_rational(Rat(num, den))) == Rat(num, den));
}

TEST_CASE("floor and ceil") {
    CHECK(floor_rat(Rat(7, 2)) == 3);
    CHECK(ceil_rat(Rat(7, 2)) == 4);
    CHECK(floor_rat(Rat(-7, 2)) == -4);
    CHECK(ceil_rat(Rat(-7, 2)) == -3);
    CHECK(floor_rat(Rat(4)) == 4);
    CHECK(ceil_rat(Rat(4)) == 4);
}

TEST_CASE("integer powers of rationals") {
    CHECK(pow_rat(Rat(2, 3), 3) == Rat(8, 27));
    CHECK(pow_rat(Rat(2, 3), -2) == Rat(9, 4));
    CHECK(pow_rat(Rat(5), 0) == 1);
    CHECK(pow_rat(Rat(0), 3) == 0);
    CHECK_THROWS_AS(pow_rat(Rat(0), -1), std::domain_error);
}

TEST_CASE("simplest rational in an interval") {
    CHECK(simplest_in_interval(Rat(1, 3), Rat(1, 3)) == Rat(1, 3));
    CHECK(simplest_in_interval(Rat(3, 10), Rat(2, 5)) == Rat(1, 3));
    CHECK(simplest_in_interval(Rat(-1, 10), Rat(1, 10)) == 0);
    CHECK(simplest_in_interval(Rat(5, 2), Rat(7, 2)) == 3);
    CHECK(simplest_in_interval(Rat(-2, 5), Rat(-3, 10)) == Rat(-1, 3));
    CHECK_THROWS_AS(simplest_in_interval(Rat(1), Rat(0)), std::invalid_argument);
}

TEST_CASE("simplest-in-interval recovers a value from a tight enclosure") {
    // the reconstruction guarantee: width below 1/(2 den^2) pins the value
    const Rat eps = pow_rat(Rat(1, 2), 60);
    for (int num = 1; num <= 40; ++num)
        for (int den = 1; den <= 12; ++den) {
            const Rat target(num, den);
            CHECK(simplest_in_interval(target - eps, target + eps) == target);
            CHECK(simplest_in_interval(target, target + eps) == target);
        }
}
