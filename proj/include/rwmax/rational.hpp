#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rwmax {

// Exact arithmetic used throughout: arbitrary-precision integers and
// rationals. Floating point only ever appears in Monte Carlo estimators
// and in quantities that are irrational by nature (e.g. quadratic roots).
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Parses the interchange grammar for rationals: `-?digits(/digits)?`.
/// Anything else (floats, whitespace, zero denominators) is rejected.
inline Rat parse_rational(std::string_view text) {
    const auto fail = [&] {
        throw std::invalid_argument("invalid rational literal: \"" + std::string(text) + "\"");
    };
    std::size_t pos = 0;
    const bool negative = !text.empty() && text[0] == '-';
    if (negative) pos = 1;
    auto scan_digits = [&](std::size_t from) {
        std::size_t i = from;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == from) fail();
        return i;
    };
    const std::size_t num_end = scan_digits(pos);
    Int num(std::string(text.substr(pos, num_end - pos)));
    Int den = 1;
    if (num_end != text.size()) {
        if (text[num_end] != '/') fail();
        const std::size_t den_end = scan_digits(num_end + 1);
        if (den_end != text.size()) fail();
        den = Int(std::string(text.substr(num_end + 1, den_end - num_end - 1)));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: \"" + std::string(text) + "\"");
    }
    if (negative) num = -num;
    return Rat(num, den);
}

/// Canonical form used in all file formats and reports: "n" or "n/d",
/// d > 0, gcd(n, d) = 1. Lossless round-trip with parse_rational.
inline std::string format_rational(const Rat& value) {
    std::string out = numerator(value).str();
    if (denominator(value) != 1) {
        out += '/';
        out += denominator(value).str();
    }
    return out;
}

inline double to_double(const Rat& value) { return value.convert_to<double>(); }

inline Int floor_rat(const Rat& value) {
    Int q = numerator(value) / denominator(value);
    if (q * denominator(value) != numerator(value) && value < 0) --q;
    return q;
}

inline Int ceil_rat(const Rat& value) {
    Int q = numerator(value) / denominator(value);
    if (q * denominator(value) != numerator(value) && value > 0) ++q;
    return q;
}

/// value^exponent for integer exponents of either sign.
inline Rat pow_rat(const Rat& value, long long exponent) {
    if (exponent == 0) return Rat(1);
    if (value == 0) {
        if (exponent < 0) throw std::domain_error("pow_rat: zero base with negative exponent");
        return Rat(0);
    }
    Rat base = exponent > 0 ? value : Rat(denominator(value), numerator(value));
    unsigned long long e = exponent > 0 ? static_cast<unsigned long long>(exponent)
                                        : static_cast<unsigned long long>(-(exponent + 1)) + 1ULL;
    Rat acc(1);
    while (e != 0) {
        if (e & 1ULL) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

namespace detail {
inline Rat simplest_positive(const Rat& lo, const Rat& hi) {
    // 0 < lo <= hi. Walk the continued fraction until the bracket spans
    // an integer.
    const Int fl = floor_rat(lo);
    if (Rat(fl) == lo) return lo;
    if (hi >= Rat(fl + 1)) return Rat(fl + 1);
    const Rat sub = simplest_positive(1 / (hi - Rat(fl)), 1 / (lo - Rat(fl)));
    return Rat(fl) + 1 / sub;
}
}  // namespace detail

/// The unique rational with the smallest denominator (and then smallest
/// numerator) inside the closed interval [lo, hi]. Used to recover exact
/// values from certified enclosures.
inline Rat simplest_in_interval(const Rat& lo, const Rat& hi) {
    if (lo > hi) throw std::invalid_argument("simplest_in_interval: empty interval");
    if (lo <= 0 && 0 <= hi) return Rat(0);
    if (hi < 0) return -detail::simplest_positive(-hi, -lo);
    return detail::simplest_positive(lo, hi);
}

}  // namespace rwmax
