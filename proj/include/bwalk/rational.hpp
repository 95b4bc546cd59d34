#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace bwalk {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Parses "p/q", "p" or a plain decimal like "0.25" into an exact rational.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator in '" + s + "'");
        return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac_len = s.size() - dot - 1;
        BigInt num(digits.empty() || digits == "-" ? "0" : digits);
        BigInt den = 1;
        for (size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(num, den);
    }
    return Rational(BigInt(s));
}

inline std::string rational_to_string(const Rational& r) {
    return r.str();
}

inline Rational rational_pow(const Rational& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("rational_pow: 0^negative");
        return Rational(1) / rational_pow(base, -e);
    }
    Rational acc = 1, b = base;
    long n = e;
    while (n > 0) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

inline Rational binomial_exact(long n, long k) {
    if (k < 0 || k > n) return 0;
    Rational r = 1;
    for (long i = 0; i < k; ++i) r *= Rational(n - i, i + 1);
    return r;
}

}  // namespace bwalk
