#ifndef PCENS_RATIONAL_HPP
#define PCENS_RATIONAL_HPP

// Exact arbitrary-precision arithmetic used throughout the library.
// Probabilities are plain rationals; callers that need floating point
// go through the dedicated log-space entry points instead of rounding
// these values term by term.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pcens {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer ipow(const Integer& base, unsigned long exp) {
    Integer acc = 1;
    Integer b = base;
    while (exp != 0) {
        if (exp & 1u) acc *= b;
        exp >>= 1u;
        if (exp != 0) b *= b;
    }
    return acc;
}

// q^e for integer e of either sign, as an exact rational.
inline Rational qpow(unsigned q, long long e) {
    if (q == 0) throw std::invalid_argument("qpow: zero base");
    if (e >= 0) return Rational(ipow(Integer(q), static_cast<unsigned long>(e)));
    return Rational(Integer(1), ipow(Integer(q), static_cast<unsigned long>(-e)));
}

inline double to_double(const Rational& x) { return x.template convert_to<double>(); }

// Exact value of a finite double: every double is a dyadic rational.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("not a finite value");
    int exp2 = 0;
    const double mant = std::frexp(x, &exp2);
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));  // integral by construction
    return Rational(scaled) * qpow(2, exp2 - 53);
}

// Accepts "a/b" or a plain integer string; no whitespace, no decimals.
inline Rational parse_rational(const std::string& text) {
    const auto bad = [&] { throw std::invalid_argument("not a rational: '" + text + "'"); };
    const auto digits = [&](const std::string& s) {
        if (s.empty()) bad();
        std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (k == s.size()) bad();
        for (; k < s.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(s[k]))) bad();
    };
    const std::size_t slash = text.find('/');
    if (slash == std::string::npos) {
        digits(text);
        return Rational(Integer(text));
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    digits(num);
    digits(den);
    Integer d(den);
    if (d == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    return Rational(Integer(num), d);
}

inline std::string format_rational(const Rational& x) {
    const Integer num = boost::multiprecision::numerator(x);
    const Integer den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Shortest form at the house precision of 12 significant digits.
inline std::string format_double(double x, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

}  // namespace pcens

#endif
