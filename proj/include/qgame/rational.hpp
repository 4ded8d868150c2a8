#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "qgame/errors.hpp"

namespace qgame {

/// Exact rational in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw InputError("zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

/// Parses "p/q" or "p" with optional leading sign. Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
    auto parse_int = [&](std::string_view s, bool allow_sign) -> BigInt {
        if (s.empty()) throw InputError("malformed rational \"" + std::string(text) + "\"");
        std::size_t start = 0;
        if (allow_sign && (s[0] == '-' || s[0] == '+')) start = 1;
        if (start == s.size()) throw InputError("malformed rational \"" + std::string(text) + "\"");
        for (std::size_t i = start; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') {
                throw InputError("malformed rational \"" + std::string(text) + "\"");
            }
        }
        std::string digits(s);
        if (digits[0] == '+') digits.erase(0, 1);
        return BigInt(digits);
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, true));
    const BigInt num = parse_int(text.substr(0, slash), true);
    const BigInt den = parse_int(text.substr(slash + 1), false);
    if (den == 0) throw InputError("zero denominator in \"" + std::string(text) + "\"");
    return Rational(num, den);
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) {
    const BigInt d = denominator(r);
    if (d == 1) return numerator(r).str();
    return numerator(r).str() + "/" + d.str();
}

inline BigInt floor_div(const Rational& r) {
    const BigInt n = numerator(r);
    const BigInt d = denominator(r);
    BigInt q = n / d;  // truncates toward zero
    if (n < 0 && q * d != n) q -= 1;
    return q;
}

/// Fractional part in [0, 1).
inline Rational mod_one(const Rational& r) { return r - Rational(floor_div(r)); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline BigInt lcm(const BigInt& a, const BigInt& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::lcm(a, b);
}

}  // namespace qgame
