#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qgame/errors.hpp"
#include "qgame/rational.hpp"

namespace qgame {

/// n repetitions of a two-outcome measurement: outcome "0" has weight p and
/// pays x, outcome "1" has weight q = 1 - p and pays y. A bet is accepted
/// when the observed frequency of "0" is at least the break-even p0.
struct RepeatedMeasurement {
    long long n = 0;
    Rational p;
    Rational x;
    Rational y;
    Rational epsilon;
};

inline void validate(const RepeatedMeasurement& rm) {
    if (rm.n < 1) throw DomainError("number of repetitions must be positive");
    if (rm.p < 0 || rm.p > 1) throw DomainError("weight p must lie in [0, 1], got " + to_string(rm.p));
}

inline BigInt binomial(long long n, long long m) {
    if (m < 0 || m > n) return 0;
    m = std::min(m, n - m);
    BigInt c = 1;
    for (long long i = 1; i <= m; ++i) c = c * (n - m + i) / i;
    return c;
}

inline Rational rational_pow(const Rational& base, long long e) {
    Rational r = 1;
    Rational b = base;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

/// Weight of the branches in which "0" occurs exactly m times.
inline Rational branch_weight(long long n, long long m, const Rational& p) {
    if (n < 0 || m < 0 || m > n) throw DomainError("branch_weight needs 0 <= m <= n");
    return Rational(binomial(n, m)) * rational_pow(p, m) * rational_pow(Rational(1) - p, n - m);
}

/// All (m, weight) rows for m = 0..n.
inline std::vector<std::pair<long long, Rational>> branch_table(long long n, const Rational& p) {
    std::vector<std::pair<long long, Rational>> rows;
    for (long long m = 0; m <= n; ++m) rows.emplace_back(m, branch_weight(n, m, p));
    return rows;
}

/// Break-even frequency p0 with p0 x + (1 - p0) y = epsilon.
inline Rational threshold(const RepeatedMeasurement& rm) {
    if (rm.x == rm.y) throw DegenerateError("x = y: the bet's threshold is undefined");
    return (rm.epsilon - rm.y) / (rm.x - rm.y);
}

/// m/n >= p0, ties accepted.
inline bool accepts(const RepeatedMeasurement& rm, long long m) {
    return Rational(m) >= threshold(rm) * Rational(rm.n);
}

inline Rational acceptance_weight(const RepeatedMeasurement& rm) {
    validate(rm);
    const Rational p0 = threshold(rm);
    Rational w = 0;
    for (long long m = 0; m <= rm.n; ++m) {
        if (Rational(m) >= p0 * Rational(rm.n)) w += branch_weight(rm.n, m, rm.p);
    }
    return w;
}

/// Expected utility of accepting exactly when the frequency clears p0.
inline Rational strategy_eu(const RepeatedMeasurement& rm) {
    const Rational q = Rational(1) - rm.p;
    return acceptance_weight(rm) * (rm.p * rm.x + q * rm.y);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Gaussian tail estimate (px + qy) erfc(x0) / 2 with x0 = sqrt(n / 2pq) (p0 - p).
inline double gaussian_approx(const RepeatedMeasurement& rm) {
    validate(rm);
    if (rm.p == 0 || rm.p == 1) throw DegenerateError("the Gaussian estimate needs 0 < p < 1");
    const double p = to_double(rm.p);
    const double q = 1.0 - p;
    const double p0 = to_double(threshold(rm));
    const double x0 = std::sqrt(static_cast<double>(rm.n) / (2.0 * p * q)) * (p0 - p);
    return to_double(rm.p * rm.x + (Rational(1) - rm.p) * rm.y) * std::erfc(x0) / 2.0;
}

}  // namespace qgame
