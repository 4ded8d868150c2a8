#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qgame/errors.hpp"
#include "qgame/probability.hpp"
#include "qgame/rational.hpp"

namespace qgame {

/// Qualitative preference over an additive structure of consequences.
template <class E>
struct PreferenceOracle {
    std::function<Ordering(const E&, const E&)> compare;
    std::function<E(const E&, const E&)> add;
    E zero;
};

/// Bracket [lower, upper] on V(y)/V(unit).
template <class E>
struct ValueCut {
    Rational lower;
    Rational upper;
    E unit;

    Rational width() const { return upper - lower; }
    bool contains(const Rational& v) const { return lower <= v && v <= upper; }
};

/// Consequences are integers, preferred by size.
inline PreferenceOracle<BigInt> integer_oracle() {
    return {[](const BigInt& a, const BigInt& b) { return compare_values(a, b); },
            [](const BigInt& a, const BigInt& b) { return BigInt(a + b); }, BigInt(0)};
}

/// Consequences are exact sums of money.
inline PreferenceOracle<Rational> money_oracle() {
    return {[](const Rational& a, const Rational& b) { return compare_values(a, b); },
            [](const Rational& a, const Rational& b) { return Rational(a + b); }, Rational(0)};
}

/// n-fold sum e + ... + e by doubling.
template <class E>
E times(const PreferenceOracle<E>& o, const E& e, BigInt n) {
    E result = o.zero;
    E power = e;
    while (n > 0) {
        if ((n & 1) != 0) result = o.add(result, power);
        n >>= 1;
        if (n > 0) power = o.add(power, power);
    }
    return result;
}

namespace detail {

template <class E>
void require_equivalent(const PreferenceOracle<E>& o, const E& a, const E& b, const std::string& what) {
    if (o.compare(a, b) != Ordering::Equivalent) throw AxiomViolationError("preference oracle violates " + what);
}

/// Spot-checks the oracle on the elements a run touches.
template <class E>
void spot_check(const PreferenceOracle<E>& o, const E& unit, const E& y) {
    const E& z = o.zero;
    require_equivalent(o, o.add(y, z), y, "the zero identity (y + 0 ~ y)");
    require_equivalent(o, o.add(unit, z), unit, "the zero identity (x + 0 ~ x)");
    require_equivalent(o, o.add(y, unit), o.add(unit, y), "commutativity (y + x ~ x + y)");
    require_equivalent(o, o.add(o.add(y, unit), unit), o.add(y, o.add(unit, unit)),
                       "associativity ((y + x) + x ~ y + (x + x))");
    const std::vector<E> sample{z, unit, y, o.add(unit, y), o.add(y, y), o.add(unit, unit)};
    for (const auto& a : sample) {
        const Ordering aa = o.compare(a, a);
        if (aa != Ordering::Equivalent) throw AxiomViolationError("preference oracle is not reflexive");
        for (const auto& b : sample) {
            const Ordering ab = o.compare(a, b);
            const Ordering ba = o.compare(b, a);
            if ((ab == Ordering::Greater) != (ba == Ordering::Less) || (ab == Ordering::Equivalent) != (ba == Ordering::Equivalent)) {
                throw AxiomViolationError("preference oracle is not antisymmetric on a sampled pair");
            }
            for (const auto& c : sample) {
                if (ab != Ordering::Less && o.compare(b, c) != Ordering::Less && o.compare(a, c) == Ordering::Less) {
                    throw AxiomViolationError("preference oracle is not transitive on a sampled triple");
                }
                // A1: adding the same element preserves the order.
                if (ab != o.compare(o.add(a, c), o.add(b, c))) {
                    throw AxiomViolationError("preference oracle violates A1 (a > b iff a + c > b + c) on a sampled triple");
                }
            }
        }
    }
}

/// Largest m in [0, bound) with `member(m)`; member must be true at 0 and
/// closed below.
inline BigInt last_member(const std::function<bool(const BigInt&)>& member, BigInt bound) {
    BigInt lo = 0;
    while (lo + 1 < bound) {
        BigInt mid = (lo + bound) / 2;
        if (member(mid)) lo = mid;
        else bound = mid;
    }
    return lo;
}

}  // namespace detail

/// Brackets V(y) relative to V(unit) = 1 by refining the cut {m/n | n y > m unit}
/// with n = 2^depth. For y below zero the cut {m/n | 0 > n y + m unit} is
/// refined instead and negated.
template <class E>
ValueCut<E> build_value(const PreferenceOracle<E>& o, const E& unit, const E& y, int depth) {
    if (depth < 1 || depth > 62) throw InputError("depth must lie in [1, 62]");
    if (o.compare(unit, o.zero) != Ordering::Greater) throw PreconditionError("the unit must be preferred to zero");
    detail::spot_check(o, unit, y);
    ValueCut<E> cut{0, 0, unit};
    const Ordering sign = o.compare(y, o.zero);
    if (sign == Ordering::Equivalent) return cut;

    const BigInt n = BigInt(1) << depth;
    const E ny = times(o, y, n);
    // rel(m) compares the cut's two sides at m.
    std::function<Ordering(const BigInt&)> rel;
    if (sign == Ordering::Greater) {
        rel = [&](const BigInt& m) { return o.compare(ny, times(o, unit, m)); };
    } else {
        rel = [&](const BigInt& m) { return o.compare(o.zero, o.add(ny, times(o, unit, m))); };
    }
    BigInt bound = 1;
    while (rel(bound) == Ordering::Greater) {
        bound *= 2;
        if (bound > (BigInt(1) << 200)) throw AxiomViolationError("the unit never exceeds the target (Archimedean failure)");
    }
    const BigInt m = detail::last_member([&](const BigInt& k) { return rel(k) == Ordering::Greater; }, bound + 1);
    if (rel(m) != Ordering::Greater || (m > 0 && rel(m - 1) != Ordering::Greater)) {
        throw AxiomViolationError("the value cut is not closed below");
    }
    const Ordering next = rel(m + 1);
    if (next == Ordering::Greater) throw AxiomViolationError("the value cut has no upper boundary where expected");
    cut.upper = Rational(BigInt(m + 1), n);
    cut.lower = next == Ordering::Equivalent ? cut.upper : Rational(m, n);
    if (sign == Ordering::Less) {
        cut = ValueCut<E>{-cut.upper, -cut.lower, unit};
    }
    return cut;
}

/// An act pays a consequence value in each state.
using Act = std::vector<Rational>;
using ActOracle = std::function<Rational(const Act&)>;

namespace detail {

inline std::vector<Rational> indicator_probabilities(std::size_t states, const ActOracle& value, const Rational& unit) {
    std::vector<Rational> p;
    const Rational whole = value(Act(states, unit));
    if (whole <= 0) throw OracleInconsistencyError("the constant act paying the unit has value " + to_string(whole));
    for (std::size_t i = 0; i < states; ++i) {
        Act indicator(states, Rational(0));
        indicator[i] = unit;
        p.push_back(value(indicator) / whole);
    }
    return p;
}

}  // namespace detail

/// p_i = V(act paying x on state i only) / V(x), validated on sampled acts.
inline std::vector<Rational> derive_act_probabilities(const std::vector<std::string>& states, const ActOracle& value,
                                                      const Rational& unit_value) {
    if (states.empty()) throw EmptyGameError("at least one state is required");
    if (unit_value <= 0) throw PreconditionError("the unit consequence must have positive value");
    const std::size_t k = states.size();
    const std::vector<Rational> p = detail::indicator_probabilities(k, value, unit_value);
    Rational total = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (p[i] < 0) {
            throw OracleInconsistencyError("act paying the unit only on state " + states[i] +
                                           " has negative value, contradicting Dominance");
        }
        total += p[i];
    }
    if (total != 1) throw OracleInconsistencyError("derived probabilities sum to " + to_string(total));

    if (detail::indicator_probabilities(k, value, unit_value * 2) != p) {
        throw OracleInconsistencyError("probabilities depend on the unit consequence");
    }
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<int> num(-20, 20);
    std::uniform_int_distribution<int> den(1, 6);
    auto sample = [&] {
        Act a(k);
        for (auto& v : a) v = make_rational(num(rng), den(rng));
        return a;
    };
    for (int trial = 0; trial < 16; ++trial) {
        const Act a = sample();
        const Act b = sample();
        Rational expected = 0;
        for (std::size_t i = 0; i < k; ++i) expected += p[i] * value(Act(k, a[i]));
        if (value(a) != expected) {
            throw OracleInconsistencyError("sampled act value is not the probability-weighted sum of its payoffs");
        }
        Act sum(k), hi(k);
        for (std::size_t i = 0; i < k; ++i) {
            sum[i] = a[i] + b[i];
            hi[i] = a[i] >= b[i] ? a[i] : b[i];
        }
        if (value(sum) != value(a) + value(b)) throw OracleInconsistencyError("sampled acts violate Additivity");
        if (value(hi) < value(a) || value(hi) < value(b)) throw OracleInconsistencyError("sampled acts violate Dominance");
    }
    return p;
}

}  // namespace qgame
