#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qgame/equivalence.hpp"
#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/rational.hpp"

namespace qgame {

enum class Axiom { Additivity, ZeroSum, Dominance, Substitutivity, AdditivityLemma, PermutationAverage };

inline std::string to_string(Axiom a) {
    switch (a) {
        case Axiom::Additivity: return "Additivity";
        case Axiom::ZeroSum: return "ZeroSum";
        case Axiom::Dominance: return "Dominance";
        case Axiom::Substitutivity: return "Substitutivity";
        case Axiom::AdditivityLemma: return "AdditivityLemma";
        case Axiom::PermutationAverage: return "PermutationAverage";
    }
    return "?";
}

enum class Relation { Equal, GreaterEqual, LessEqual };

inline std::string to_string(Relation r) {
    switch (r) {
        case Relation::Equal: return "=";
        case Relation::GreaterEqual: return ">=";
        case Relation::LessEqual: return "<=";
    }
    return "?";
}

/// An (in)equality between game values, kept as text for the trace reader.
struct Claim {
    std::string lhs;
    Relation relation = Relation::Equal;
    std::string rhs;
};

inline std::string to_string(const Claim& c) { return c.lhs + " " + to_string(c.relation) + " " + c.rhs; }

// Side-condition payloads, one per axiom.

/// Act additivity: V(first) + V(second) = V(sum) for payoffs added pointwise
/// over one measurement.
struct AdditivityUse {
    Game first;
    Game second;
    Game sum;
};

struct ZeroSumUse {
    Game game;
    Game negated;
};

/// Same measurement, dominant payoff at least the dominated one on every
/// occurring outcome.
struct DominanceUse {
    Game dominant;
    Game dominated;
};

/// Each nested game is replaced by a consequence of the value already derived for it.
struct SubstitutivityUse {
    CompositeGame composite;
    Game substituted;
    std::map<Rational, Rational> nested_values;
};

struct AdditivityLemmaUse {
    Game game;
    Game shifted;
    Rational k;
};

/// The payoff-permuted copies G_pi of an equal-weight game, over the full
/// symmetric group or its cyclic subgroup, and the constant act their payoffs
/// sum to.
struct PermutationAverageUse {
    Game base;
    bool full_group = false;
    Rational constant_payoff;
    std::size_t family_size = 0;
};

using AxiomPayload = std::variant<AdditivityUse, ZeroSumUse, DominanceUse, SubstitutivityUse, AdditivityLemmaUse,
                                  PermutationAverageUse>;

struct AxiomUse {
    AxiomPayload payload;
    Axiom axiom() const { return static_cast<Axiom>(payload.index()); }
};

struct TraceEntry {
    std::variant<RewriteStep, AxiomUse> item;
    Claim claim;
};

struct DerivationTrace {
    std::vector<TraceEntry> steps;
    Claim conclusion;

    void add(RewriteStep step, std::string lhs, std::string rhs) {
        steps.push_back({std::move(step), Claim{std::move(lhs), Relation::Equal, std::move(rhs)}});
    }
    void add(AxiomPayload use, Claim claim) { steps.push_back({AxiomUse{std::move(use)}, std::move(claim)}); }
    void append(const DerivationTrace& other) {
        steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    }
};

namespace detail {

inline const Rational& occurring_value(const Game& g, const Rational& x) {
    const Consequence& c = g.payoff.at(x);
    if (!c.value) throw UnvaluedConsequenceError("consequence \"" + c.label + "\" has no numeric value");
    return *c.value;
}

inline void require_same_measurement(const Game& a, const Game& b, const char* axiom) {
    validate(a);
    validate(b);
    if (!same_state(a.state, b.state)) throw AxiomViolationError(std::string(axiom) + ": games use different states");
    for (const auto& i : support(a)) {
        if (a.observable.eigenvalue(i) != b.observable.eigenvalue(i)) {
            throw AxiomViolationError(std::string(axiom) + ": games measure different observables");
        }
    }
}

/// Checks `f(value_a) == value_b` at every occurring eigenvalue.
template <class Relation>
inline void require_pointwise(const Game& a, const Game& b, const char* axiom, Relation rel) {
    for (const auto& x : occurring_spectrum(a)) {
        if (!rel(occurring_value(a, x), occurring_value(b, x))) {
            throw AxiomViolationError(std::string(axiom) + ": payoff condition fails at eigenvalue " + to_string(x));
        }
    }
}

inline void check(const AdditivityUse& u) {
    require_same_measurement(u.first, u.second, "Additivity");
    require_same_measurement(u.first, u.sum, "Additivity");
    for (const auto& x : occurring_spectrum(u.first)) {
        if (occurring_value(u.first, x) + occurring_value(u.second, x) != occurring_value(u.sum, x)) {
            throw AxiomViolationError("Additivity: summed payoff is wrong at eigenvalue " + to_string(x));
        }
    }
}

inline void check(const ZeroSumUse& u) {
    require_same_measurement(u.game, u.negated, "ZeroSum");
    require_pointwise(u.game, u.negated, "ZeroSum", [](const Rational& a, const Rational& b) { return a == -b; });
}

inline void check(const DominanceUse& u) {
    require_same_measurement(u.dominant, u.dominated, "Dominance");
    require_pointwise(u.dominant, u.dominated, "Dominance", [](const Rational& a, const Rational& b) { return a >= b; });
}

inline void check(const AdditivityLemmaUse& u) {
    require_same_measurement(u.game, u.shifted, "AdditivityLemma");
    require_pointwise(u.game, u.shifted, "AdditivityLemma",
                      [&](const Rational& a, const Rational& b) { return a + u.k == b; });
}

inline void check(const SubstitutivityUse& u) {
    const CompositeGame& cg = u.composite;
    validate(u.substituted);
    if (!same_state(cg.state, u.substituted.state)) throw AxiomViolationError("Substitutivity: outer states differ");
    for (const auto& i : support(u.substituted)) {
        const Rational& x = cg.observable.eigenvalue(i);
        if (u.substituted.observable.eigenvalue(i) != x) {
            throw AxiomViolationError("Substitutivity: outer observables differ");
        }
        const auto& outcome = cg.payoff.at(x);
        const Consequence& replaced = u.substituted.payoff.at(x);
        if (const auto* leaf = std::get_if<Consequence>(&outcome)) {
            if (*leaf != replaced) throw AxiomViolationError("Substitutivity: a plain consequence was altered");
        } else {
            auto it = u.nested_values.find(x);
            if (it == u.nested_values.end() || !replaced.value || *replaced.value != it->second) {
                throw AxiomViolationError("Substitutivity: replacement at eigenvalue " + to_string(x) +
                                          " does not carry the nested game's value");
            }
        }
    }
}

inline void check(const PermutationAverageUse& u) {
    validate(u.base);
    const auto idx = support(u.base);
    const std::size_t n = idx.size();
    if (n == 0) throw AxiomViolationError("PermutationAverage: empty game");
    const Rational w(1, static_cast<long long>(n));
    std::vector<Rational> values;
    for (const auto& i : idx) {
        if (u.base.state.at(i).weight() != w) throw AxiomViolationError("PermutationAverage: weights are not equal");
        values.push_back(occurring_value(u.base, u.base.observable.eigenvalue(i)));
    }
    if (occurring_spectrum(u.base).size() != n) {
        throw AxiomViolationError("PermutationAverage: outcomes must be distinct eigenvalues");
    }
    Rational sum = 0;
    for (const auto& v : values) sum += v;
    // Every position of the family receives every value equally often:
    // (n-1)! times over S_n, once over the cyclic group.
    std::size_t size = 1;
    Rational per_value = 1;
    if (u.full_group) {
        for (std::size_t k = 2; k <= n; ++k) size *= k;
        per_value = Rational(static_cast<long long>(size / n));
    } else {
        size = n;
    }
    if (u.family_size != size) throw AxiomViolationError("PermutationAverage: family size mismatch");
    // Each G_pi must share the base's canonical form; checking the generators
    // (the n-cycle, plus a transposition for S_n) covers the whole family.
    const CanonicalGame reference = canonicalize(u.base);
    auto check_generator = [&](auto sigma) {
        Game permuted = u.base;
        for (std::size_t p = 0; p < n; ++p) {
            const Rational& x = u.base.observable.eigenvalue(idx[p]);
            permuted.payoff[x] = u.base.payoff.at(u.base.observable.eigenvalue(idx[sigma(p)]));
        }
        if (canonicalize(permuted) != reference) {
            throw AxiomViolationError("PermutationAverage: a permuted game changes the canonical form");
        }
    };
    check_generator([n](std::size_t p) { return (p + 1) % n; });
    if (u.full_group && n >= 2) check_generator([](std::size_t p) { return p < 2 ? 1 - p : p; });
    if (u.constant_payoff != per_value * sum) {
        throw AxiomViolationError("PermutationAverage: permuted payoffs do not sum to the claimed constant");
    }
}

}  // namespace detail

inline void check_axiom(const AxiomUse& use) {
    std::visit([](const auto& p) { detail::check(p); }, use.payload);
}

/// Replays every rewrite and re-validates every axiom side condition.
inline void verify(const DerivationTrace& trace) {
    for (const auto& entry : trace.steps) {
        if (const auto* step = std::get_if<RewriteStep>(&entry.item)) {
            replay(*step);
        } else {
            check_axiom(std::get<AxiomUse>(entry.item));
        }
    }
}

}  // namespace qgame
