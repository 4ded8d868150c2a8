#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qgame/amplitude.hpp"
#include "qgame/errors.hpp"
#include "qgame/generalized_permutation.hpp"
#include "qgame/rational.hpp"

namespace qgame {

/// Diagonal observable over the preferred basis. Degenerate eigenvalues are allowed.
struct Observable {
    std::map<BasisIndex, Rational> eigen;

    bool contains(const BasisIndex& i) const { return eigen.contains(i); }

    const Rational& eigenvalue(const BasisIndex& i) const {
        auto it = eigen.find(i);
        if (it == eigen.end()) throw InvalidGameError("no eigenvalue assigned to basis index " + i);
        return it->second;
    }

    std::set<Rational> spectrum() const {
        std::set<Rational> s;
        for (const auto& [_, x] : eigen) s.insert(x);
        return s;
    }

    std::set<BasisIndex> eigensubspace(const Rational& x) const {
        std::set<BasisIndex> out;
        for (const auto& [i, v] : eigen) {
            if (v == x) out.insert(i);
        }
        return out;
    }

    std::set<BasisIndex> indices() const {
        std::set<BasisIndex> out;
        for (const auto& [i, _] : eigen) out.insert(i);
        return out;
    }

    bool is_degenerate() const { return spectrum().size() != eigen.size(); }

    friend bool operator==(const Observable&, const Observable&) = default;
};

/// An outcome the agent receives. Identity is the label; `value` is the
/// numeric utility when a value function is in play.
struct Consequence {
    std::string label;
    std::optional<Rational> value;

    friend bool operator==(const Consequence&, const Consequence&) = default;
};

/// Consequence labelled by its own value, the default payoff P(x) = x.
inline Consequence numeric(const Rational& v) { return Consequence{to_string(v), v}; }

using Payoff = std::map<Rational, Consequence>;

/// True when both states assign the same amplitude to every index, treating
/// absent entries as zero.
inline bool same_state(const State& a, const State& b) {
    auto nonzero = [](const State& s) {
        std::size_t n = 0;
        for (const auto& [_, amp] : s) n += amp.is_zero() ? 0 : 1;
        return n;
    };
    if (nonzero(a) != nonzero(b)) return false;
    for (const auto& [i, amp] : a) {
        if (amp.is_zero()) continue;
        auto it = b.find(i);
        if (it == b.end() || it->second != amp) return false;
    }
    return true;
}

/// A quantum game <state, observable, payoff>.
struct Game {
    State state;
    Observable observable;
    Payoff payoff;

    friend bool operator==(const Game& a, const Game& b) {
        return same_state(a.state, b.state) && a.observable == b.observable && a.payoff == b.payoff;
    }
};

struct CanonicalBranch {
    Consequence consequence;
    Rational weight;

    friend bool operator==(const CanonicalBranch&, const CanonicalBranch&) = default;
};

/// Distinct consequences with their weights, sorted by label.
struct CanonicalGame {
    std::vector<CanonicalBranch> branches;

    friend bool operator==(const CanonicalGame&, const CanonicalGame&) = default;
};

/// Indices carrying nonzero weight.
inline std::vector<BasisIndex> support(const Game& g) {
    std::vector<BasisIndex> out;
    for (const auto& [i, a] : g.state) {
        if (!a.is_zero()) out.push_back(i);
    }
    return out;
}

inline Rational total_weight(const State& s) {
    Rational total = 0;
    for (const auto& [_, a] : s) total += a.weight();
    return total;
}

/// Eigenvalues realized with nonzero weight.
inline std::set<Rational> occurring_spectrum(const Game& g) {
    std::set<Rational> out;
    for (const auto& i : support(g)) out.insert(g.observable.eigenvalue(i));
    return out;
}

/// Throws InvalidGameError unless the game is normalized, every occurring
/// index has an eigenvalue, and the payoff covers the occurring spectrum.
inline void validate(const Game& g) {
    for (const auto& i : support(g)) {
        if (!g.observable.contains(i)) throw InvalidGameError("no eigenvalue assigned to basis index " + i);
    }
    const Rational total = total_weight(g.state);
    if (total != 1) throw InvalidGameError("state weights sum to " + to_string(total) + ", not 1");
    for (const auto& x : occurring_spectrum(g)) {
        if (!g.payoff.contains(x)) throw InvalidGameError("payoff undefined on occurring eigenvalue " + to_string(x));
    }
}

inline const Consequence& payoff_at(const Game& g, const BasisIndex& i) {
    const Rational& x = g.observable.eigenvalue(i);
    auto it = g.payoff.find(x);
    if (it == g.payoff.end()) throw InvalidGameError("payoff undefined on occurring eigenvalue " + to_string(x));
    return it->second;
}

inline Rational consequence_weight(const Game& g, const Consequence& c) {
    Rational w = 0;
    for (const auto& i : support(g)) {
        if (payoff_at(g, i).label == c.label) w += g.state.at(i).weight();
    }
    return w;
}

inline CanonicalGame canonicalize(const Game& g) {
    validate(g);
    std::map<std::string, CanonicalBranch> merged;
    for (const auto& i : support(g)) {
        const Consequence& c = payoff_at(g, i);
        auto [it, fresh] = merged.try_emplace(c.label, CanonicalBranch{c, 0});
        if (!fresh && it->second.consequence.value != c.value) {
            throw InvalidGameError("consequence \"" + c.label + "\" carries conflicting values");
        }
        it->second.weight += g.state.at(i).weight();
    }
    CanonicalGame out;
    out.branches.reserve(merged.size());
    for (auto& [_, b] : merged) out.branches.push_back(std::move(b));
    return out;
}

/// Re-embeds a canonical game as the game sum_n sqrt(w_n)|n> measured by
/// X0 = sum_n n|n><n| with payoff n -> c_n.
inline Game to_game(const CanonicalGame& cg) {
    Game g;
    for (std::size_t n = 0; n < cg.branches.size(); ++n) {
        const BasisIndex idx = std::to_string(n + 1);
        const Rational x(static_cast<long long>(n + 1));
        g.state.emplace(idx, Amplitude(cg.branches[n].weight));
        g.observable.eigen.emplace(idx, x);
        g.payoff.emplace(x, cg.branches[n].consequence);
    }
    return g;
}

inline Rational expected_utility(const CanonicalGame& cg) {
    Rational eu = 0;
    for (const auto& b : cg.branches) {
        if (!b.consequence.value) {
            throw UnvaluedConsequenceError("consequence \"" + b.consequence.label + "\" has no numeric value");
        }
        eu += b.weight * *b.consequence.value;
    }
    return eu;
}

inline Rational expected_utility(const Game& g) { return expected_utility(canonicalize(g)); }

/// Game over indices "1".."k" with eigenvalue x_i = values[i] and payoff P(x) = x.
/// Repeated values make the observable degenerate.
inline Game numeric_game(const std::vector<Rational>& weights, const std::vector<Rational>& values) {
    if (weights.size() != values.size()) throw InputError("weights and values differ in length");
    Game g;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const BasisIndex idx = std::to_string(i + 1);
        g.state.emplace(idx, Amplitude(weights[i]));
        g.observable.eigen.emplace(idx, values[i]);
        g.payoff.emplace(values[i], numeric(values[i]));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Composite games

struct CompositeGame;
using CompositeOutcome = std::variant<Consequence, std::shared_ptr<const CompositeGame>>;

/// A game whose payoff may be another game to be played on that outcome.
struct CompositeGame {
    State state;
    Observable observable;
    std::map<Rational, CompositeOutcome> payoff;
};

namespace detail {

struct FlatLeaf {
    BasisIndex index;
    Amplitude amplitude;
    Consequence consequence;
};

inline void flatten_into(const CompositeGame& cg, const BasisIndex& prefix, const Amplitude& scale,
                         std::vector<FlatLeaf>& out) {
    if (total_weight(cg.state) != 1) {
        throw InvalidGameError("composite game at \"" + (prefix.empty() ? std::string("root") : prefix) +
                               "\" is not normalized");
    }
    for (const auto& [i, a] : cg.state) {
        if (a.is_zero()) continue;
        const Rational& x = cg.observable.eigenvalue(i);
        auto it = cg.payoff.find(x);
        if (it == cg.payoff.end()) throw InvalidGameError("payoff undefined on occurring eigenvalue " + to_string(x));
        const BasisIndex path = prefix.empty() ? i : prefix + "/" + i;
        const Amplitude amp = amp_mul(scale, a);
        if (const auto* leaf = std::get_if<Consequence>(&it->second)) {
            out.push_back({path, amp, *leaf});
        } else {
            const auto& nested = std::get<std::shared_ptr<const CompositeGame>>(it->second);
            if (!nested) throw InvalidGameError("null nested game at " + path);
            flatten_into(*nested, path, amp, out);
        }
    }
}

inline Rational composite_value(const CompositeGame& cg) {
    Rational v = 0;
    for (const auto& [i, a] : cg.state) {
        if (a.is_zero()) continue;
        const auto& outcome = cg.payoff.at(cg.observable.eigenvalue(i));
        Rational branch;
        if (const auto* leaf = std::get_if<Consequence>(&outcome)) {
            if (!leaf->value) throw UnvaluedConsequenceError("consequence \"" + leaf->label + "\" has no numeric value");
            branch = *leaf->value;
        } else {
            branch = composite_value(*std::get<std::shared_ptr<const CompositeGame>>(outcome));
        }
        v += a.weight() * branch;
    }
    return v;
}

}  // namespace detail

/// Replaces a composite game by one simple game measuring every leaf at once.
/// Leaf paths become basis indices "i/j/..."; each leaf gets its own eigenvalue.
inline Game flatten(const CompositeGame& cg) {
    std::vector<detail::FlatLeaf> leaves;
    detail::flatten_into(cg, "", Amplitude(1), leaves);
    Game g;
    long long next = 0;
    for (auto& leaf : leaves) {
        const Rational x(next++);
        g.state.emplace(leaf.index, leaf.amplitude);
        g.observable.eigen.emplace(leaf.index, x);
        g.payoff.emplace(x, std::move(leaf.consequence));
    }
    return g;
}

/// EU of a composite game obtained by substituting each nested game's EU as
/// the value of the branch it occupies.
inline Rational composite_expected_utility(const CompositeGame& cg) { return detail::composite_value(cg); }

inline CompositeGame as_composite(const Game& g) {
    CompositeGame cg{g.state, g.observable, {}};
    for (const auto& [x, c] : g.payoff) cg.payoff.emplace(x, c);
    return cg;
}

}  // namespace qgame
