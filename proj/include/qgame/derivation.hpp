#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qgame/equivalence.hpp"
#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/rational.hpp"
#include "qgame/trace.hpp"

namespace qgame {

/// Width allowed for a value sandwich.
class Precision {
public:
    explicit Precision(Rational epsilon) : epsilon_(std::move(epsilon)) {
        if (epsilon_ <= 0) throw InputError("precision epsilon must be positive");
    }
    const Rational& epsilon() const { return epsilon_; }

private:
    Rational epsilon_;
};

/// Largest number of equal-weight sub-branches a derivation will fan a game out into.
inline constexpr std::size_t kDefaultMaxFanout = 1u << 14;

struct ValueDerivation {
    Rational value;
    DerivationTrace trace;
};

struct IntervalDerivation {
    Rational lower;
    Rational upper;
    DerivationTrace trace;
};

struct ShiftDerivation {
    Game shifted;
    DerivationTrace trace;
};

namespace detail {

inline void require_valued(const Game& g) {
    validate(g);
    for (const auto& x : occurring_spectrum(g)) occurring_value(g, x);
}

template <class Fn>
inline Game map_payoff_values(const Game& g, Fn fn) {
    Game out{g.state, g.observable, {}};
    for (const auto& [x, c] : g.payoff) out.payoff.emplace(x, c.value ? numeric(fn(*c.value)) : c);
    return out;
}

inline Game constant_payoff(const Game& g, const Rational& k) {
    return map_payoff_values(g, [&](const Rational&) { return k; });
}

template <class Fn>
inline SpectrumMap spectrum_map(const Observable& obs, Fn fn) {
    SpectrumMap f;
    for (const auto& x : obs.spectrum()) f.emplace(x, fn(x));
    return f;
}

inline SpectrumMap inverse(const SpectrumMap& f) {
    SpectrumMap inv;
    for (const auto& [x, y] : f) inv.emplace(y, x);
    return inv;
}

inline std::string str(const Rational& r) { return to_string(r); }

/// Game over indices "1".."k" with eigenvalue j on index j and payoff v_j.
inline Game standard_game(const std::vector<Rational>& weights, const std::vector<Rational>& values) {
    Game g;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const BasisIndex idx = std::to_string(j + 1);
        const Rational x(static_cast<long long>(j + 1));
        g.state.emplace(idx, Amplitude(weights[j]));
        g.observable.eigen.emplace(idx, x);
        g.payoff.emplace(x, numeric(values[j]));
    }
    return g;
}

/// Adds the additivity-lemma steps for <psi, X, P> and returns the game
/// <psi, X + k, P> reached by the closing PET shift.
inline Game additivity_lemma_steps(const Game& g, const Rational& k, DerivationTrace& trace, Game* shifted = nullptr) {
    const Game plus_k = map_payoff_values(g, [&](const Rational& v) { return v + k; });
    trace.add(AdditivityUse{g, constant_payoff(g, k), plus_k},
              Claim{"V(psi, X, P) + V(constant " + str(k) + ")", Relation::Equal, "V(psi, X, P + " + str(k) + ")"});
    trace.add(AdditivityLemmaUse{g, plus_k, k},
              Claim{"V(psi, X, P + " + str(k) + ")", Relation::Equal, "V(psi, X, P) + " + str(k)});
    RewriteStep pet = apply_pet(plus_k, spectrum_map(plus_k.observable, [&](const Rational& x) { return x + k; }));
    Game moved = pet.after;
    trace.add(std::move(pet), "V(psi, X, P + " + str(k) + ")", "V(psi, X + " + str(k) + ", (P + k) o f^-1)");
    if (shifted) *shifted = plus_k;
    return moved;
}

/// Permutation-average argument on an equal-weight game with distinct
/// occurring eigenvalues. Uses S_n for n <= 5 and the cyclic group beyond.
inline Rational equal_weight_steps(const Game& base, DerivationTrace& trace) {
    const auto idx = support(base);
    const std::size_t n = idx.size();
    std::vector<Rational> eig;
    Rational sum = 0;
    for (const auto& i : idx) {
        eig.push_back(base.observable.eigenvalue(i));
        sum += occurring_value(base, eig.back());
    }
    const bool full = n <= 5;
    auto emit_generator = [&](auto sigma, const std::string& name) {
        SpectrumMap f = spectrum_map(base.observable, [](const Rational& x) { return x; });
        for (std::size_t p = 0; p < n; ++p) f[eig[p]] = eig[sigma(p)];
        RewriteStep sym = apply_state_symmetry(base, f);
        RewriteStep pet = apply_pet(sym.after, inverse(f));
        trace.add(std::move(sym), "V(G)", "V(psi, " + name + "(X), P)");
        trace.add(std::move(pet), "V(psi, " + name + "(X), P)", "V(psi, X, P o " + name + ")");
    };
    if (n >= 2) emit_generator([n](std::size_t p) { return (p + 1) % n; }, "cycle");
    if (full && n >= 3) emit_generator([](std::size_t p) { return p < 2 ? 1 - p : p; }, "swap");

    std::size_t family = n;
    Rational per_value = 1;
    if (full) {
        family = 1;
        for (std::size_t k = 2; k <= n; ++k) family *= k;
        per_value = Rational(static_cast<long long>(family / n));
    }
    const Rational constant = per_value * sum;
    trace.add(PermutationAverageUse{base, full, constant, family},
              Claim{"sum over " + std::to_string(family) + " permuted payoffs of V(psi, X, P_pi) = " +
                        std::to_string(family) + " V(G)",
                    Relation::Equal, "V(constant " + str(constant) + ") = " + str(constant)});
    return sum / Rational(static_cast<long long>(n));
}

inline std::vector<Rational> checked_weights(const std::vector<Rational>& weights, const std::vector<Rational>& values) {
    if (weights.size() != values.size()) throw InputError("weights and values differ in length");
    if (weights.empty()) throw EmptyGameError("a game needs at least one branch");
    Rational total = 0;
    for (const auto& w : weights) {
        if (w <= 0) throw InvalidGameError("weights must be positive, got " + to_string(w));
        total += w;
    }
    if (total != 1) throw InvalidGameError("weights sum to " + to_string(total) + ", not 1");
    return weights;
}

inline BigInt common_denominator(const std::vector<Rational>& weights) {
    BigInt d = 1;
    for (const auto& w : weights) d = lcm(d, denominator(w));
    return d;
}

}  // namespace detail

/// Traces V(psi, X, P + k) = V(psi, X, P) + k for a game with numeric payoffs.
inline ShiftDerivation additivity_lemma(const Game& g, const Rational& k) {
    detail::require_valued(g);
    ShiftDerivation out;
    detail::additivity_lemma_steps(g, k, out.trace, &out.shifted);
    out.trace.conclusion = Claim{"V(G + " + to_string(k) + ")", Relation::Equal, "V(G) + " + to_string(k)};
    return out;
}

/// Equal-amplitude two-branch game with payoff P(x) = x: V = (x1 + x2) / 2.
///
/// Phases are first stripped with a diagonal unitary (operator symmetry).
/// If the observable has basis vectors off the support they are given
/// eigenvalues symmetric about the midpoint (operator equivalence) so the
/// reflection f(x) = -x + x1 + x2 permutes a non-degenerate spectrum.
inline ValueDerivation derive_stage1(const Game& g) {
    detail::require_valued(g);
    const auto sup = support(g);
    if (sup.size() != 2) throw PreconditionError("stage 1 needs exactly two occurring branches");
    if (g.state.at(sup[0]).weight() != g.state.at(sup[1]).weight()) {
        throw PreconditionError("stage 1 needs equal weights; the reflection symmetry fails otherwise");
    }
    for (const auto& x : occurring_spectrum(g)) {
        if (detail::occurring_value(g, x) != x) throw PreconditionError("stage 1 expects the payoff P(x) = x");
    }
    const Rational x1 = g.observable.eigenvalue(sup[0]);
    const Rational x2 = g.observable.eigenvalue(sup[1]);
    ValueDerivation out;
    if (x1 == x2) {
        out.trace.add(DominanceUse{g, detail::constant_payoff(g, x1)},
                      Claim{"V(G)", Relation::GreaterEqual, "V(constant " + to_string(x1) + ")"});
        out.trace.add(DominanceUse{detail::constant_payoff(g, x1), g},
                      Claim{"V(constant " + to_string(x1) + ")", Relation::GreaterEqual, "V(G)"});
        out.value = x1;
        out.trace.conclusion = Claim{"V(G)", Relation::Equal, to_string(x1)};
        return out;
    }
    const Rational k = x1 + x2;
    Game cur = g;

    if (g.state.at(sup[0]).phase() != 0 || g.state.at(sup[1]).phase() != 0) {
        std::map<BasisIndex, BasisIndex> id;
        std::map<BasisIndex, Rational> phases;
        for (const auto& [i, _] : cur.observable.eigen) id.emplace(i, i);
        for (const auto& i : sup) phases.emplace(i, -cur.state.at(i).phase());
        RewriteStep step = apply_op_symmetry(cur, GeneralizedPermutation(std::move(id), std::move(phases)));
        cur = step.after;
        out.trace.add(std::move(step), "V(psi, X)", "V(U psi, X)");
    }

    if (cur.observable.eigen.size() != 2) {
        const Rational mid = k / 2;
        const Rational step_size = abs(x2 - x1);
        Observable x_new;
        Payoff p_new;
        std::vector<BasisIndex> extras;
        for (const auto& [i, _] : cur.observable.eigen) {
            if (i == sup[0] || i == sup[1]) continue;
            extras.push_back(i);
        }
        x_new.eigen.emplace(sup[0], x1);
        x_new.eigen.emplace(sup[1], x2);
        for (std::size_t e = 0; e < extras.size(); ++e) {
            const Rational offset = step_size * Rational(static_cast<long long>(e / 2 + 1));
            Rational x = mid;
            if (e + 1 < extras.size() || extras.size() % 2 == 0) x = (e % 2 == 0) ? Rational(mid - offset) : Rational(mid + offset);
            x_new.eigen.emplace(extras[e], x);
        }
        for (const auto& x : x_new.spectrum()) p_new.emplace(x, numeric(x));
        RewriteStep step = apply_oet(cur, x_new, p_new);
        cur = step.after;
        out.trace.add(std::move(step), "V(psi, X)", "V(psi, X')");
    }

    const Game negated = detail::map_payoff_values(cur, [](const Rational& v) { return Rational(-v); });
    out.trace.add(ZeroSumUse{cur, negated}, Claim{"V(psi, X, -P)", Relation::Equal, "-V(psi, X, P)"});
    RewriteStep flip = apply_pet(negated, detail::spectrum_map(negated.observable, [](const Rational& x) { return Rational(-x); }));
    const Game reflected = flip.after;
    out.trace.add(std::move(flip), "V(psi, X, -P)", "V(psi, -X)");
    const Game shifted = detail::additivity_lemma_steps(reflected, k, out.trace);

    RewriteStep sym = apply_state_symmetry(
        cur, detail::spectrum_map(cur.observable, [&](const Rational& x) { return Rational(k - x); }));
    if (sym.after.observable != shifted.observable || !equivalent(sym.after, shifted)) {
        throw SoundnessError("stage 1: reflected game does not match the shifted game");
    }
    out.trace.add(std::move(sym), "V(psi, X)", "V(psi, -X + " + to_string(k) + ")");
    out.value = k / 2;
    out.trace.conclusion = Claim{"V(psi, X)", Relation::Equal,
                                 "-V(psi, X) + " + to_string(k) + ", hence " + to_string(out.value)};
    return out;
}

inline ValueDerivation derive_stage1(const Rational& x1, const Rational& x2) {
    const Rational half(1, 2);
    return derive_stage1(numeric_game({half, half}, {x1, x2}));
}

/// V of the equal superposition of n eigenstates with the given payoff values.
inline ValueDerivation derive_equal_weight(std::size_t n, const std::vector<Rational>& values) {
    if (n == 0) throw EmptyGameError("equal-weight game needs at least one branch");
    if (values.size() != n) throw InputError("expected " + std::to_string(n) + " values");
    const Rational w(1, static_cast<long long>(n));
    ValueDerivation out;
    const Game base = detail::standard_game(std::vector<Rational>(n, w), values);
    out.value = detail::equal_weight_steps(base, out.trace);
    out.trace.conclusion = Claim{"V(G)", Relation::Equal, to_string(out.value)};
    return out;
}

/// V of a rationally weighted game: fan each branch of weight m_i / N out into
/// m_i sub-branches of weight 1/N, then average over permutations.
inline ValueDerivation derive_rational_weights(const std::vector<Rational>& weights, const std::vector<Rational>& values,
                                               std::size_t max_fanout = kDefaultMaxFanout) {
    detail::checked_weights(weights, values);
    const BigInt big_n = detail::common_denominator(weights);
    if (big_n > max_fanout) {
        throw SizeError("common denominator " + big_n.str() + " exceeds the fan-out limit " + std::to_string(max_fanout));
    }
    const Game g = detail::standard_game(weights, values);
    ValueDerivation out;

    SetParams fan;
    Game fine;  // equal-weight, non-degenerate
    SpectrumMap collapse;
    long long next = 1;
    const Rational unit(BigInt(1), big_n);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const BasisIndex idx = std::to_string(j + 1);
        const Rational block(static_cast<long long>(j + 1));
        const long long m = static_cast<long long>(numerator(Rational(weights[j] * Rational(big_n))));
        for (long long t = 1; t <= m; ++t) {
            const BasisIndex sub = idx + "." + std::to_string(t);
            fan.images[idx].push_back({sub, Amplitude(Rational(1, m))});
            const Rational x(next++);
            fine.state.emplace(sub, Amplitude(unit));
            fine.observable.eigen.emplace(sub, x);
            fine.payoff.emplace(x, numeric(values[j]));
            collapse.emplace(x, block);
        }
    }
    RewriteStep set = apply_set(g, fan);
    RewriteStep pet = apply_pet(fine, collapse);
    if (!(set.after == pet.after)) throw SoundnessError("fan-out and degenerate relabeling disagree");
    out.trace.add(std::move(set), "V(G)", "V(psi', f(Y))");
    out.trace.add(std::move(pet), "V(phi, Y)", "V(psi', f(Y))");
    out.value = detail::equal_weight_steps(fine, out.trace);
    out.trace.conclusion = Claim{"V(G)", Relation::Equal, to_string(out.value)};
    return out;
}

/// Value of a game with numeric consequences, as a certified interval.
///
/// The game is first reduced to its distinct values and their weights (GET
/// via PET, SET and OET, with Dominance merging distinct labels of equal
/// value). Rational weights with a common denominator within `max_fanout`
/// are then derived exactly; otherwise the value is sandwiched between two
/// dyadic truncations whose remainder pays the smallest (largest) value.
inline IntervalDerivation derive_value(const Game& g, const Precision& prec,
                                       std::size_t max_fanout = kDefaultMaxFanout) {
    detail::require_valued(g);
    IntervalDerivation out;

    const Game g_num = detail::map_payoff_values(g, [](const Rational& v) { return v; });
    if (!(g_num == g)) {
        out.trace.add(DominanceUse{g, g_num}, Claim{"V(G)", Relation::GreaterEqual, "V(G_num)"});
        out.trace.add(DominanceUse{g_num, g}, Claim{"V(G_num)", Relation::GreaterEqual, "V(G)"});
    }
    const CanonicalGame cg = canonicalize(g_num);
    std::vector<Rational> weights, values;
    for (const auto& b : cg.branches) {
        weights.push_back(b.weight);
        values.push_back(*b.consequence.value);
    }

    const Game standard = detail::standard_game(weights, values);
    std::map<Rational, Rational> block_of_value;
    for (std::size_t j = 0; j < values.size(); ++j) block_of_value.emplace(values[j], Rational(static_cast<long long>(j + 1)));
    const auto occurring = occurring_spectrum(g_num);
    SpectrumMap collapse = detail::spectrum_map(g_num.observable, [&](const Rational& x) {
        return occurring.contains(x) ? block_of_value.at(detail::occurring_value(g_num, x)) : Rational(0);
    });
    RewriteStep pet = apply_pet(g_num, collapse);
    const Game collapsed = pet.after;
    SetParams spread;
    for (const auto& a : support(collapsed)) {
        const Rational& j = collapsed.observable.eigenvalue(a);
        const Amplitude& amp = collapsed.state.at(a);
        const std::size_t block = static_cast<std::size_t>(static_cast<long long>(numerator(j)) - 1);
        spread.images[std::to_string(block + 1)].push_back({a, Amplitude(amp.weight() / weights[block], amp.phase())});
    }
    for (const auto& [i, x] : collapsed.observable.eigen) {
        auto it = collapsed.state.find(i);
        if (it == collapsed.state.end() || it->second.is_zero()) spread.extra.emplace(i, x);
    }
    RewriteStep set = apply_set(standard, spread);
    RewriteStep oet = apply_oet(set.after, collapsed.observable, collapsed.payoff);
    if (!(oet.after == collapsed)) throw SoundnessError("canonical reduction does not close");
    out.trace.add(std::move(pet), "V(G_num)", "V(psi, f(X), P o f^-1)");
    out.trace.add(std::move(set), "V(G_canonical)", "V(psi, X'')");
    out.trace.add(std::move(oet), "V(psi, X'')", "V(psi, f(X), P o f^-1)");

    const BigInt denom = detail::common_denominator(weights);
    if (denom <= max_fanout) {
        ValueDerivation exact = derive_rational_weights(weights, values, max_fanout);
        out.trace.append(exact.trace);
        out.lower = out.upper = exact.value;
        out.trace.conclusion = Claim{"V(G)", Relation::Equal, to_string(exact.value)};
        return out;
    }

    const Rational v_min = *std::min_element(values.begin(), values.end());
    const Rational v_max = *std::max_element(values.begin(), values.end());
    std::vector<Rational> head;
    BigInt scale = 1;
    for (;;) {
        if (scale > max_fanout) {
            throw PreconditionError("precision " + to_string(prec.epsilon()) + " unreachable within fan-out limit " +
                                    std::to_string(max_fanout));
        }
        head.clear();
        Rational kept = 0;
        for (const auto& w : weights) {
            head.push_back(Rational(floor_div(w * Rational(scale)), scale));
            kept += head.back();
        }
        if ((Rational(1) - kept) * (v_max - v_min) <= prec.epsilon()) break;
        scale *= 2;
    }

    // Split every branch into a dyadic head and a remainder.
    SetParams split;
    Game fine;
    SpectrumMap merge;
    std::vector<Rational> remainder_eigen;
    long long next = 1;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const BasisIndex idx = std::to_string(j + 1);
        const Rational block(static_cast<long long>(j + 1));
        const Rational rest = weights[j] - head[j];
        auto add = [&](const std::string& suffix, const Rational& part, bool is_rest) {
            if (part == 0) return;
            const BasisIndex sub = idx + suffix;
            split.images[idx].push_back({sub, Amplitude(part / weights[j])});
            const Rational x(next++);
            fine.state.emplace(sub, Amplitude(part));
            fine.observable.eigen.emplace(sub, x);
            fine.payoff.emplace(x, numeric(values[j]));
            merge.emplace(x, block);
            if (is_rest) remainder_eigen.push_back(x);
        };
        add(".head", head[j], false);
        add(".rest", rest, true);
    }
    RewriteStep split_step = apply_set(standard, split);
    RewriteStep merge_step = apply_pet(fine, merge);
    if (!(split_step.after == merge_step.after)) throw SoundnessError("sandwich split does not close");
    out.trace.add(std::move(split_step), "V(G_canonical)", "V(psi_split, X)");
    out.trace.add(std::move(merge_step), "V(psi_split, Y)", "V(psi_split, X)");

    auto truncated = [&](const Rational& tail) {
        Game t = fine;
        for (const auto& x : remainder_eigen) t.payoff[x] = numeric(tail);
        return t;
    };
    const Game lower_game = truncated(v_min);
    const Game upper_game = truncated(v_max);
    out.trace.add(DominanceUse{fine, lower_game}, Claim{"V(G)", Relation::GreaterEqual, "V(G_lower)"});
    out.trace.add(DominanceUse{upper_game, fine}, Claim{"V(G_upper)", Relation::GreaterEqual, "V(G)"});
    IntervalDerivation lo = derive_value(lower_game, prec, max_fanout);
    IntervalDerivation hi = derive_value(upper_game, prec, max_fanout);
    out.trace.append(lo.trace);
    out.trace.append(hi.trace);
    out.lower = lo.lower;
    out.upper = hi.upper;
    out.trace.conclusion = Claim{to_string(out.lower) + " <= V(G)", Relation::LessEqual, to_string(out.upper)};
    return out;
}

/// Bounds on EU when only the n heaviest branches are kept and the tail is
/// paid the smallest (largest) admissible value.
inline std::pair<Rational, Rational> truncate_bounds(const Game& g, std::size_t n, const Rational& v_min,
                                                     const Rational& v_max) {
    if (n == 0) throw InputError("truncation needs n >= 1");
    detail::require_valued(g);
    struct Branch {
        BasisIndex index;
        Rational weight;
        Rational value;
    };
    std::vector<Branch> branches;
    for (const auto& i : support(g)) {
        const Rational& v = detail::occurring_value(g, g.observable.eigenvalue(i));
        if (v < v_min || v > v_max) {
            throw PreconditionError("occurring value " + to_string(v) + " lies outside [" + to_string(v_min) + ", " +
                                    to_string(v_max) + "]");
        }
        branches.push_back({i, g.state.at(i).weight(), v});
    }
    std::stable_sort(branches.begin(), branches.end(),
                     [](const Branch& a, const Branch& b) { return a.weight > b.weight; });
    Rational head = 0;
    Rational tail = 0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        if (b < n) head += branches[b].weight * branches[b].value;
        else tail += branches[b].weight;
    }
    return {head + tail * v_min, head + tail * v_max};
}

/// Derives a composite game's value by deriving each nested game, then
/// substituting those values as consequences.
inline IntervalDerivation derive_composite_value(const CompositeGame& cg, const Precision& prec,
                                                 std::size_t max_fanout = kDefaultMaxFanout) {
    IntervalDerivation out;
    Game substituted{cg.state, cg.observable, {}};
    std::map<Rational, Rational> nested_values;
    for (const auto& [x, outcome] : cg.payoff) {
        if (const auto* leaf = std::get_if<Consequence>(&outcome)) {
            substituted.payoff.emplace(x, *leaf);
            continue;
        }
        const auto& nested = std::get<std::shared_ptr<const CompositeGame>>(outcome);
        IntervalDerivation inner = derive_composite_value(*nested, prec, max_fanout);
        if (inner.lower != inner.upper) {
            throw PreconditionError("substitution needs an exact value for the nested game at " + to_string(x));
        }
        out.trace.append(inner.trace);
        nested_values.emplace(x, inner.lower);
        substituted.payoff.emplace(x, numeric(inner.lower));
    }
    if (!nested_values.empty()) {
        out.trace.add(SubstitutivityUse{cg, substituted, nested_values},
                      Claim{"V(composite)", Relation::Equal, "V(substituted)"});
    }
    IntervalDerivation top = derive_value(substituted, prec, max_fanout);
    out.trace.append(top.trace);
    out.lower = top.lower;
    out.upper = top.upper;
    out.trace.conclusion = top.trace.conclusion;
    return out;
}

}  // namespace qgame
