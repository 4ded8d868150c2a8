#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/generalized_permutation.hpp"
#include "qgame/rational.hpp"

namespace qgame {

enum class Rule { PET, MET, OpSymmetry, StateSymmetry, OET, SET };

inline std::string to_string(Rule r) {
    switch (r) {
        case Rule::PET: return "PET";
        case Rule::MET: return "MET";
        case Rule::OpSymmetry: return "OpSymmetry";
        case Rule::StateSymmetry: return "StateSymmetry";
        case Rule::OET: return "OET";
        case Rule::SET: return "SET";
    }
    return "?";
}

/// A function on (part of) the spectrum, given pointwise.
using SpectrumMap = std::map<Rational, Rational>;

struct PetParams {
    SpectrumMap f;
    friend bool operator==(const PetParams&, const PetParams&) = default;
};

struct MetParams {
    GeneralizedPermutation u;
    SpectrumMap pi;
    friend bool operator==(const MetParams&, const MetParams&) = default;
};

struct OpSymmetryParams {
    GeneralizedPermutation u;
    friend bool operator==(const OpSymmetryParams&, const OpSymmetryParams&) = default;
};

struct StateSymmetryParams {
    SpectrumMap f;
    friend bool operator==(const StateSymmetryParams&, const StateSymmetryParams&) = default;
};

struct OetParams {
    Observable observable;
    Payoff payoff;
    friend bool operator==(const OetParams&, const OetParams&) = default;
};

/// One component of the image of an old basis vector in the new space.
struct ImageComponent {
    BasisIndex target;
    Amplitude share;
    friend bool operator==(const ImageComponent&, const ImageComponent&) = default;
};

/// Carries each old basis vector |a> to a unit vector sum_k share_k |target_k>
/// in the same eigensubspace of the new observable. A plain relabeling has a
/// single component of share (1, 0); several components fan the branch out
/// over a degenerate eigensubspace. `extra` lists the remaining basis vectors
/// of the new space with their eigenvalues.
struct SetParams {
    std::map<BasisIndex, std::vector<ImageComponent>> images;
    std::map<BasisIndex, Rational> extra;
    friend bool operator==(const SetParams&, const SetParams&) = default;
};

inline SetParams make_relabeling(const std::map<BasisIndex, BasisIndex>& relabel,
                                 std::map<BasisIndex, Rational> extra = {}) {
    SetParams p;
    for (const auto& [from, to] : relabel) p.images[from].push_back({to, Amplitude(1)});
    p.extra = std::move(extra);
    return p;
}

using RewriteParams = std::variant<PetParams, MetParams, OpSymmetryParams, StateSymmetryParams, OetParams, SetParams>;

/// A checked application of one equivalence theorem.
struct RewriteStep {
    Rule rule;
    RewriteParams params;
    Game before;
    Game after;
};

namespace detail {

inline const Rational& lookup(const SpectrumMap& f, const Rational& x, const char* what) {
    auto it = f.find(x);
    if (it == f.end()) throw PreconditionError(std::string(what) + " undefined on eigenvalue " + to_string(x));
    return it->second;
}

/// Requires f to be a bijection of `spectrum` onto itself.
inline void require_spectrum_permutation(const SpectrumMap& f, const std::set<Rational>& spectrum, const char* what) {
    std::set<Rational> image;
    for (const auto& x : spectrum) {
        const Rational& y = lookup(f, x, what);
        if (!spectrum.contains(y)) {
            throw PreconditionError(std::string(what) + " maps " + to_string(x) + " outside the spectrum");
        }
        image.insert(y);
    }
    if (image.size() != spectrum.size()) throw PreconditionError(std::string(what) + " is not a permutation of the spectrum");
}

inline void require_covers_observable(const GeneralizedPermutation& u, const Observable& obs) {
    if (u.domain() != obs.indices()) {
        throw PreconditionError("unitary must act on exactly the observable's basis");
    }
}

inline RewriteStep checked(Rule rule, RewriteParams params, const Game& before, Game after) {
    if (canonicalize(before) != canonicalize(after)) {
        throw SoundnessError(to_string(rule) + " rewrite changed the canonical form");
    }
    return RewriteStep{rule, std::move(params), before, std::move(after)};
}

}  // namespace detail

/// Payoff equivalence: <psi, X, P> ~ <psi, f(X), P∘f^-1> whenever
/// f(x_a) = f(x_b) implies P(x_a) = P(x_b) on the occurring spectrum.
/// f must be given on the whole spectrum of X.
inline RewriteStep apply_pet(const Game& g, const SpectrumMap& f) {
    validate(g);
    const auto occurring = occurring_spectrum(g);
    std::map<Rational, Rational> first_preimage;
    for (const auto& x : occurring) {
        const Rational& z = detail::lookup(f, x, "f");
        auto [it, fresh] = first_preimage.try_emplace(z, x);
        if (!fresh && g.payoff.at(it->second) != g.payoff.at(x)) {
            throw PreconditionError("f identifies eigenvalues " + to_string(it->second) + " and " + to_string(x) +
                                    " whose payoffs differ");
        }
    }
    Game after{g.state, {}, {}};
    for (const auto& [i, x] : g.observable.eigen) after.observable.eigen.emplace(i, detail::lookup(f, x, "f"));
    for (const auto& [z, x] : first_preimage) after.payoff.emplace(z, g.payoff.at(x));
    // Off-support eigenvalues keep some payoff so the game stays total where it was.
    for (const auto& [x, c] : g.payoff) {
        auto it = f.find(x);
        if (it != f.end()) after.payoff.try_emplace(it->second, c);
    }
    return detail::checked(Rule::PET, PetParams{f}, g, std::move(after));
}

/// Measurement equivalence: u carries the x-eigensubspace onto the pi(x)
/// eigensubspace; the image game is <U psi, pi^-1(X), P>.
inline RewriteStep apply_met(const Game& g, const GeneralizedPermutation& u, const SpectrumMap& pi) {
    validate(g);
    const Observable& obs = g.observable;
    const auto spectrum = obs.spectrum();
    detail::require_covers_observable(u, obs);
    detail::require_spectrum_permutation(pi, spectrum, "pi");
    for (const auto& x : spectrum) {
        const Rational& y = pi.at(x);
        if (obs.eigensubspace(x).size() != obs.eigensubspace(y).size()) {
            throw PreconditionError("dimension mismatch between eigensubspaces of " + to_string(x) + " and " +
                                    to_string(y));
        }
    }
    for (const auto& [i, x] : obs.eigen) {
        if (obs.eigenvalue(u.target(i)) != pi.at(x)) {
            throw PreconditionError("u sends " + i + " outside the " + to_string(pi.at(x)) + "-eigensubspace");
        }
    }
    SpectrumMap pi_inv;
    for (const auto& [x, y] : pi) pi_inv.emplace(y, x);
    Game after{apply_gperm(u, g.state), {}, g.payoff};
    for (const auto& [j, y] : obs.eigen) after.observable.eigen.emplace(j, pi_inv.at(y));
    return detail::checked(Rule::MET, MetParams{u, pi}, g, std::move(after));
}

/// Operator symmetry: a u preserving every eigensubspace leaves the value unchanged.
inline RewriteStep apply_op_symmetry(const Game& g, const GeneralizedPermutation& u) {
    validate(g);
    detail::require_covers_observable(u, g.observable);
    for (const auto& [i, x] : g.observable.eigen) {
        if (g.observable.eigenvalue(u.target(i)) != x) {
            throw PreconditionError("u moves " + i + " across eigensubspaces");
        }
    }
    Game after{apply_gperm(u, g.state), g.observable, g.payoff};
    return detail::checked(Rule::OpSymmetry, OpSymmetryParams{u}, g, std::move(after));
}

/// The basis permutation U_f induced by a spectrum permutation f of a
/// non-degenerate observable: |lambda_a> -> |lambda_b> with x_b = f(x_a).
inline std::map<BasisIndex, BasisIndex> induced_permutation(const Observable& obs, const SpectrumMap& f) {
    std::map<Rational, BasisIndex> by_value;
    for (const auto& [i, x] : obs.eigen) by_value.emplace(x, i);
    std::map<BasisIndex, BasisIndex> out;
    for (const auto& [i, x] : obs.eigen) out.emplace(i, by_value.at(detail::lookup(f, x, "f")));
    return out;
}

/// State symmetry: if U_f psi = psi exactly then <psi, X, P> ~ <psi, f(X), P>.
inline RewriteStep apply_state_symmetry(const Game& g, const SpectrumMap& f) {
    validate(g);
    const Observable& obs = g.observable;
    if (obs.is_degenerate()) throw PreconditionError("state symmetry needs a non-degenerate observable");
    detail::require_spectrum_permutation(f, obs.spectrum(), "f");
    for (const auto& [i, a] : g.state) {
        if (!a.is_zero() && !obs.contains(i)) throw PreconditionError("state index " + i + " outside observable basis");
    }
    const auto uf = induced_permutation(obs, f);
    auto amp = [&](const BasisIndex& i) {
        auto it = g.state.find(i);
        return it == g.state.end() ? Amplitude() : it->second;
    };
    for (const auto& [from, to] : uf) {
        if (amp(from) != amp(to)) {
            throw PreconditionError("state is not invariant under U_f: amplitude at " + from + " is " +
                                    to_string(amp(from)) + " but at " + to + " is " + to_string(amp(to)));
        }
    }
    Game after{g.state, {}, g.payoff};
    for (const auto& [i, x] : obs.eigen) after.observable.eigen.emplace(i, f.at(x));
    return detail::checked(Rule::StateSymmetry, StateSymmetryParams{f}, g, std::move(after));
}

/// Operator equivalence: observables agreeing on the state's support, with
/// payoffs agreeing on the occurring spectrum, give equal games.
inline RewriteStep apply_oet(const Game& g, const Observable& x_new, const Payoff& p_new) {
    validate(g);
    for (const auto& i : support(g)) {
        if (!x_new.contains(i) || x_new.eigenvalue(i) != g.observable.eigenvalue(i)) {
            throw PreconditionError("new observable disagrees with the old one at occurring index " + i);
        }
    }
    for (const auto& x : occurring_spectrum(g)) {
        auto it = p_new.find(x);
        if (it == p_new.end() || it->second != g.payoff.at(x)) {
            throw PreconditionError("new payoff disagrees on occurring eigenvalue " + to_string(x));
        }
    }
    Game after{g.state, x_new, p_new};
    return detail::checked(Rule::OET, OetParams{x_new, p_new}, g, std::move(after));
}

/// State equivalence: moves the game into a new index space, each old basis
/// vector going to a unit vector of the same eigenvalue.
inline RewriteStep apply_set(const Game& g, const SetParams& params) {
    validate(g);
    std::set<BasisIndex> used;
    for (const auto& [from, comps] : params.images) {
        if (comps.empty()) throw PreconditionError("empty image for basis index " + from);
        Rational norm = 0;
        for (const auto& c : comps) {
            if (!used.insert(c.target).second) {
                throw PreconditionError("relabeling is not injective: " + c.target + " is hit twice");
            }
            norm += c.share.weight();
        }
        if (norm != 1) throw PreconditionError("image of " + from + " has squared norm " + to_string(norm));
    }
    for (const auto& [i, _] : params.extra) {
        if (used.contains(i)) throw PreconditionError("extra index " + i + " collides with an image");
    }
    Game after{{}, {}, g.payoff};
    for (const auto& [from, comps] : params.images) {
        if (!g.observable.contains(from)) throw PreconditionError("relabeled index " + from + " has no eigenvalue");
        const Rational& x = g.observable.eigenvalue(from);
        auto it = g.state.find(from);
        for (const auto& c : comps) {
            after.observable.eigen.emplace(c.target, x);
            if (it != g.state.end() && !it->second.is_zero()) after.state.emplace(c.target, amp_mul(it->second, c.share));
        }
    }
    for (const auto& i : support(g)) {
        if (!params.images.contains(i)) throw PreconditionError("occurring index " + i + " is not relabeled");
    }
    for (const auto& [i, x] : params.extra) after.observable.eigen.emplace(i, x);
    return detail::checked(Rule::SET, params, g, std::move(after));
}

inline RewriteStep apply_rewrite(const Game& g, const RewriteParams& params) {
    return std::visit(
        [&](const auto& p) -> RewriteStep {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PetParams>) return apply_pet(g, p.f);
            else if constexpr (std::is_same_v<P, MetParams>) return apply_met(g, p.u, p.pi);
            else if constexpr (std::is_same_v<P, OpSymmetryParams>) return apply_op_symmetry(g, p.u);
            else if constexpr (std::is_same_v<P, StateSymmetryParams>) return apply_state_symmetry(g, p.f);
            else if constexpr (std::is_same_v<P, OetParams>) return apply_oet(g, p.observable, p.payoff);
            else return apply_set(g, p);
        },
        params);
}

/// Re-runs a recorded step from its parameters and confirms it reproduces the
/// recorded image. Throws on any mismatch.
inline void replay(const RewriteStep& step) {
    const RewriteStep again = apply_rewrite(step.before, step.params);
    if (again.rule != step.rule) throw SoundnessError("recorded rule does not match its parameters");
    if (again.after != step.after) throw SoundnessError(to_string(step.rule) + " replay produced a different game");
}

inline bool equivalent(const Game& g1, const Game& g2) { return canonicalize(g1) == canonicalize(g2); }

}  // namespace qgame
