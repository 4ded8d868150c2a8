#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "qgame/amplitude.hpp"
#include "qgame/errors.hpp"
#include "qgame/rational.hpp"

namespace qgame {

/// Opaque label of a vector of the decoherence-preferred basis.
using BasisIndex = std::string;

/// Amplitudes keyed by basis index; absent indices carry amplitude zero.
using State = std::map<BasisIndex, Amplitude>;

/// A permutation of basis vectors followed by a diagonal phase:
/// |i> -> exp(2 pi i phase(i)) |target(i)>.
///
/// This is the whole class of unitaries the equivalence theorems need:
/// eigensubspace permutations, relabelings and diagonal phase operators.
class GeneralizedPermutation {
public:
    GeneralizedPermutation() = default;

    GeneralizedPermutation(std::map<BasisIndex, BasisIndex> target, std::map<BasisIndex, Rational> phases = {})
        : target_(std::move(target)), phases_(std::move(phases)) {
        std::set<BasisIndex> image;
        for (const auto& [from, to] : target_) {
            if (!target_.contains(to)) {
                throw DomainMismatchError("generalized permutation maps " + from + " outside its index set (" + to + ")");
            }
            if (!image.insert(to).second) {
                throw DomainMismatchError("generalized permutation is not injective at " + to);
            }
        }
        for (auto& [index, turns] : phases_) {
            if (!target_.contains(index)) {
                throw DomainMismatchError("phase given for index " + index + " outside the permutation domain");
            }
            turns = mod_one(turns);
        }
        std::erase_if(phases_, [](const auto& kv) { return kv.second == 0; });
    }

    static GeneralizedPermutation identity(const std::set<BasisIndex>& indices) {
        std::map<BasisIndex, BasisIndex> t;
        for (const auto& i : indices) t.emplace(i, i);
        return GeneralizedPermutation(std::move(t));
    }

    bool contains(const BasisIndex& i) const { return target_.contains(i); }

    const BasisIndex& target(const BasisIndex& i) const {
        auto it = target_.find(i);
        if (it == target_.end()) throw DomainMismatchError("index " + i + " outside generalized permutation domain");
        return it->second;
    }

    Rational phase(const BasisIndex& i) const {
        auto it = phases_.find(i);
        return it == phases_.end() ? Rational(0) : it->second;
    }

    const std::map<BasisIndex, BasisIndex>& targets() const { return target_; }
    const std::map<BasisIndex, Rational>& phases() const { return phases_; }

    std::set<BasisIndex> domain() const {
        std::set<BasisIndex> d;
        for (const auto& [i, _] : target_) d.insert(i);
        return d;
    }

    bool is_identity() const {
        for (const auto& [from, to] : target_) {
            if (from != to || phase(from) != 0) return false;
        }
        return true;
    }

    friend bool operator==(const GeneralizedPermutation&, const GeneralizedPermutation&) = default;

private:
    std::map<BasisIndex, BasisIndex> target_;
    std::map<BasisIndex, Rational> phases_;  // zero phases may be omitted
};

/// Applies u to a state: the amplitude at u.target(i) is state(i) rotated by u.phase(i).
inline State apply_gperm(const GeneralizedPermutation& u, const State& state) {
    State out;
    for (const auto& [index, amp] : state) {
        if (!u.contains(index)) {
            throw DomainMismatchError("state index " + index + " outside generalized permutation domain");
        }
        out.emplace(u.target(index), amp.rotated(u.phase(index)));
    }
    return out;
}

/// outer ∘ inner: apply inner first. Both must act on the same index set.
inline GeneralizedPermutation compose(const GeneralizedPermutation& outer, const GeneralizedPermutation& inner) {
    if (outer.domain() != inner.domain()) {
        throw DomainMismatchError("cannot compose generalized permutations on different index sets");
    }
    std::map<BasisIndex, BasisIndex> t;
    std::map<BasisIndex, Rational> ph;
    for (const auto& [i, mid] : inner.targets()) {
        t.emplace(i, outer.target(mid));
        Rational turns = inner.phase(i) + outer.phase(mid);
        if (turns != 0) ph.emplace(i, std::move(turns));
    }
    return GeneralizedPermutation(std::move(t), std::move(ph));
}

}  // namespace qgame
