#pragma once

#include <string>

#include "qgame/errors.hpp"
#include "qgame/rational.hpp"

namespace qgame {

/// A branch amplitude stored as (|alpha|^2, arg(alpha) / 2pi).
///
/// Only products and permutations of amplitudes are ever needed, and both are
/// closed in this representation, so no square root is materialized and the
/// squared modulus stays an exact rational. There is deliberately no addition.
class Amplitude {
public:
    Amplitude() = default;

    explicit Amplitude(Rational weight, Rational phase = 0)
        : weight_(std::move(weight)), phase_(mod_one(phase)) {
        if (weight_ < 0) throw InputError("amplitude weight must be nonnegative, got " + to_string(weight_));
        if (weight_ == 0) phase_ = 0;
    }

    /// |alpha|^2.
    const Rational& weight() const { return weight_; }
    /// Fraction of a full turn, in [0, 1).
    const Rational& phase() const { return phase_; }

    bool is_zero() const { return weight_ == 0; }

    Amplitude rotated(const Rational& turns) const { return Amplitude(weight_, phase_ + turns); }

    friend bool operator==(const Amplitude& a, const Amplitude& b) {
        return a.weight_ == b.weight_ && a.phase_ == b.phase_;
    }

private:
    Rational weight_ = 0;
    Rational phase_ = 0;
};

inline Amplitude amp_mul(const Amplitude& a, const Amplitude& b) {
    return Amplitude(a.weight() * b.weight(), a.phase() + b.phase());
}

inline std::string to_string(const Amplitude& a) {
    return "(" + to_string(a.weight()) + ", " + to_string(a.phase()) + ")";
}

}  // namespace qgame
