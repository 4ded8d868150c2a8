#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/probability.hpp"
#include "qgame/rational.hpp"

namespace qgame {

using Gamble = std::vector<Rational>;

/// Probability vectors over a fixed list of consequences.
struct GambleTable {
    std::vector<Consequence> consequences;
    std::vector<Gamble> gambles;
};

using GamblePreference = std::function<Ordering(const Gamble&, const Gamble&)>;

inline Rational gamble_eu(const GambleTable& t, const Gamble& f) {
    Rational eu = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& c = t.consequences.at(i);
        if (!c.value) throw UnvaluedConsequenceError("consequence \"" + c.label + "\" has no numeric value");
        eu += f[i] * *c.value;
    }
    return eu;
}

inline GamblePreference eu_preference(const GambleTable& t) {
    return [t](const Gamble& f, const Gamble& g) { return compare_values(gamble_eu(t, f), gamble_eu(t, g)); };
}

inline Gamble mix(const Rational& lambda, const Gamble& f, const Gamble& g) {
    Gamble out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = lambda * f[i] + (Rational(1) - lambda) * g[i];
    return out;
}

struct VnmReport {
    bool vnm0 = true;  // gambles are probability vectors
    bool vnm1 = true;  // weak order
    bool vnm2 = true;  // independence under mixing
    bool vnm3 = true;  // continuity
    std::vector<std::string> counterexamples;

    bool all() const { return vnm0 && vnm1 && vnm2 && vnm3; }
};

inline constexpr int kContinuityDepth = 10;
inline constexpr std::size_t kMaxContinuityTriples = 200;

namespace detail {

inline std::string gamble_string(const Gamble& f) {
    std::string s = "(";
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? ", " : "") + to_string(f[i]);
    return s + ")";
}

inline bool weakly_prefers(const GamblePreference& pref, const Gamble& a, const Gamble& b) {
    return pref(a, b) != Ordering::Less;
}

}  // namespace detail

/// Checks the axioms on the order `pref` induces on the table.
///
/// VNM2 is tried for every strictly ordered pair against every table gamble
/// H and every lambda in {1/8, ..., 1}. VNM3 searches alpha and beta on the
/// dyadic grid of depth 10; a miss is reported as "not found at depth 10".
inline VnmReport vnm_check(const GambleTable& t, const GamblePreference& pref) {
    VnmReport r;
    const std::size_t k = t.consequences.size();
    for (std::size_t g = 0; g < t.gambles.size(); ++g) {
        const Gamble& f = t.gambles[g];
        Rational total = 0;
        bool nonneg = true;
        for (const auto& p : f) {
            total += p;
            nonneg = nonneg && p >= 0;
        }
        if (f.size() != k || !nonneg || total != 1) {
            r.vnm0 = false;
            r.counterexamples.push_back("VNM0: gamble " + std::to_string(g) + " is not a probability vector");
        }
    }
    if (!r.vnm0) return r;
    const auto& gs = t.gambles;
    const std::size_t n = gs.size();

    for (std::size_t a = 0; a < n && r.vnm1; ++a) {
        for (std::size_t b = 0; b < n && r.vnm1; ++b) {
            const Ordering ab = pref(gs[a], gs[b]);
            const Ordering ba = pref(gs[b], gs[a]);
            const bool mirrored = (ab == Ordering::Greater && ba == Ordering::Less) ||
                                  (ab == Ordering::Less && ba == Ordering::Greater) ||
                                  (ab == Ordering::Equivalent && ba == Ordering::Equivalent);
            if (!mirrored) {
                r.vnm1 = false;
                r.counterexamples.push_back("VNM1: gambles " + std::to_string(a) + " and " + std::to_string(b) +
                                            " are compared inconsistently");
                break;
            }
            for (std::size_t c = 0; c < n; ++c) {
                if (detail::weakly_prefers(pref, gs[a], gs[b]) && detail::weakly_prefers(pref, gs[b], gs[c]) &&
                    !detail::weakly_prefers(pref, gs[a], gs[c])) {
                    r.vnm1 = false;
                    r.counterexamples.push_back("VNM1: intransitive on gambles " + std::to_string(a) + ", " +
                                                std::to_string(b) + ", " + std::to_string(c));
                    break;
                }
            }
        }
    }

    for (std::size_t a = 0; a < n && r.vnm2; ++a) {
        for (std::size_t b = 0; b < n && r.vnm2; ++b) {
            if (pref(gs[a], gs[b]) != Ordering::Greater) continue;
            for (std::size_t h = 0; h < n && r.vnm2; ++h) {
                for (int e = 1; e <= 8; ++e) {
                    const Rational lambda = make_rational(e, 8);
                    if (pref(mix(lambda, gs[a], gs[h]), mix(lambda, gs[b], gs[h])) != Ordering::Greater) {
                        r.vnm2 = false;
                        r.counterexamples.push_back("VNM2: " + detail::gamble_string(gs[a]) + " > " +
                                                    detail::gamble_string(gs[b]) + " but not after mixing with " +
                                                    detail::gamble_string(gs[h]) + " at lambda " + to_string(lambda));
                        break;
                    }
                }
            }
        }
    }

    const long long steps = 1LL << kContinuityDepth;
    std::size_t triples = 0;
    for (std::size_t a = 0; a < n && r.vnm3; ++a) {
        for (std::size_t b = 0; b < n && r.vnm3; ++b) {
            if (pref(gs[a], gs[b]) != Ordering::Greater) continue;
            for (std::size_t c = 0; c < n && r.vnm3 && triples < kMaxContinuityTriples; ++c) {
                if (pref(gs[b], gs[c]) != Ordering::Greater) continue;
                ++triples;
                // alpha is looked for from the top of the grid, beta from the bottom.
                bool alpha = false, beta = false;
                for (long long j = steps - 1; j >= 1 && !alpha; --j) {
                    alpha = pref(mix(make_rational(j, steps), gs[a], gs[c]), gs[b]) == Ordering::Greater;
                }
                for (long long j = 1; j < steps && !beta; ++j) {
                    beta = pref(gs[b], mix(make_rational(j, steps), gs[a], gs[c])) == Ordering::Greater;
                }
                if (!(alpha && beta)) {
                    r.vnm3 = false;
                    r.counterexamples.push_back("VNM3: mixing weight for gambles " + std::to_string(a) + ", " +
                                                std::to_string(b) + ", " + std::to_string(c) + " not found at depth " +
                                                std::to_string(kContinuityDepth));
                }
            }
        }
    }
    return r;
}

inline VnmReport vnm_check(const GambleTable& t) { return vnm_check(t, eu_preference(t)); }

}  // namespace qgame
