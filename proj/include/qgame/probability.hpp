#pragma once

#include <algorithm>
#include <iterator>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qgame/amplitude.hpp"
#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/rational.hpp"

namespace qgame {

/// A game without its payoff: what is measured, and on which state.
struct Measurement {
    State state;
    Observable observable;

    friend bool operator==(const Measurement& a, const Measurement& b) {
        return same_state(a.state, b.state) && a.observable == b.observable;
    }
};

inline Measurement measurement_of(const Game& g) { return {g.state, g.observable}; }

inline std::set<Rational> occurring_spectrum(const Measurement& m) {
    return occurring_spectrum(Game{m.state, m.observable, {}});
}

/// Weight of each occurring eigenvalue.
inline std::map<Rational, Rational> outcome_weights(const Measurement& m) {
    std::map<Rational, Rational> w;
    for (const auto& [i, a] : m.state) {
        if (!a.is_zero()) w[m.observable.eigenvalue(i)] += a.weight();
    }
    return w;
}

/// A set of occurring outcomes of one measurement.
struct Event {
    Measurement measurement;
    std::set<Rational> members;
};

inline Event make_event(Measurement m, std::set<Rational> members) {
    const auto occ = occurring_spectrum(m);
    for (const auto& x : members) {
        if (!occ.contains(x)) throw InputError("event member " + to_string(x) + " is not an occurring outcome");
    }
    return Event{std::move(m), std::move(members)};
}

/// A bet on an event: `win` if the outcome lies in it, `lose` otherwise.
struct Bet {
    Event event;
    Consequence win;
    Consequence lose;
};

inline Bet make_bet(Event e, Consequence win, Consequence lose) {
    if (!win.value || !lose.value) throw UnvaluedConsequenceError("bet consequences need values");
    if (!(*win.value > *lose.value)) throw PreconditionError("a bet must pay more on winning than on losing");
    return Bet{std::move(e), std::move(win), std::move(lose)};
}

inline Rational event_weight(const Event& e) {
    Rational w = 0;
    for (const auto& [x, wx] : outcome_weights(e.measurement)) {
        if (e.members.contains(x)) w += wx;
    }
    return w;
}

/// Weight-zero events: the agent is indifferent about everything inside them.
inline bool is_null(const Event& e) { return event_weight(e) == 0; }

/// The game a bet amounts to.
inline Game bet_game(const Bet& b) {
    Game g{b.event.measurement.state, b.event.measurement.observable, {}};
    for (const auto& x : b.event.measurement.observable.spectrum()) {
        g.payoff.emplace(x, b.event.members.contains(x) ? b.win : b.lose);
    }
    return g;
}

enum class Ordering { Greater, Less, Equivalent };

inline std::string to_string(Ordering o) {
    switch (o) {
        case Ordering::Greater: return ">";
        case Ordering::Less: return "<";
        case Ordering::Equivalent: return "~";
    }
    return "?";
}

template <class T>
inline Ordering compare_values(const T& a, const T& b) {
    if (a > b) return Ordering::Greater;
    if (a < b) return Ordering::Less;
    return Ordering::Equivalent;
}

/// Qualitative probability. Events may belong to different measurements.
inline Ordering more_probable(const Event& e1, const Event& e2) {
    return compare_values(event_weight(e1), event_weight(e2));
}

/// Candidate probabilities on outcomes, extended additively to events.
struct CandidateMeasure {
    std::map<Rational, Rational> assignment;

    Rational operator()(const std::set<Rational>& members) const {
        Rational total = 0;
        for (const auto& x : members) {
            auto it = assignment.find(x);
            if (it != assignment.end()) total += it->second;
        }
        return total;
    }

    friend bool operator==(const CandidateMeasure&, const CandidateMeasure&) = default;
};

inline CandidateMeasure weight_measure(const Measurement& m) { return CandidateMeasure{outcome_weights(m)}; }

/// Which of the three conditions on Pr hold:
/// (a) Pr orders events as their weights do, (b) Pr is a nonnegative
/// additive measure, (c) Pr of the whole occurring spectrum is 1.
struct MeasureReport {
    bool order = true;
    bool additive = true;
    bool normalized = true;
    std::vector<std::string> violations;

    bool all() const { return order && additive && normalized; }
};

using EventFunction = std::function<Rational(const std::set<Rational>&)>;

inline constexpr std::size_t kMaxCheckOutcomes = 16;
inline constexpr std::size_t kMaxSearchOutcomes = 6;

/// Every event of a measurement, in order of increasing bitmask over the sorted occurring spectrum.
inline std::vector<Event> power_set_events(const Measurement& m) {
    const auto occ = occurring_spectrum(m);
    if (occ.size() > kMaxCheckOutcomes) {
        throw SizeError("measurement has " + std::to_string(occ.size()) + " outcomes; at most " +
                        std::to_string(kMaxCheckOutcomes) + " are supported");
    }
    const std::vector<Rational> xs(occ.begin(), occ.end());
    std::vector<Event> out;
    for (std::uint32_t mask = 0; mask < (1u << xs.size()); ++mask) {
        std::set<Rational> members;
        for (std::size_t b = 0; b < xs.size(); ++b) {
            if (mask & (1u << b)) members.insert(xs[b]);
        }
        out.push_back(Event{m, std::move(members)});
    }
    return out;
}

namespace detail {

inline std::string event_string(const std::set<Rational>& members) {
    std::string s = "{";
    for (const auto& x : members) s += (s.size() > 1 ? ", " : "") + to_string(x);
    return s + "}";
}

}  // namespace detail

inline MeasureReport check_measure(const std::vector<Event>& events, const EventFunction& pr) {
    MeasureReport r;
    if (events.empty()) throw InputError("check_measure needs at least one event");
    const Measurement& m = events.front().measurement;
    const auto occ = occurring_spectrum(m);
    if (occ.size() > kMaxCheckOutcomes) {
        throw SizeError("measurement has " + std::to_string(occ.size()) + " outcomes; at most " +
                        std::to_string(kMaxCheckOutcomes) + " are supported");
    }
    std::vector<Rational> w, p;
    for (const auto& e : events) {
        if (!(e.measurement == m)) throw InputError("check_measure events must share one measurement");
        w.push_back(event_weight(e));
        p.push_back(pr(e.members));
    }
    for (std::size_t i = 0; i < events.size() && r.order; ++i) {
        for (std::size_t j = 0; j < events.size(); ++j) {
            if ((p[i] > p[j]) != (w[i] > w[j])) {
                r.order = false;
                r.violations.push_back("(a) Pr" + detail::event_string(events[i].members) + " = " + to_string(p[i]) +
                                       ", Pr" + detail::event_string(events[j].members) + " = " + to_string(p[j]) +
                                       " but weights are " + to_string(w[i]) + " and " + to_string(w[j]));
                break;
            }
        }
    }
    for (std::size_t i = 0; i < events.size() && r.additive; ++i) {
        if (p[i] < 0) {
            r.additive = false;
            r.violations.push_back("(b) Pr" + detail::event_string(events[i].members) + " is negative");
        }
    }
    std::map<std::set<Rational>, std::size_t> position;
    for (std::size_t i = 0; i < events.size(); ++i) position.emplace(events[i].members, i);
    for (std::size_t i = 0; i < events.size() && r.additive; ++i) {
        for (std::size_t j = i + 1; j < events.size() && r.additive; ++j) {
            std::set<Rational> both;
            std::set_intersection(events[i].members.begin(), events[i].members.end(), events[j].members.begin(),
                                  events[j].members.end(), std::inserter(both, both.end()));
            if (!both.empty()) continue;
            std::set<Rational> uni = events[i].members;
            uni.insert(events[j].members.begin(), events[j].members.end());
            auto it = position.find(uni);
            if (it != position.end() && p[it->second] != p[i] + p[j]) {
                r.additive = false;
                r.violations.push_back("(b) Pr" + detail::event_string(uni) + " differs from Pr" +
                                       detail::event_string(events[i].members) + " + Pr" +
                                       detail::event_string(events[j].members));
            }
        }
    }
    const Rational whole = pr(occ);
    if (whole != 1) {
        r.normalized = false;
        r.violations.push_back("(c) Pr of the occurring spectrum is " + to_string(whole));
    }
    return r;
}

inline MeasureReport check_measure(const std::vector<Event>& events, const CandidateMeasure& m) {
    return check_measure(events, EventFunction([&](const std::set<Rational>& s) { return m(s); }));
}

enum class Uniqueness { Unique, Impostor, Inconclusive };

inline std::string to_string(Uniqueness u) {
    switch (u) {
        case Uniqueness::Unique: return "unique";
        case Uniqueness::Impostor: return "impostor";
        case Uniqueness::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct UniquenessResult {
    Uniqueness verdict = Uniqueness::Inconclusive;
    std::vector<CandidateMeasure> passing;
    std::size_t candidates_examined = 0;
};

inline constexpr long long kMaxDenominatorBound = 40;

/// Measurement of n equally weighted outcomes 1..n. Symmetry forces
/// Pr = k/n on each of its k-outcome events.
inline Measurement uniform_reference(long long n) {
    if (n < 1) throw InputError("reference measurement needs at least one outcome");
    Measurement m;
    for (long long i = 1; i <= n; ++i) {
        const BasisIndex idx = std::to_string(i);
        m.state.emplace(idx, Amplitude(make_rational(1, n)));
        m.observable.eigen.emplace(idx, Rational(i));
    }
    return m;
}

/// Enumerates every measure whose outcome values are fractions in [0,1]
/// with denominator at most `bound` and keeps those satisfying (a), (b), (c).
///
/// Condition (a) compares events of the measurement with each other and with
/// the events of the reference measurements uniform_reference(1..bound),
/// whose probabilities k/n are already fixed. Values are held as integer
/// numerators over lcm(1..bound). Only the first k-1 coordinates are
/// enumerated; normalization fixes the last.
inline UniquenessResult uniqueness_search(const Measurement& m, long long bound) {
    if (bound < 1) throw InputError("denominator bound must be positive");
    if (bound > kMaxDenominatorBound) {
        throw SizeError("denominator bound " + std::to_string(bound) + " exceeds " +
                        std::to_string(kMaxDenominatorBound));
    }
    const auto weights = outcome_weights(m);
    const std::size_t k = weights.size();
    if (k == 0) throw EmptyGameError("measurement has no occurring outcome");
    if (k > kMaxSearchOutcomes) {
        throw SizeError("uniqueness search supports at most " + std::to_string(kMaxSearchOutcomes) + " outcomes");
    }
    std::vector<Rational> xs, ws;
    bool representable = true;
    for (const auto& [x, w] : weights) {
        xs.push_back(x);
        ws.push_back(w);
        if (denominator(w) > bound) representable = false;
    }

    std::int64_t scale = 1;
    for (long long d = 2; d <= bound; ++d) scale = std::lcm(scale, static_cast<std::int64_t>(d));
    std::set<std::int64_t> grid_set;
    for (long long d = 1; d <= bound; ++d) {
        for (long long c = 0; c <= d; ++c) grid_set.insert(scale / d * c);
    }
    const std::vector<std::int64_t> grid(grid_set.begin(), grid_set.end());

    // Subsets sorted by weight; a candidate satisfies (a) iff its subset sums
    // follow the same chain, with ties exactly where the weights tie.
    const std::size_t subsets = std::size_t{1} << k;
    std::vector<Rational> subset_weight(subsets, Rational(0));
    for (std::size_t s = 0; s < subsets; ++s) {
        for (std::size_t b = 0; b < k; ++b) {
            if (s & (std::size_t{1} << b)) subset_weight[s] += ws[b];
        }
    }
    std::vector<std::size_t> chain(subsets);
    std::iota(chain.begin(), chain.end(), std::size_t{0});
    std::stable_sort(chain.begin(), chain.end(),
                     [&](std::size_t a, std::size_t b) { return subset_weight[a] < subset_weight[b]; });
    std::vector<bool> tie_with_next(subsets, false);
    for (std::size_t c = 0; c + 1 < subsets; ++c) {
        tie_with_next[c] = subset_weight[chain[c]] == subset_weight[chain[c + 1]];
    }

    // Reference values k/n form the grid. Each subset's weight either sits on
    // the grid, pinning Pr exactly, or strictly between two grid neighbours.
    std::vector<std::int64_t> exact(subsets, -1), below(subsets, 0), above(subsets, 0);
    for (std::size_t s = 0; s < subsets; ++s) {
        const Rational scaled = subset_weight[s] * Rational(scale);
        if (denominator(scaled) == 1 && grid_set.contains(static_cast<std::int64_t>(numerator(scaled)))) {
            exact[s] = static_cast<std::int64_t>(numerator(scaled));
            continue;
        }
        auto hi = std::upper_bound(grid.begin(), grid.end(), scaled,
                                   [](const Rational& v, std::int64_t g) { return v < Rational(g); });
        above[s] = *hi;
        below[s] = *std::prev(hi);
    }

    UniquenessResult result;
    std::vector<std::int64_t> value(k, 0);
    std::vector<std::int64_t> sums(subsets, 0);
    auto order_ok = [&] {
        for (std::size_t s = 1; s < subsets; ++s) {
            const std::size_t low = s & (s - 1);
            const std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(static_cast<unsigned long long>(s)));
            sums[s] = sums[low] + value[bit];
        }
        for (std::size_t s = 1; s < subsets; ++s) {
            if (exact[s] >= 0 ? sums[s] != exact[s] : !(below[s] < sums[s] && sums[s] < above[s])) return false;
        }
        for (std::size_t c = 0; c + 1 < subsets; ++c) {
            const std::int64_t a = sums[chain[c]];
            const std::int64_t b = sums[chain[c + 1]];
            if (tie_with_next[c] ? a != b : !(a < b)) return false;
        }
        return true;
    };
    std::function<void(std::size_t, std::int64_t)> descend = [&](std::size_t pos, std::int64_t used) {
        if (pos + 1 == k) {
            const std::int64_t last = scale - used;
            if (!grid_set.contains(last)) return;
            value[pos] = last;
            ++result.candidates_examined;
            if (!order_ok()) return;
            CandidateMeasure cm;
            for (std::size_t b = 0; b < k; ++b) cm.assignment.emplace(xs[b], make_rational(value[b], scale));
            result.passing.push_back(std::move(cm));
            return;
        }
        for (std::int64_t v : grid) {
            if (used + v > scale) break;
            value[pos] = v;
            descend(pos + 1, used + v);
        }
    };
    descend(0, 0);

    // Survivors are re-checked against the full conditions over the power set.
    const auto events = power_set_events(m);
    std::erase_if(result.passing, [&](const CandidateMeasure& cm) { return !check_measure(events, cm).all(); });

    const CandidateMeasure truth = weight_measure(m);
    if (!representable) {
        result.verdict = Uniqueness::Inconclusive;
    } else if (result.passing.size() == 1 && result.passing.front() == truth) {
        result.verdict = Uniqueness::Unique;
    } else {
        result.verdict = Uniqueness::Impostor;
    }
    return result;
}

}  // namespace qgame
