#include <gtest/gtest.h>

#include "qgame/qgame.hpp"
#include "support/generators.hpp"

using namespace qgame;
using qgame::testing::Rng;
using qgame::testing::uniform;

namespace {

Rational r(long long p, long long q = 1) { return make_rational(p, q); }

// Outcome i (1-based) sits at eigenvalue i.
Measurement weights_measurement(const std::vector<Rational>& w) {
    std::vector<Rational> outcomes;
    for (std::size_t i = 1; i <= w.size(); ++i) outcomes.push_back(Rational(static_cast<long long>(i)));
    return measurement_of(numeric_game(w, outcomes));
}

Event event(const Measurement& m, std::set<long long> members) {
    std::set<Rational> xs;
    for (long long x : members) xs.insert(Rational(x));
    return make_event(m, xs);
}

Measurement random_measurement(Rng& rng, std::size_t max_outcomes, long long max_den) {
    const std::size_t k = static_cast<std::size_t>(uniform(rng, 1, static_cast<long long>(max_outcomes)));
    const long long den = uniform(rng, static_cast<long long>(k), max_den);
    Measurement m = weights_measurement(qgame::testing::random_weights(rng, k, den));
    // A spare basis vector off the support, sometimes sharing an eigenvalue.
    if (uniform(rng, 0, 1) == 0) m.observable.eigen.emplace("spare", Rational(uniform(rng, 1, 9)));
    return m;
}

}  // namespace

TEST(EventWeight, Examples) {
    const Measurement m = weights_measurement({r(1, 6), r(1, 3), r(1, 2)});
    EXPECT_EQ(event_weight(event(m, {1, 2, 3})), 1);
    EXPECT_EQ(event_weight(event(m, {})), 0);
    EXPECT_EQ(event_weight(event(m, {1, 3})), r(2, 3));
    EXPECT_THROW(event(m, {4}), InputError);
}

TEST(EventWeight, ZeroWeightBranchesAreNotOccurring) {
    Measurement m = weights_measurement({r(1, 2), r(1, 2)});
    m.state.emplace("z", Amplitude(0));
    m.observable.eigen.emplace("z", r(7));
    EXPECT_EQ(occurring_spectrum(m).size(), 2u);
    EXPECT_THROW(event(m, {7}), InputError);
}

TEST(MoreProbable, Examples) {
    const Measurement m = weights_measurement({r(1, 6), r(1, 3), r(1, 2)});
    const Event e = event(m, {1, 3});
    EXPECT_EQ(more_probable(e, e), Ordering::Equivalent);
    const Event half = event(m, {3});
    EXPECT_EQ(more_probable(e, half), Ordering::Greater);
    EXPECT_EQ(more_probable(half, e), Ordering::Less);
    const Measurement other = weights_measurement({r(1, 4), r(1, 4), r(1, 2)});
    EXPECT_EQ(more_probable(half, event(other, {1, 2})), Ordering::Equivalent);
}

TEST(Bets, GameAndNullEvents) {
    const Measurement m = weights_measurement({r(1, 4), r(3, 4)});
    const Bet b = make_bet(event(m, {2}), numeric(r(10)), numeric(r(0)));
    EXPECT_EQ(expected_utility(bet_game(b)), r(30, 4));
    EXPECT_THROW(make_bet(event(m, {2}), numeric(r(0)), numeric(r(1))), PreconditionError);
    EXPECT_TRUE(is_null(event(m, {})));
    EXPECT_FALSE(is_null(event(m, {1})));
}

TEST(MoreProbableProperties, WeakOrderAndDominance) {
    Rng rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Event> es;
        for (int j = 0; j < 3; ++j) {
            const Measurement m = random_measurement(rng, 5, 12);
            std::set<Rational> members;
            for (const auto& x : occurring_spectrum(m)) {
                if (uniform(rng, 0, 1) == 0) members.insert(x);
            }
            es.push_back(make_event(m, members));
        }
        for (const auto& a : es) {
            for (const auto& b : es) {
                const Ordering ab = more_probable(a, b);
                const Ordering ba = more_probable(b, a);
                ASSERT_EQ(ab == Ordering::Greater, ba == Ordering::Less);
                ASSERT_EQ(ab == Ordering::Equivalent, ba == Ordering::Equivalent);
                for (const auto& c : es) {
                    if (ab != Ordering::Less && more_probable(b, c) != Ordering::Less) {
                        ASSERT_NE(more_probable(a, c), Ordering::Less);
                    }
                }
            }
        }
        const Event& e = es[0];
        for (const auto& x : occurring_spectrum(e.measurement)) {
            if (e.members.contains(x)) continue;
            auto bigger = e.members;
            bigger.insert(x);
            ASSERT_EQ(more_probable(make_event(e.measurement, bigger), e), Ordering::Greater);
        }
    }
}

TEST(CheckMeasure, Examples) {
    const Measurement m = weights_measurement({r(1, 6), r(1, 3), r(1, 2)});
    const auto events = power_set_events(m);
    EXPECT_EQ(events.size(), 8u);
    EXPECT_TRUE(check_measure(events, weight_measure(m)).all());

    const MeasureReport uniform_report = check_measure(events, CandidateMeasure{{{r(1), r(1, 3)}, {r(2), r(1, 3)}, {r(3), r(1, 3)}}});
    EXPECT_FALSE(uniform_report.order);
    EXPECT_TRUE(uniform_report.additive);
    EXPECT_TRUE(uniform_report.normalized);
    EXPECT_FALSE(uniform_report.violations.empty());

    const MeasureReport doubled = check_measure(events, CandidateMeasure{{{r(1), r(1, 3)}, {r(2), r(2, 3)}, {r(3), r(1)}}});
    EXPECT_TRUE(doubled.order);
    EXPECT_TRUE(doubled.additive);
    EXPECT_FALSE(doubled.normalized);

    const MeasureReport squashed = check_measure(events, [](const std::set<Rational>& s) {
        return s.empty() ? Rational(0) : Rational(1) - make_rational(1, static_cast<long long>(s.size()) + 1) * 2;
    });
    EXPECT_FALSE(squashed.additive);
}

TEST(CheckMeasure, SizeLimit) {
    std::vector<Rational> w(17, make_rational(1, 17));
    EXPECT_THROW(power_set_events(weights_measurement(w)), SizeError);
}

TEST(UniquenessSearch, Examples) {
    const UniquenessResult half = uniqueness_search(weights_measurement({r(1, 2), r(1, 2)}), 12);
    EXPECT_EQ(half.verdict, Uniqueness::Unique);
    ASSERT_EQ(half.passing.size(), 1u);
    EXPECT_EQ(half.passing[0].assignment.at(r(1)), r(1, 2));

    const Measurement third = weights_measurement({r(1, 3), r(2, 3)});
    const UniquenessResult t = uniqueness_search(third, 12);
    EXPECT_EQ(t.verdict, Uniqueness::Unique);
    ASSERT_EQ(t.passing.size(), 1u);
    EXPECT_EQ(t.passing[0], weight_measure(third));
    EXPECT_GT(t.candidates_examined, 1u);

    const UniquenessResult one = uniqueness_search(weights_measurement({r(1)}), 12);
    EXPECT_EQ(one.verdict, Uniqueness::Unique);
    ASSERT_EQ(one.passing.size(), 1u);
    EXPECT_EQ(one.passing[0].assignment.at(r(1)), 1);
}

TEST(UniquenessSearch, BoundTooSmallIsInconclusive) {
    EXPECT_EQ(uniqueness_search(weights_measurement({r(1, 7), r(6, 7)}), 4).verdict, Uniqueness::Inconclusive);
    EXPECT_THROW(uniqueness_search(weights_measurement({r(1, 2), r(1, 2)}), 0), InputError);
    EXPECT_THROW(uniqueness_search(weights_measurement(std::vector<Rational>(7, make_rational(1, 7))), 12), SizeError);
}

TEST(UniquenessSearch, RandomMeasurementsHaveOnlyTheWeightMeasure) {
    Rng rng(2718);
    for (int trial = 0; trial < 100; ++trial) {
        const Measurement m = random_measurement(rng, 4, 12);
        const UniquenessResult res = uniqueness_search(m, 12);
        ASSERT_EQ(res.verdict, Uniqueness::Unique);
        ASSERT_EQ(res.passing.size(), 1u);
        ASSERT_EQ(res.passing[0], weight_measure(m));
    }
}

namespace {

GambleTable three_outcome_table() {
    GambleTable t;
    t.consequences = {numeric(r(0)), numeric(r(1)), numeric(r(2))};
    t.gambles = {{r(1), r(0), r(0)}, {r(0), r(1), r(0)}, {r(0), r(0), r(1)}, {r(1, 2), r(0), r(1, 2)}};
    return t;
}

}  // namespace

TEST(Vnm, ConstantGamblesPass) {
    GambleTable t;
    t.consequences = {numeric(r(-1)), numeric(r(3)), numeric(r(5))};
    t.gambles = {{r(1), r(0), r(0)}, {r(0), r(1), r(0)}, {r(0), r(0), r(1)}};
    const VnmReport rep = vnm_check(t);
    EXPECT_TRUE(rep.all());
    EXPECT_TRUE(rep.counterexamples.empty());
}

TEST(Vnm, RandomEuTablesPass) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        GambleTable t;
        const std::size_t k = static_cast<std::size_t>(uniform(rng, 2, 4));
        for (std::size_t c = 0; c < k; ++c) t.consequences.push_back(numeric(qgame::testing::random_rational(rng)));
        for (int g = 0; g < 5; ++g) {
            auto w = qgame::testing::random_weights(rng, k, 12);
            t.gambles.push_back(w);
        }
        ASSERT_TRUE(vnm_check(t).all()) << trial;
    }
}

TEST(Vnm, MalformedGambleFailsVnm0) {
    GambleTable t = three_outcome_table();
    t.gambles.push_back({r(1, 2), r(1, 2), r(1, 2)});
    const VnmReport rep = vnm_check(t);
    EXPECT_FALSE(rep.vnm0);
}

TEST(Vnm, PreferenceFlippedUnderMixingBreaksIndependence) {
    const GambleTable t = three_outcome_table();
    // Degenerate gambles are ranked by EU, every genuine mixture in reverse.
    const GamblePreference flipped = [t](const Gamble& f, const Gamble& g) {
        auto score = [&](const Gamble& h) {
            const bool sure = std::find(h.begin(), h.end(), Rational(1)) != h.end();
            return sure ? gamble_eu(t, h) : -gamble_eu(t, h);
        };
        return compare_values(score(f), score(g));
    };
    const VnmReport rep = vnm_check(t, flipped);
    EXPECT_TRUE(rep.vnm1);
    EXPECT_FALSE(rep.vnm2);
    ASSERT_FALSE(rep.counterexamples.empty());
    EXPECT_NE(rep.counterexamples.front().find("VNM2"), std::string::npos);
}

TEST(Vnm, LexicographicPreferenceHasNoContinuityWeight) {
    const GambleTable t = three_outcome_table();
    // Any chance of the worst outcome outweighs everything else.
    const GamblePreference cautious = [t](const Gamble& f, const Gamble& g) {
        if ((f[0] == 0) != (g[0] == 0)) return f[0] == 0 ? Ordering::Greater : Ordering::Less;
        return compare_values(gamble_eu(t, f), gamble_eu(t, g));
    };
    const VnmReport rep = vnm_check(t, cautious);
    EXPECT_TRUE(rep.vnm1);
    EXPECT_FALSE(rep.vnm3);
    bool reported = false;
    for (const auto& c : rep.counterexamples) reported = reported || c.find("not found at depth 10") != std::string::npos;
    EXPECT_TRUE(reported);
}
