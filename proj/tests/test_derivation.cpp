#include <gtest/gtest.h>

#include <algorithm>

#include "qgame/qgame.hpp"
#include "support/generators.hpp"

using namespace qgame;
using qgame::testing::Rng;
using qgame::testing::uniform;

namespace {

Rational r(long long p, long long q = 1) { return make_rational(p, q); }

const Precision kFine(make_rational(1, 1000));

bool uses_axiom(const DerivationTrace& t, Axiom a) {
    return std::any_of(t.steps.begin(), t.steps.end(), [&](const TraceEntry& e) {
        const auto* use = std::get_if<AxiomUse>(&e.item);
        return use && use->axiom() == a;
    });
}

bool uses_rule(const DerivationTrace& t, Rule rule) {
    return std::any_of(t.steps.begin(), t.steps.end(), [&](const TraceEntry& e) {
        const auto* step = std::get_if<RewriteStep>(&e.item);
        return step && step->rule == rule;
    });
}

}  // namespace

TEST(AdditivityLemma, Examples) {
    const Game g = numeric_game({r(1, 2), r(1, 2)}, {r(0), r(1)});
    const ShiftDerivation zero = additivity_lemma(g, 0);
    EXPECT_EQ(expected_utility(zero.shifted), expected_utility(g));
    verify(zero.trace);

    const ShiftDerivation five = additivity_lemma(g, 5);
    EXPECT_EQ(expected_utility(five.shifted), r(11, 2));
    EXPECT_TRUE(uses_axiom(five.trace, Axiom::AdditivityLemma));
    EXPECT_TRUE(uses_axiom(five.trace, Axiom::Additivity));
    EXPECT_TRUE(uses_rule(five.trace, Rule::PET));
    verify(five.trace);

    const ShiftDerivation back = additivity_lemma(five.shifted, -5);
    EXPECT_EQ(back.shifted, g);

    Game unvalued = g;
    unvalued.payoff.at(r(0)) = Consequence{"c", std::nullopt};
    EXPECT_THROW(additivity_lemma(unvalued, 1), UnvaluedConsequenceError);
}

TEST(Stage1, Examples) {
    const ValueDerivation a = derive_stage1(r(0), r(1));
    EXPECT_EQ(a.value, r(1, 2));
    EXPECT_TRUE(uses_axiom(a.trace, Axiom::ZeroSum));
    EXPECT_TRUE(uses_axiom(a.trace, Axiom::AdditivityLemma));
    EXPECT_TRUE(uses_rule(a.trace, Rule::StateSymmetry));
    verify(a.trace);

    EXPECT_EQ(derive_stage1(r(4, 3), r(4, 3)).value, r(4, 3));
    EXPECT_EQ(derive_stage1(r(-3), r(7)).value, 2);
}

TEST(Stage1, ReflectionUsesTheMidpointSymmetry) {
    const ValueDerivation d = derive_stage1(r(-3), r(7));
    bool found = false;
    for (const auto& e : d.trace.steps) {
        const auto* step = std::get_if<RewriteStep>(&e.item);
        if (!step || step->rule != Rule::StateSymmetry) continue;
        const auto& f = std::get<StateSymmetryParams>(step->params).f;
        EXPECT_EQ(f.at(r(-3)), 7);
        EXPECT_EQ(f.at(r(7)), -3);
        found = true;
    }
    EXPECT_TRUE(found);
}

TEST(Stage1, OffSupportBasisAndPhasesAreHandled) {
    Game g = numeric_game({r(1, 2), r(1, 2)}, {r(1), r(2)});
    g.state.at("1") = Amplitude(r(1, 2), r(1, 3));
    g.observable.eigen.emplace("3", r(100));
    g.observable.eigen.emplace("4", r(200));
    g.observable.eigen.emplace("5", r(300));
    g.payoff.emplace(r(100), Consequence{"unused", std::nullopt});
    const ValueDerivation d = derive_stage1(g);
    EXPECT_EQ(d.value, r(3, 2));
    EXPECT_TRUE(uses_rule(d.trace, Rule::OET));
    EXPECT_TRUE(uses_rule(d.trace, Rule::OpSymmetry));
    verify(d.trace);

    EXPECT_THROW(derive_stage1(numeric_game({r(1, 3), r(2, 3)}, {r(0), r(1)})), PreconditionError);
}

TEST(EqualWeight, Examples) {
    EXPECT_EQ(derive_equal_weight(2, {r(0), r(1)}).value, r(1, 2));
    EXPECT_EQ(derive_equal_weight(4, {r(5), r(5), r(5), r(5)}).value, 5);
    const ValueDerivation d = derive_equal_weight(3, {r(1), r(2), r(6)});
    EXPECT_EQ(d.value, 3);
    EXPECT_TRUE(uses_axiom(d.trace, Axiom::PermutationAverage));
    verify(d.trace);
    EXPECT_THROW(derive_equal_weight(0, {}), EmptyGameError);
    EXPECT_THROW(derive_equal_weight(2, {r(1)}), InputError);
}

TEST(EqualWeight, LargeNUsesCyclicGroup) {
    std::vector<Rational> v;
    for (int i = 0; i < 9; ++i) v.push_back(r(i * i));
    const ValueDerivation d = derive_equal_weight(9, v);
    EXPECT_EQ(d.value, r(204, 9));
    verify(d.trace);
    for (const auto& e : d.trace.steps) {
        if (const auto* use = std::get_if<AxiomUse>(&e.item)) {
            if (const auto* avg = std::get_if<PermutationAverageUse>(&use->payload)) {
                EXPECT_FALSE(avg->full_group);
                EXPECT_EQ(avg->family_size, 9u);
            }
        }
    }
}

TEST(RationalWeights, Examples) {
    EXPECT_EQ(derive_rational_weights({r(1, 2), r(1, 2)}, {r(0), r(1)}).value, r(1, 2));
    const ValueDerivation q = derive_rational_weights({r(3, 4), r(1, 4)}, {r(0), r(1)});
    EXPECT_EQ(q.value, r(1, 4));
    EXPECT_TRUE(uses_rule(q.trace, Rule::SET));
    EXPECT_TRUE(uses_rule(q.trace, Rule::PET));
    verify(q.trace);
    EXPECT_EQ(derive_rational_weights({r(1, 3), r(1, 3), r(1, 3)}, {r(1), r(2), r(6)}).value, 3);
    EXPECT_THROW(derive_rational_weights({r(1, 2), r(1, 3)}, {r(0), r(1)}), InvalidGameError);
    EXPECT_THROW(derive_rational_weights({r(1, 20000), r(19999, 20000)}, {r(0), r(1)}), SizeError);
}

TEST(DeriveValue, Examples) {
    const IntervalDerivation s1 = derive_value(numeric_game({r(1, 2), r(1, 2)}, {r(0), r(1)}), kFine);
    EXPECT_EQ(s1.lower, r(1, 2));
    EXPECT_EQ(s1.upper, r(1, 2));

    const IntervalDerivation single = derive_value(numeric_game({r(1)}, {r(-9, 4)}), kFine);
    EXPECT_EQ(single.lower, r(-9, 4));
    EXPECT_EQ(single.upper, r(-9, 4));

    const IntervalDerivation d = derive_value(numeric_game({r(3, 7), r(4, 7)}, {r(7), r(0)}), Precision(r(1, 100)));
    EXPECT_EQ(d.lower, 3);
    EXPECT_EQ(d.upper, 3);
    verify(d.trace);

    Game unvalued = numeric_game({r(1, 2), r(1, 2)}, {r(0), r(1)});
    unvalued.payoff.at(r(1)) = Consequence{"?", std::nullopt};
    EXPECT_THROW(derive_value(unvalued, kFine), UnvaluedConsequenceError);
    EXPECT_THROW(Precision(0), InputError);
}

TEST(DeriveValue, DistinctLabelsWithEqualValuesMergeByDominance) {
    Game g = numeric_game({r(1, 4), r(1, 4), r(1, 2)}, {r(1), r(2), r(3)});
    g.payoff.at(r(1)) = Consequence{"apple", r(5)};
    g.payoff.at(r(2)) = Consequence{"pear", r(5)};
    g.payoff.at(r(3)) = Consequence{"plum", r(1)};
    const IntervalDerivation d = derive_value(g, kFine);
    EXPECT_EQ(d.lower, 3);
    EXPECT_TRUE(uses_axiom(d.trace, Axiom::Dominance));
    verify(d.trace);
}

TEST(DeriveValue, SandwichWhenFanOutIsTooLarge) {
    const Game g = numeric_game({r(1, 10007), r(10006, 10007)}, {r(0), r(3)});
    const Rational eu = expected_utility(g);
    Rational prev_width = 4;
    for (long long den : {10, 50, 200}) {
        const IntervalDerivation d = derive_value(g, Precision(r(1, den)), 4096);
        EXPECT_LT(d.lower, d.upper);
        EXPECT_LE(d.upper - d.lower, r(1, den));
        EXPECT_LE(d.upper - d.lower, prev_width);
        EXPECT_LE(d.lower, eu);
        EXPECT_GE(d.upper, eu);
        verify(d.trace);
        prev_width = d.upper - d.lower;
    }
    EXPECT_THROW(derive_value(g, Precision(r(1, 1000000)), 8), PreconditionError);
}

TEST(DerivationProperties, AgreesWithExpectedUtility) {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const Game g = qgame::testing::random_game(rng);
        const IntervalDerivation d = derive_value(g, kFine);
        const Rational eu = expected_utility(g);
        ASSERT_EQ(d.lower, eu);
        ASSERT_EQ(d.upper, eu);
        if (trial % 10 == 0) ASSERT_NO_THROW(verify(d.trace));
    }
}

TEST(DerivationProperties, StagesAreConsistent) {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const Rational x1 = qgame::testing::random_rational(rng);
        const Rational x2 = qgame::testing::random_rational(rng);
        const Rational a = derive_stage1(x1, x2).value;
        ASSERT_EQ(a, derive_equal_weight(2, {x1, x2}).value);
        ASSERT_EQ(a, derive_rational_weights({r(1, 2), r(1, 2)}, {x1, x2}).value);
    }
}

TEST(DerivationProperties, ZeroSumAsTheorem) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const Game g = qgame::testing::random_game(rng);
        Game neg = g;
        for (auto& [x, c] : neg.payoff) {
            if (c.value) c = Consequence{"neg " + c.label, -*c.value};
        }
        const IntervalDerivation a = derive_value(g, kFine);
        const IntervalDerivation b = derive_value(neg, kFine);
        ASSERT_EQ(b.lower, -a.upper);
        ASSERT_EQ(b.upper, -a.lower);
    }
}

TEST(TruncateBounds, Examples) {
    const Game g = numeric_game({r(1, 2), r(1, 4), r(1, 8), r(1, 8)}, {r(1), r(0), r(1, 2), r(1)});
    const Rational eu = expected_utility(g);
    const auto full = truncate_bounds(g, 4, 0, 1);
    EXPECT_EQ(full.first, eu);
    EXPECT_EQ(full.second, eu);
    const auto two = truncate_bounds(g, 2, 0, 1);
    EXPECT_EQ(two.first, r(1, 2));
    EXPECT_EQ(two.second, r(1, 2) + r(1, 4));
    EXPECT_THROW(truncate_bounds(g, 2, 0, r(1, 2)), PreconditionError);
    EXPECT_THROW(truncate_bounds(g, 0, 0, 1), InputError);
}

TEST(TruncateBounds, WidthsShrinkMonotonically) {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const Game g = qgame::testing::random_game(rng);
        Rational lo = 0, hi = 0;
        bool first = true;
        for (const auto& i : support(g)) {
            const Rational v = *payoff_at(g, i).value;
            if (first || v < lo) lo = v;
            if (first || v > hi) hi = v;
            first = false;
        }
        const Rational eu = expected_utility(g);
        Rational prev = hi - lo + 1;
        const std::size_t n = support(g).size();
        for (std::size_t k = 1; k <= n; ++k) {
            const auto [l, u] = truncate_bounds(g, k, lo, hi);
            ASSERT_LE(l, eu);
            ASSERT_GE(u, eu);
            ASSERT_LE(u - l, prev);
            prev = u - l;
        }
        ASSERT_EQ(prev, 0);
    }
}

TEST(CompositeValue, SubstitutesNestedValues) {
    CompositeGame cg;
    cg.state = {{"A", Amplitude(r(1, 2))}, {"B", Amplitude(r(1, 2))}};
    cg.observable.eigen = {{"A", r(10)}, {"B", r(20)}};
    cg.payoff.emplace(r(10), std::make_shared<const CompositeGame>(as_composite(numeric_game({r(1, 2), r(1, 2)}, {r(1), r(2)}))));
    cg.payoff.emplace(r(20), numeric(r(4)));
    const IntervalDerivation d = derive_composite_value(cg, kFine);
    EXPECT_EQ(d.lower, r(11, 4));
    EXPECT_EQ(d.upper, r(11, 4));
    EXPECT_TRUE(uses_axiom(d.trace, Axiom::Substitutivity));
    verify(d.trace);
    EXPECT_EQ(d.lower, composite_expected_utility(cg));
}

TEST(Trace, TamperedEntriesAreCaught) {
    ValueDerivation d = derive_rational_weights({r(3, 4), r(1, 4)}, {r(0), r(1)});
    verify(d.trace);
    DerivationTrace bad = d.trace;
    for (auto& e : bad.steps) {
        if (auto* step = std::get_if<RewriteStep>(&e.item)) {
            step->after.payoff.begin()->second = numeric(r(999));
            break;
        }
    }
    EXPECT_THROW(verify(bad), Error);

    DerivationTrace bad_axiom = d.trace;
    for (auto& e : bad_axiom.steps) {
        if (auto* use = std::get_if<AxiomUse>(&e.item)) {
            if (auto* avg = std::get_if<PermutationAverageUse>(&use->payload)) avg->constant_payoff += 1;
        }
    }
    EXPECT_THROW(verify(bad_axiom), AxiomViolationError);

    const Game g = numeric_game({r(1, 2), r(1, 2)}, {r(0), r(1)});
    const Game worse = numeric_game({r(1, 2), r(1, 2)}, {r(0), r(1)});
    Game better = worse;
    better.payoff.at(r(0)) = numeric(r(-1));
    EXPECT_THROW(check_axiom(AxiomUse{DominanceUse{better, g}}), AxiomViolationError);
}
