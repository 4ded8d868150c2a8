// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "qgame/qgame.hpp"
#include "support/generators.hpp"

using namespace qgame;
using qgame::testing::Rng;
using qgame::testing::uniform;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<void(Check&)>& body) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0 && secs >= limit_s) c.fail("runtime " + std::to_string(secs) + " s over " + std::to_string(limit_s) + " s");
    std::printf("%s %d %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", id, name, secs, c.ok ? "" : ": ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

Rational brute_force_eu(const RepeatedMeasurement& rm) {
    const Rational q = Rational(1) - rm.p;
    const Rational payoff = rm.p * rm.x + q * rm.y;
    Rational eu = 0;
    for (unsigned long long seq = 0; seq < (1ULL << rm.n); ++seq) {
        long long zeros = 0;
        Rational w = 1;
        for (long long k = 0; k < rm.n; ++k) {
            if ((seq >> k) & 1ULL) {
                w *= q;
            } else {
                w *= rm.p;
                ++zeros;
            }
        }
        const Rational lhs = Rational(zeros) * (rm.x - rm.y);
        const Rational rhs = Rational(rm.n) * (rm.epsilon - rm.y);
        if (rm.x > rm.y ? lhs >= rhs : lhs <= rhs) eu += w * payoff;
    }
    return eu;
}

}  // namespace

int main() {
    criterion(1, "stage one exactness", 1.0, [](Check& c) {
        Rng rng(101);
        for (int i = 0; i < 100; ++i) {
            const Rational a = qgame::testing::random_rational(rng, 50, 20);
            const Rational b = qgame::testing::random_rational(rng, 50, 20);
            const ValueDerivation d = derive_stage1(a, b);
            if (d.value != (a + b) / 2) c.fail("pair " + to_string(a) + ", " + to_string(b));
        }
    });

    criterion(2, "weight-rule agreement", 30.0, [](Check& c) {
        Rng rng(202);
        qgame::testing::GameShape shape;
        shape.max_branches = 8;
        shape.max_den = 64;
        const Precision prec(make_rational(1, 1000));
        for (int i = 0; i < 1000; ++i) {
            const Game g = qgame::testing::random_game(rng, shape);
            Rational eu = 0;
            for (const auto& idx : support(g)) eu += g.state.at(idx).weight() * *payoff_at(g, idx).value;
            const IntervalDerivation d = derive_value(g, prec);
            if (d.lower != eu || d.upper != eu) c.fail("game " + std::to_string(i) + " gave [" + to_string(d.lower) + ", " + to_string(d.upper) + "]");
        }
    });

    criterion(3, "canonical-form invariance", 60.0, [](Check& c) {
        Rng rng(303);
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            Game g = qgame::testing::random_game(rng);
            const CanonicalGame reference = canonicalize(g);
            const int length = static_cast<int>(uniform(rng, 1, 20));
            for (int k = 0; k < length; ++k) {
                const RewriteStep s = apply_rewrite(g, qgame::testing::random_rewrite(rng, g, k));
                if (canonicalize(s.after) != reference) ++bad;
                g = s.after;
            }
        }
        if (bad > 0) c.fail(std::to_string(bad) + " rewrites changed the canonical form");
    });

    criterion(4, "probability uniqueness", 300.0, [](Check& c) {
        Rng rng(404);
        for (int i = 0; i < 100; ++i) {
            const std::size_t k = static_cast<std::size_t>(uniform(rng, 1, 4));
            const auto w = qgame::testing::random_weights(rng, k, uniform(rng, static_cast<long long>(k), 12));
            std::vector<Rational> outcomes;
            for (std::size_t j = 0; j < k; ++j) outcomes.push_back(Rational(static_cast<long long>(j)));
            const Measurement m = measurement_of(numeric_game(w, outcomes));
            const UniquenessResult res = uniqueness_search(m, 12);
            if (res.passing.size() != 1 || !(res.passing.front() == weight_measure(m))) {
                c.fail("measurement " + std::to_string(i) + ": " + std::to_string(res.passing.size()) + " passing candidates");
            }
        }
    });

    criterion(5, "appendix value function", 0, [](Check& c) {
        Rng rng(505);
        const auto o = integer_oracle();
        for (int i = 0; i < 50; ++i) {
            const long long y = uniform(rng, -5000, 5000);
            const auto cut = build_value(o, BigInt(1), BigInt(y), 12);
            if (!cut.contains(y) || cut.width() > make_rational(1, 2048)) c.fail("target " + std::to_string(y));
        }
        for (int i = 0; i < 100; ++i) {
            const std::size_t k = static_cast<std::size_t>(uniform(rng, 1, 5));
            const auto w = qgame::testing::random_weights(rng, k, uniform(rng, static_cast<long long>(k), 40));
            const ActOracle eu = [w](const Act& a) {
                Rational v = 0;
                for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * a[j];
                return v;
            };
            std::vector<std::string> states;
            for (std::size_t j = 0; j < k; ++j) states.push_back("s" + std::to_string(j));
            if (derive_act_probabilities(states, eu, make_rational(uniform(rng, 1, 9), uniform(rng, 1, 4))) != w) {
                c.fail("act oracle " + std::to_string(i));
            }
        }
    });

    criterion(6, "inference oracle equivalence", 30.0, [](Check& c) {
        Rng rng(606);
        for (int set = 0; set < 20; ++set) {
            const Rational p = make_rational(uniform(rng, 0, 10), 10);
            Rational x = qgame::testing::random_rational(rng, 5, 3);
            const Rational y = qgame::testing::random_rational(rng, 5, 3);
            if (x == y) x += 1;
            const Rational eps = qgame::testing::random_rational(rng, 3, 4);
            for (long long n = 1; n <= 12; ++n) {
                const RepeatedMeasurement rm{n, p, x, y, eps};
                if (strategy_eu(rm) != brute_force_eu(rm)) c.fail("set " + std::to_string(set) + " n " + std::to_string(n));
            }
        }
    });

    criterion(7, "gaussian convergence", 0, [](Check& c) {
        double prev = INFINITY;
        // p0 = (eps - y)/(x - y) = 11/20.
        for (long long n : {25, 100, 400}) {
            const RepeatedMeasurement rm{n, make_rational(1, 2), Rational(1), Rational(-1), make_rational(1, 10)};
            if (threshold(rm) != make_rational(11, 20)) c.fail("threshold");
            const double dev = std::fabs(to_double(strategy_eu(rm)) - gaussian_approx(rm));
            if (dev > prev) c.fail("deviation grew at n = " + std::to_string(n));
            prev = dev;
        }
    });

    criterion(8, "infinite-game sandwich", 0, [](Check& c) {
        Rng rng(808);
        for (int i = 0; i < 100; ++i) {
            const Game g = qgame::testing::random_game(rng);
            const auto idx = support(g);
            Rational lo = *payoff_at(g, idx.front()).value, hi = lo;
            for (const auto& j : idx) {
                lo = std::min(lo, *payoff_at(g, j).value);
                hi = std::max(hi, *payoff_at(g, j).value);
            }
            Rational prev = hi - lo;
            for (std::size_t n = 1; n <= idx.size(); ++n) {
                const auto [l, u] = truncate_bounds(g, n, lo, hi);
                if (u - l > prev) c.fail("width grew on game " + std::to_string(i));
                prev = u - l;
            }
            if (prev != 0) c.fail("width does not collapse on game " + std::to_string(i));
        }
    });

    return failures == 0 ? 0 : 1;
}
