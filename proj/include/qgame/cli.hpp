#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgame/derivation.hpp"
#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/inference.hpp"
#include "qgame/json_io.hpp"
#include "qgame/probability.hpp"
#include "qgame/rational.hpp"
#include "qgame/trace.hpp"
#include "qgame/value_function.hpp"

namespace qgame::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json_io::json load(const std::string& path) {
    try {
        return json_io::parse_text(read_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline std::string approx(double v) {
    std::ostringstream ss;
    ss << std::setprecision(12) << v;
    return ss.str();
}

inline BigInt integer_arg(const std::string& text, const char* flag) {
    const Rational r = parse_rational(text);
    if (denominator(r) != 1) throw InputError(std::string(flag) + " must be an integer for the integer oracle");
    return numerator(r);
}

/// Nested games are flattened into a single game first.
inline Game game_arg(const std::string& path) {
    const nlohmann::json doc = load(path);
    return json_io::has_nested_games(doc) ? flatten(json_io::composite_from_json(doc)) : json_io::game_from_json(doc);
}

inline int canonicalize_cmd(const std::string& path, std::ostream& out) {
    out << json_io::to_json(canonicalize(game_arg(path))).dump(2) << "\n";
    return kOk;
}

inline int equiv_cmd(const std::string& a, const std::string& b, std::ostream& out) {
    const bool same = equivalent(game_arg(a), game_arg(b));
    out << (same ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
    return same ? kOk : kVerificationFailed;
}

inline int derive_cmd(const std::string& path, const std::string& epsilon, const std::string& trace_out,
                      std::size_t max_fanout, std::ostream& out) {
    const Precision prec(parse_rational(epsilon));
    const auto doc = load(path);
    IntervalDerivation d = json_io::has_nested_games(doc)
                               ? derive_composite_value(json_io::composite_from_json(doc), prec, max_fanout)
                               : derive_value(json_io::game_from_json(doc), prec, max_fanout);
    verify(d.trace);
    if (d.lower == d.upper) {
        out << "value " << to_string(d.lower) << "\n";
    } else {
        out << "value in [" << to_string(d.lower) << ", " << to_string(d.upper) << "]\n";
    }
    out << "steps " << d.trace.steps.size() << "\n";
    if (!trace_out.empty()) {
        std::ofstream f(trace_out, std::ios::binary);
        if (!f) throw InputError("cannot write " + trace_out);
        f << json_io::to_json(d.trace).dump(2) << "\n";
    }
    return kOk;
}

inline std::string event_text(const Event& e) { return qgame::detail::event_string(e.members); }

inline int prob_check_cmd(const std::string& path, long long bound, std::ostream& out) {
    const Measurement m = json_io::measurement_from_json(load(path));
    const auto occ = occurring_spectrum(m);
    if (occ.empty()) throw EmptyGameError("measurement has no occurring outcome");
    out << "outcomes " << occ.size() << "\n";

    std::vector<Event> ordered;
    if (occ.size() <= kMaxSearchOutcomes) {
        ordered = power_set_events(m);
    } else {
        for (const auto& x : occ) ordered.push_back(Event{m, {x}});
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Event& a, const Event& b) { return more_probable(a, b) == Ordering::Less; });
    out << "order";
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (i > 0) out << (more_probable(ordered[i], ordered[i - 1]) == Ordering::Equivalent ? " ~" : " <");
        out << " " << event_text(ordered[i]);
    }
    out << "\n";

    int rc = kOk;
    const MeasureReport report = check_measure(power_set_events(m), weight_measure(m));
    out << "weight measure: (a) " << (report.order ? "holds" : "fails") << ", (b) "
        << (report.additive ? "holds" : "fails") << ", (c) " << (report.normalized ? "holds" : "fails") << "\n";
    if (!report.all()) rc = kVerificationFailed;

    if (occ.size() > kMaxSearchOutcomes) {
        out << "uniqueness skipped: more than " << kMaxSearchOutcomes << " outcomes\n";
        return rc;
    }
    const UniquenessResult u = uniqueness_search(m, bound);
    out << "uniqueness " << to_string(u.verdict) << " (" << u.passing.size() << " of " << u.candidates_examined
        << " candidates pass at denominator bound " << bound << ")\n";
    for (const auto& cm : u.passing) {
        out << "  passing";
        for (const auto& [x, v] : cm.assignment) out << " " << to_string(x) << ":" << to_string(v);
        out << "\n";
    }
    if (u.verdict == Uniqueness::Impostor) rc = kVerificationFailed;
    return rc;
}

inline int value_fn_cmd(const std::string& oracle, const std::string& unit, const std::string& target, int depth,
                        std::ostream& out) {
    Rational lower, upper;
    if (oracle == "integer") {
        const auto cut = build_value(integer_oracle(), integer_arg(unit, "--unit"), integer_arg(target, "--target"), depth);
        lower = cut.lower;
        upper = cut.upper;
    } else {
        const auto cut = build_value(money_oracle(), parse_rational(unit), parse_rational(target), depth);
        lower = cut.lower;
        upper = cut.upper;
    }
    out << "lower " << to_string(lower) << "\nupper " << to_string(upper) << "\n";
    return kOk;
}

inline int infer_cmd(const std::vector<long long>& sweep, long long n, const std::string& p, const std::string& x,
                     const std::string& y, const std::string& epsilon, std::ostream& out) {
    RepeatedMeasurement rm{n, parse_rational(p), parse_rational(x), parse_rational(y), parse_rational(epsilon)};
    if (!sweep.empty()) {
        out << "threshold " << to_string(threshold(rm)) << "\n";
        out << "n exact_eu gaussian_approx abs_deviation\n";
        for (long long k : sweep) {
            rm.n = k;
            const Rational eu = strategy_eu(rm);
            const double g = gaussian_approx(rm);
            out << k << " " << to_string(eu) << " " << approx(g) << " " << approx(std::abs(to_double(eu) - g))
                << "\n";
        }
        out << "(gaussian columns approx)\n";
        return kOk;
    }
    validate(rm);
    out << "threshold " << to_string(threshold(rm)) << "\n";
    out << "m weight accepted\n";
    for (const auto& [m, w] : branch_table(rm.n, rm.p)) {
        out << m << " " << to_string(w) << " " << (accepts(rm, m) ? "yes" : "no") << "\n";
    }
    out << "exact_eu " << to_string(strategy_eu(rm)) << "\n";
    out << "gaussian_approx " << approx(gaussian_approx(rm)) << " (approx)\n";
    return kOk;
}

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact decision-theoretic valuation of quantum games", "qgame"};
    app.require_subcommand(1);

    std::string path, other, epsilon = "1/1000", trace_out;
    std::size_t max_fanout = kDefaultMaxFanout;
    long long bound = 12;
    std::string oracle = "integer", unit = "1", target;
    int depth = 10;
    long long n = 0;
    std::string p, x, y, eps_bet = "0";
    std::vector<long long> sweep;

    auto* canon = app.add_subcommand("canonicalize", "Print the canonical form of a game");
    canon->add_option("game", path, "Game JSON file")->required();

    auto* equiv = app.add_subcommand("equiv", "Compare the canonical forms of two games");
    equiv->add_option("first", path, "Game JSON file")->required();
    equiv->add_option("second", other, "Game JSON file")->required();

    auto* derive = app.add_subcommand("derive", "Derive a game's value from the axioms");
    derive->add_option("game", path, "Game JSON file")->required();
    derive->add_option("--epsilon", epsilon, "Largest acceptable interval width (p/q)");
    derive->add_option("--trace-out", trace_out, "Write the derivation trace JSON here");
    derive->add_option("--max-fanout", max_fanout, "Largest equal-weight fan-out");

    auto* prob = app.add_subcommand("prob-check", "Check the weight measure and its uniqueness");
    prob->add_option("measurement", path, "Measurement JSON file")->required();
    prob->add_option("--bound", bound, "Denominator bound for the uniqueness search")->check(CLI::Range(1LL, kMaxDenominatorBound));

    auto* value = app.add_subcommand("value-fn", "Bracket a value from a preference oracle");
    value->add_option("--oracle", oracle, "integer or money")->check(CLI::IsMember({"integer", "money"}));
    value->add_option("--unit", unit, "Reference consequence");
    value->add_option("--target", target, "Consequence to value")->required();
    value->add_option("--depth", depth, "Refinement depth")->check(CLI::Range(1, 62));

    auto* infer = app.add_subcommand("infer", "Frequency-betting strategy on repeated measurements");
    auto* n_opt = infer->add_option("--n", n, "Repetitions");
    infer->add_option("--p", p, "Weight of outcome 0")->required();
    infer->add_option("--x", x, "Payoff on outcome 0")->required();
    infer->add_option("--y", y, "Payoff on outcome 1")->required();
    infer->add_option("--epsilon", eps_bet, "Payoff of declining the bet");
    auto* sweep_opt = infer->add_option("--sweep", sweep, "Comma-separated repetition counts")->delimiter(',');
    n_opt->excludes(sweep_opt);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*canon) return detail::canonicalize_cmd(path, out);
        if (*equiv) return detail::equiv_cmd(path, other, out);
        if (*derive) return detail::derive_cmd(path, epsilon, trace_out, max_fanout, out);
        if (*prob) return detail::prob_check_cmd(path, bound, out);
        if (*value) return detail::value_fn_cmd(oracle, unit, target, depth, out);
        if (*infer) {
            if (sweep.empty() && n_opt->count() == 0) throw InputError("infer needs --n or --sweep");
            return detail::infer_cmd(sweep, n, p, x, y, eps_bet, out);
        }
    } catch (const SoundnessError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kVerificationFailed;
    } catch (const AxiomViolationError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kVerificationFailed;
    } catch (const OracleInconsistencyError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kVerificationFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace qgame::cli
