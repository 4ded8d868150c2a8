#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <nlohmann/json.hpp>

#include "qgame/derivation.hpp"
#include "qgame/equivalence.hpp"
#include "qgame/errors.hpp"
#include "qgame/game.hpp"
#include "qgame/probability.hpp"
#include "qgame/rational.hpp"
#include "qgame/trace.hpp"

namespace qgame::json_io {

using nlohmann::json;

/// Parses JSON text; syntax errors report line and column.
inline json parse_text(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t end = e.byte == 0 ? 0 : std::min(e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw InputError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column));
    }
}

namespace detail {

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw InputError("schema: " + where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError("schema: missing field " + where + "." + key);
    return *it;
}

inline std::string string_at(const json& j, const std::string& where) {
    if (!j.is_string()) throw InputError("schema: field " + where + " must be a string");
    return j.get<std::string>();
}

inline Rational rational_at(const json& j, const std::string& where) {
    const std::string s = string_at(j, where);
    try {
        return parse_rational(s);
    } catch (const InputError& e) {
        throw InputError("schema: field " + where + ": " + e.what());
    }
}

inline State parse_state(const json& root) {
    const json& arr = field(root, "state", "game");
    if (!arr.is_array()) throw InputError("schema: field state must be a list");
    State state;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string where = "state[" + std::to_string(k) + "]";
        const json& entry = arr[k];
        const std::string index = string_at(field(entry, "index", where), where + ".index");
        const Rational w = rational_at(field(entry, "weight", where), where + ".weight");
        Rational phase = 0;
        if (entry.contains("phase")) phase = rational_at(entry["phase"], where + ".phase");
        if (w < 0) throw InputError("schema: field " + where + ".weight must be nonnegative");
        if (!state.emplace(index, Amplitude(w, phase)).second) {
            throw InputError("schema: field " + where + ".index repeats \"" + index + "\"");
        }
    }
    return state;
}

inline Observable parse_observable(const json& root) {
    const json& obj = field(root, "observable", "game");
    if (!obj.is_object()) throw InputError("schema: field observable must be an object");
    Observable o;
    for (const auto& [index, x] : obj.items()) o.eigen.emplace(index, rational_at(x, "observable." + index));
    return o;
}

inline Consequence parse_consequence(const json& entry, const std::string& where) {
    Consequence c;
    c.label = string_at(field(entry, "label", where), where + ".label");
    if (entry.contains("value") && !entry["value"].is_null()) c.value = rational_at(entry["value"], where + ".value");
    return c;
}

inline CompositeGame parse_composite(const json& root, const std::string& where) {
    if (!root.is_object()) throw InputError("schema: " + where + " must be an object");
    CompositeGame cg;
    cg.state = parse_state(root);
    cg.observable = parse_observable(root);
    const json& pay = field(root, "payoff", where);
    if (!pay.is_object()) throw InputError("schema: field " + where + ".payoff must be an object");
    for (const auto& [key, entry] : pay.items()) {
        const std::string at = where + ".payoff." + key;
        Rational x;
        try {
            x = parse_rational(key);
        } catch (const InputError& e) {
            throw InputError("schema: field " + at + ": " + e.what());
        }
        if (cg.payoff.contains(x)) throw InputError("schema: field " + at + " repeats eigenvalue " + to_string(x));
        if (entry.is_object() && entry.contains("game")) {
            cg.payoff.emplace(x, std::make_shared<const CompositeGame>(parse_composite(entry["game"], at + ".game")));
        } else {
            cg.payoff.emplace(x, parse_consequence(entry, at));
        }
    }
    return cg;
}

inline bool is_nested(const json& root) {
    if (!root.is_object() || !root.contains("payoff") || !root["payoff"].is_object()) return false;
    for (const auto& [_, entry] : root["payoff"].items()) {
        if (entry.is_object() && entry.contains("game")) return true;
    }
    return false;
}

}  // namespace detail

inline Game game_from_json(const json& root) {
    if (detail::is_nested(root)) throw InputError("schema: payoff contains a nested game where a simple game is required");
    const CompositeGame cg = detail::parse_composite(root, "game");
    Game g{cg.state, cg.observable, {}};
    for (const auto& [x, c] : cg.payoff) g.payoff.emplace(x, std::get<Consequence>(c));
    return g;
}

inline CompositeGame composite_from_json(const json& root) { return detail::parse_composite(root, "game"); }

inline bool has_nested_games(const json& root) { return detail::is_nested(root); }

/// A measurement is a game whose payoff may be omitted.
inline Measurement measurement_from_json(const json& root) {
    return Measurement{detail::parse_state(root), detail::parse_observable(root)};
}

inline json to_json(const Consequence& c) {
    json j{{"label", c.label}};
    if (c.value) j["value"] = to_string(*c.value);
    return j;
}

inline json to_json(const Game& g) {
    json state = json::array();
    for (const auto& [i, a] : g.state) {
        json e{{"index", i}, {"weight", to_string(a.weight())}};
        if (a.phase() != 0) e["phase"] = to_string(a.phase());
        state.push_back(std::move(e));
    }
    json obs = json::object();
    for (const auto& [i, x] : g.observable.eigen) obs[i] = to_string(x);
    json pay = json::object();
    for (const auto& [x, c] : g.payoff) pay[to_string(x)] = to_json(c);
    return json{{"state", state}, {"observable", obs}, {"payoff", pay}};
}

inline json to_json(const CanonicalGame& cg) {
    json arr = json::array();
    for (const auto& b : cg.branches) {
        json e = to_json(b.consequence);
        e["weight"] = to_string(b.weight);
        arr.push_back(std::move(e));
    }
    return arr;
}

namespace detail {

inline json map_json(const SpectrumMap& f) {
    json j = json::object();
    for (const auto& [x, y] : f) j[to_string(x)] = to_string(y);
    return j;
}

inline json gperm_json(const GeneralizedPermutation& u) {
    json t = json::object();
    for (const auto& [a, b] : u.targets()) t[a] = b;
    json ph = json::object();
    for (const auto& [a, turns] : u.phases()) ph[a] = to_string(turns);
    return json{{"targets", t}, {"phases", ph}};
}

inline json params_json(const PetParams& p) { return json{{"f", map_json(p.f)}}; }
inline json params_json(const MetParams& p) { return json{{"u", gperm_json(p.u)}, {"pi", map_json(p.pi)}}; }
inline json params_json(const OpSymmetryParams& p) { return json{{"u", gperm_json(p.u)}}; }
inline json params_json(const StateSymmetryParams& p) { return json{{"f", map_json(p.f)}}; }

inline json params_json(const OetParams& p) {
    json obs = json::object();
    for (const auto& [i, x] : p.observable.eigen) obs[i] = to_string(x);
    json pay = json::object();
    for (const auto& [x, c] : p.payoff) pay[to_string(x)] = to_json(c);
    return json{{"observable", obs}, {"payoff", pay}};
}

inline json params_json(const SetParams& p) {
    json images = json::object();
    for (const auto& [a, comps] : p.images) {
        json arr = json::array();
        for (const auto& c : comps) {
            json e{{"target", c.target}, {"weight", to_string(c.share.weight())}};
            if (c.share.phase() != 0) e["phase"] = to_string(c.share.phase());
            arr.push_back(std::move(e));
        }
        images[a] = std::move(arr);
    }
    json extra = json::object();
    for (const auto& [i, x] : p.extra) extra[i] = to_string(x);
    return json{{"images", images}, {"extra", extra}};
}

}  // namespace detail

inline json to_json(const RewriteStep& s) {
    return json{{"rule", to_string(s.rule)},
                {"params", std::visit([](const auto& p) { return detail::params_json(p); }, s.params)},
                {"before", to_json(canonicalize(s.before))},
                {"after", to_json(canonicalize(s.after))}};
}

inline json to_json(const DerivationTrace& t) {
    json steps = json::array();
    for (const auto& entry : t.steps) {
        json e;
        if (const auto* step = std::get_if<RewriteStep>(&entry.item)) {
            e = to_json(*step);
        } else {
            e = json{{"axiom", to_string(std::get<AxiomUse>(entry.item).axiom())}};
        }
        e["claim"] = to_string(entry.claim);
        steps.push_back(std::move(e));
    }
    return json{{"steps", steps}, {"conclusion", to_string(t.conclusion)}};
}

}  // namespace qgame::json_io
