#pragma once

#include <json.hpp>

#include "stochtree/rational.hpp"
#include "stochtree/word.hpp"

namespace stochtree {

// Wire format of an integral combination: array of {"word": [j1..jn],
// "num": p, "den": q}, sorted by word length then lexicographically
// (the natural iteration order of the terms map).
inline nlohmann::json combination_to_json(const IntegralCombination& combo) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [w, c] : combo.terms())
        terms.push_back({{"word", w}, {"num", c.num()}, {"den", c.den()}});
    return terms;
}

inline IntegralCombination combination_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("integral combination JSON must be an array");
    IntegralCombination out;
    for (const auto& term : j) {
        Word w = term.at("word").get<Word>();
        std::int64_t num = term.at("num").get<std::int64_t>();
        std::int64_t den = term.value("den", std::int64_t{1});
        out.add(std::move(w), Rational(num, den));
    }
    return out;
}

} // namespace stochtree
