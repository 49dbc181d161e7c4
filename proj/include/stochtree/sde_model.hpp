#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochtree/polynomial.hpp"

namespace stochtree {

// Autonomous SDE dX = a(X) dt + sum_j b^j(X) *dW^j together with a scalar
// functional f, all components exact multivariate polynomials over R^d.
// Columns b^j are stored as diffusion[j-1].
struct PolySdeModel {
    int d = 1;
    int m = 1;
    std::vector<MultiPoly> drift;                  // d components
    std::vector<std::vector<MultiPoly>> diffusion; // m columns, d components each
    MultiPoly functional{1};

    void validate() const {
        if (d < 1 || m < 1) throw std::invalid_argument("model: d and m must be >= 1");
        if (static_cast<int>(drift.size()) != d)
            throw std::invalid_argument("model: drift must have d components");
        if (static_cast<int>(diffusion.size()) != m)
            throw std::invalid_argument("model: diffusion must have m columns");
        for (const auto& p : drift)
            if (p.dim() != d) throw std::invalid_argument("model: drift dimension mismatch");
        for (const auto& col : diffusion) {
            if (static_cast<int>(col.size()) != d)
                throw std::invalid_argument("model: diffusion column must have d components");
            for (const auto& p : col)
                if (p.dim() != d) throw std::invalid_argument("model: diffusion dimension mismatch");
        }
        if (functional.dim() != d)
            throw std::invalid_argument("model: functional dimension mismatch");
    }

    const MultiPoly& diffusion_entry(int i, int j) const { return diffusion[j - 1][i]; }
};

inline nlohmann::json poly_to_json(const MultiPoly& p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [e, c] : p.terms()) {
        out.push_back({{"exp", e}, {"num", c.num()}, {"den", c.den()}});
    }
    return out;
}

inline MultiPoly poly_from_json(const nlohmann::json& j, int dim) {
    if (!j.is_array()) throw std::invalid_argument("polynomial JSON must be an array of terms");
    MultiPoly p(dim);
    for (const auto& term : j) {
        std::vector<int> exps = term.at("exp").get<std::vector<int>>();
        std::int64_t num = term.at("num").get<std::int64_t>();
        std::int64_t den = term.value("den", std::int64_t{1});
        p.add_term(std::move(exps), Rational(num, den));
    }
    return p;
}

inline nlohmann::json model_to_json(const PolySdeModel& model) {
    model.validate();
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : model.drift) a.push_back(poly_to_json(p));
    nlohmann::json b = nlohmann::json::array();
    for (const auto& col : model.diffusion) {
        nlohmann::json col_json = nlohmann::json::array();
        for (const auto& p : col) col_json.push_back(poly_to_json(p));
        b.push_back(col_json);
    }
    return {{"d", model.d}, {"m", model.m}, {"a", a}, {"b", b},
            {"f", poly_to_json(model.functional)}};
}

// Model definition file: {"d": int, "m": int, "a": [poly x d],
// "b": [[poly x d] x m] (one array per diffusion column), "f": poly}
// where poly = [{"exp": [e1..ed], "num": p, "den": q}, ...].
inline PolySdeModel model_from_json(const nlohmann::json& j) {
    PolySdeModel model;
    model.d = j.at("d").get<int>();
    model.m = j.at("m").get<int>();
    if (model.d < 1 || model.m < 1) throw std::invalid_argument("model: d and m must be >= 1");
    const auto& a = j.at("a");
    if (!a.is_array() || static_cast<int>(a.size()) != model.d)
        throw std::invalid_argument("model: 'a' must be an array of d polynomials");
    for (const auto& p : a) model.drift.push_back(poly_from_json(p, model.d));
    const auto& b = j.at("b");
    if (!b.is_array() || static_cast<int>(b.size()) != model.m)
        throw std::invalid_argument("model: 'b' must be an array of m diffusion columns");
    for (const auto& col : b) {
        if (!col.is_array() || static_cast<int>(col.size()) != model.d)
            throw std::invalid_argument("model: diffusion column must have d polynomials");
        std::vector<MultiPoly> column;
        for (const auto& p : col) column.push_back(poly_from_json(p, model.d));
        model.diffusion.push_back(std::move(column));
    }
    model.functional = poly_from_json(j.at("f"), model.d);
    model.validate();
    return model;
}

} // namespace stochtree
