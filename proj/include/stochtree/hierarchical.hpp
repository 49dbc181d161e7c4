#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "stochtree/operators.hpp"
#include "stochtree/sde_model.hpp"
#include "stochtree/wiener.hpp"
#include "stochtree/word.hpp"

namespace stochtree {

// Hierarchical multi-index set A_p = {alpha : l(alpha) + n(alpha) <= 2p},
// where n counts zero indices. Listed by length, then lexicographically.
inline std::vector<Word> hierarchical_set(HalfInt p, int m) {
    if (p.twice < 0) throw std::invalid_argument("hierarchical_set: p must be >= 0");
    if (m < 1) throw std::invalid_argument("hierarchical_set: m must be >= 1");
    const int budget = p.twice;
    std::vector<Word> out;
    Word current;
    auto recurse = [&](int used, auto&& self) -> void {
        out.push_back(current);
        if (used >= budget) return;
        for (int j = 0; j <= m; ++j) {
            int cost = j == 0 ? 2 : 1;
            if (used + cost > budget) continue;
            current.push_back(j);
            self(used + cost, self);
            current.pop_back();
        }
    };
    recurse(0, recurse);
    std::sort(out.begin(), out.end(), WordOrder{});
    return out;
}

// Truncation over the hierarchical set, compiled against a fixed point:
// sum over alpha in A_p of f_alpha(x0) * I_alpha. Shares no code with the
// tree route (no trees, no integral product rule); used as its independent
// cross-check.
class HierarchicalPlan {
  public:
    HierarchicalPlan(const PolySdeModel& model, const std::vector<double>& x0, HalfInt p,
                     Calculus calc) {
        model.validate();
        if (static_cast<int>(x0.size()) != model.d)
            throw std::invalid_argument("HierarchicalPlan: x0 has wrong dimension");
        words_ = hierarchical_set(p, model.m);
        coefficients_.reserve(words_.size());
        for (const auto& alpha : words_)
            coefficients_.push_back(coefficient_function(alpha, model, calc).eval(x0));
    }

    const std::vector<Word>& words() const { return words_; }

    double evaluate(std::span<const double> word_values) const {
        if (word_values.size() != coefficients_.size())
            throw std::invalid_argument("HierarchicalPlan: value vector has wrong length");
        double sum = 0;
        for (std::size_t i = 0; i < coefficients_.size(); ++i)
            sum += coefficients_[i] * word_values[i];
        return sum;
    }

    double evaluate(const WordIntegralTable& table) const {
        double sum = 0;
        for (std::size_t i = 0; i < coefficients_.size(); ++i)
            sum += coefficients_[i] * table.at(words_[i]);
        return sum;
    }

  private:
    std::vector<Word> words_;
    std::vector<double> coefficients_;
};

inline double hierarchical_expansion(const PolySdeModel& model, const std::vector<double>& x0,
                                     HalfInt p, Calculus calc, const WordIntegralTable& table) {
    if (table.calculus != calc)
        throw std::invalid_argument("hierarchical_expansion: table calculus mismatch");
    return HierarchicalPlan(model, x0, p, calc).evaluate(table);
}

} // namespace stochtree
