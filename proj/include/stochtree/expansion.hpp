#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochtree/elementary.hpp"
#include "stochtree/enumerate.hpp"
#include "stochtree/sde_model.hpp"
#include "stochtree/wiener.hpp"
#include "stochtree/word.hpp"

namespace stochtree {

// One record of the truncated expansion: the tree, the elementary
// differential at the expansion point, the symmetry divisor and the word
// combination its multiple integral reduces to.
struct ExpansionTerm {
    Tree tree;
    Rational f_value;
    std::uint64_t sigma = 1;
    IntegralCombination words;
};

// All expansion records for trees of order <= p, exact in the evaluation
// point. Terms whose elementary differential vanishes are dropped; they
// contribute nothing for any path.
inline std::vector<ExpansionTerm> symbolic_expansion(const PolySdeModel& model,
                                                     const std::vector<Rational>& x0, HalfInt p,
                                                     Calculus calc) {
    model.validate();
    std::vector<ExpansionTerm> out;
    for (const auto& t : enumerate_trees(p, model.m)) {
        ExpansionTerm term;
        term.tree = t;
        term.f_value = elementary_differential_exact(t, x0, model);
        if (term.f_value.is_zero()) continue;
        term.sigma = symmetry_factor(t);
        term.words = reduce_tree(t, calc);
        out.push_back(std::move(term));
    }
    return out;
}

// Collects sum_t F(t)(x0)/sigma(t) * I_t by word, the form in which two
// expansions can be compared coefficient-for-coefficient.
inline std::map<Word, Rational, WordOrder> collect_by_word(const std::vector<ExpansionTerm>& terms) {
    std::map<Word, Rational, WordOrder> out;
    for (const auto& term : terms) {
        Rational weight = term.f_value / Rational(static_cast<std::int64_t>(term.sigma));
        for (const auto& [w, c] : term.words.terms()) {
            Rational& slot = out[w];
            slot += weight * c;
            if (slot.is_zero()) out.erase(w);
        }
    }
    return out;
}

// Truncated expansion compiled against a fixed evaluation point: a flat list
// of (word, weight) pairs ready for per-path dot products.
class ExpansionPlan {
  public:
    ExpansionPlan(const PolySdeModel& model, const std::vector<double>& x0, HalfInt p,
                  Calculus calc) {
        model.validate();
        if (static_cast<int>(x0.size()) != model.d)
            throw std::invalid_argument("ExpansionPlan: x0 has wrong dimension");
        std::map<Word, double, WordOrder> collected;
        for (const auto& t : enumerate_trees(p, model.m)) {
            double f_value = elementary_differential(t, x0, model);
            if (f_value == 0.0) continue;
            double weight = f_value / static_cast<double>(symmetry_factor(t));
            IntegralCombination reduction = reduce_tree(t, calc);
            for (const auto& [w, c] : reduction.terms()) collected[w] += weight * c.to_double();
        }
        words_.reserve(collected.size());
        weights_.reserve(collected.size());
        for (const auto& [w, weight] : collected) {
            words_.push_back(w);
            weights_.push_back(weight);
        }
    }

    const std::vector<Word>& words() const { return words_; }

    double evaluate(std::span<const double> word_values) const {
        if (word_values.size() != weights_.size())
            throw std::invalid_argument("ExpansionPlan: value vector has wrong length");
        double sum = 0;
        for (std::size_t i = 0; i < weights_.size(); ++i) sum += weights_[i] * word_values[i];
        return sum;
    }

    double evaluate(const WordIntegralTable& table) const {
        double sum = 0;
        for (std::size_t i = 0; i < weights_.size(); ++i) sum += weights_[i] * table.at(words_[i]);
        return sum;
    }

  private:
    std::vector<Word> words_;
    std::vector<double> weights_;
};

// Z_p on one path: sum over trees of order <= p of F(t)(x0) I_t / sigma(t),
// with the word integrals read from the supplied table.
inline double evaluate_truncated_expansion(const PolySdeModel& model,
                                           const std::vector<double>& x0, HalfInt p, Calculus calc,
                                           const WordIntegralTable& table) {
    if (table.calculus != calc)
        throw std::invalid_argument("evaluate_truncated_expansion: table calculus mismatch");
    return ExpansionPlan(model, x0, p, calc).evaluate(table);
}

} // namespace stochtree
