#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtree/rational.hpp"
#include "stochtree/tree.hpp"

namespace stochtree {

// Iterated-integral word: index sequence over {0, 1, ..., m} with the
// innermost integrator first. Index 0 integrates against ds, index j against
// dW^j. The empty word is the unit.
using Word = std::vector<int>;

inline std::size_t word_length(const Word& w) { return w.size(); }

inline std::size_t zero_index_count(const Word& w) {
    std::size_t n = 0;
    for (int j : w)
        if (j == 0) ++n;
    return n;
}

inline std::string word_to_string(const Word& w) {
    std::string out = "(";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(w[i]);
    }
    out += ")";
    return out;
}

// Orders words by length, then lexicographically; the serialization order.
struct WordOrder {
    bool operator()(const Word& a, const Word& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

enum class Calculus { ito, stratonovich };

inline std::string to_string(Calculus c) {
    return c == Calculus::ito ? "ito" : "stratonovich";
}

inline Calculus parse_calculus(const std::string& s) {
    if (s == "ito") return Calculus::ito;
    if (s == "stratonovich") return Calculus::stratonovich;
    throw std::invalid_argument("calculus must be 'ito' or 'stratonovich', got '" + s + "'");
}

// Finite linear combination of iterated-integral words with exact rational
// coefficients. Zero coefficients are never stored.
class IntegralCombination {
  public:
    using Terms = std::map<Word, Rational, WordOrder>;

    IntegralCombination() = default;
    IntegralCombination(Word w, Rational c) { add(std::move(w), c); }

    static IntegralCombination one() { return IntegralCombination(Word{}, Rational(1)); }

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coefficient(const Word& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add(Word w, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(std::move(w), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    IntegralCombination& operator+=(const IntegralCombination& o) {
        for (const auto& [w, c] : o.terms_) add(w, c);
        return *this;
    }

    IntegralCombination& operator*=(const Rational& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [w, coeff] : terms_) coeff *= c;
        return *this;
    }

    // Appends index j as the new outermost integrator of every word.
    IntegralCombination integrate(int j) const {
        IntegralCombination out;
        for (const auto& [w, c] : terms_) {
            Word extended = w;
            extended.push_back(j);
            out.terms_.emplace(std::move(extended), c);
        }
        return out;
    }

    friend bool operator==(const IntegralCombination& a, const IntegralCombination& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const IntegralCombination& a, const IntegralCombination& b) {
        return !(a == b);
    }

    // Longest-first display, matching how expansions are usually written.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!out.empty()) out += " + ";
            out += it->second.to_string() + "*" + word_to_string(it->first);
        }
        return out;
    }

  private:
    Terms terms_;
};

// Product of two iterated integrals as a combination of iterated integrals.
// Both outermost integrators peel off recursively; when they carry the same
// nonzero index, Ito calculus adds the quadratic-covariation term in which
// the pair merges into one ds integration.
inline IntegralCombination word_product(const Word& u, const Word& v, Calculus calc) {
    if (u.empty()) return IntegralCombination(v, Rational(1));
    if (v.empty()) return IntegralCombination(u, Rational(1));

    const int i = u.back();
    const int j = v.back();
    Word u_inner(u.begin(), u.end() - 1);
    Word v_inner(v.begin(), v.end() - 1);

    IntegralCombination out;
    if (calc == Calculus::ito && i == j && i != 0) {
        IntegralCombination merged = word_product(u_inner, v_inner, calc).integrate(0);
        out += merged;
    }
    out += word_product(u_inner, v, calc).integrate(i);
    out += word_product(u, v_inner, calc).integrate(j);
    return out;
}

// Bilinear extension of word_product to combinations.
inline IntegralCombination combination_product(const IntegralCombination& a,
                                               const IntegralCombination& b, Calculus calc) {
    IntegralCombination out;
    for (const auto& [u, cu] : a.terms()) {
        for (const auto& [v, cv] : b.terms()) {
            IntegralCombination p = word_product(u, v, calc);
            p *= cu * cv;
            out += p;
        }
    }
    return out;
}

namespace detail {

inline IntegralCombination reduce_subtree(const Tree& t, Calculus calc) {
    if (t.color.is_root())
        throw std::invalid_argument("reduce_tree: root color below the root");
    IntegralCombination inner = IntegralCombination::one();
    for (const auto& child : t.children)
        inner = combination_product(inner, reduce_subtree(child, calc), calc);
    return inner.integrate(t.color.integrator_index());
}

} // namespace detail

// Multiple stochastic integral of a root-colored tree, reduced to an exact
// linear combination of iterated-integral words. Children of the root are
// multiplied with no outer integration; children of any other node are
// multiplied inside that node's integrator.
inline IntegralCombination reduce_tree(const Tree& t, Calculus calc) {
    if (!t.color.is_root())
        throw std::invalid_argument("reduce_tree: tree must be root-colored");
    IntegralCombination out = IntegralCombination::one();
    for (const auto& child : t.children)
        out = combination_product(out, detail::reduce_subtree(child, calc), calc);
    return out;
}

// Expectation of an iterated Ito integral over an interval of length h:
// h^n/n! when every index is 0, and 0 as soon as any Wiener index appears.
inline double ito_word_expectation(const Word& w, double h) {
    if (h < 0) throw std::invalid_argument("ito_word_expectation: h must be >= 0");
    double value = 1.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        if (w[n] != 0) return 0.0;
        value *= h / static_cast<double>(n + 1);
    }
    return value;
}

} // namespace stochtree
