#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtree/rational.hpp"

namespace stochtree {

namespace detail {

template <class S>
S scalar_from_rational(const Rational& r);

template <>
inline double scalar_from_rational<double>(const Rational& r) {
    return r.to_double();
}

template <>
inline Rational scalar_from_rational<Rational>(const Rational& r) {
    return r;
}

} // namespace detail

// Multivariate polynomial with exact rational coefficients, keyed by
// exponent vectors. Derivatives of any order are exact, so expansion
// coefficients carry no truncation error.
class MultiPoly {
  public:
    using Terms = std::map<std::vector<int>, Rational>;

    explicit MultiPoly(int dim = 1) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("MultiPoly: dimension must be >= 1");
    }

    static MultiPoly constant(int dim, const Rational& c) {
        MultiPoly p(dim);
        p.add_term(std::vector<int>(dim, 0), c);
        return p;
    }

    static MultiPoly variable(int dim, int var, const Rational& scale = Rational(1)) {
        if (var < 0 || var >= dim) throw std::invalid_argument("MultiPoly: variable out of range");
        MultiPoly p(dim);
        std::vector<int> e(dim, 0);
        e[var] = 1;
        p.add_term(std::move(e), scale);
        return p;
    }

    int dim() const { return dim_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(std::vector<int> exps, const Rational& c) {
        if (static_cast<int>(exps.size()) != dim_)
            throw std::invalid_argument("MultiPoly: exponent vector has wrong dimension");
        for (int e : exps)
            if (e < 0) throw std::invalid_argument("MultiPoly: negative exponent");
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(std::move(exps), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    MultiPoly& operator+=(const MultiPoly& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        check_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    MultiPoly& operator*=(const Rational& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, coeff] : terms_) coeff *= c;
        return *this;
    }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        a.check_dim(b);
        MultiPoly out(a.dim_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                std::vector<int> e(a.dim_);
                for (int i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
                out.add_term(std::move(e), ca * cb);
            }
        }
        return out;
    }

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    // Exact partial derivative with respect to variable `var`.
    MultiPoly derivative(int var) const {
        if (var < 0 || var >= dim_) throw std::invalid_argument("MultiPoly: variable out of range");
        MultiPoly out(dim_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            std::vector<int> d = e;
            d[var] -= 1;
            out.add_term(std::move(d), c * Rational(e[var]));
        }
        return out;
    }

    // Evaluation over double (for simulation) or Rational (for exact
    // symbolic comparisons).
    template <class S>
    S eval(std::span<const S> x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw std::invalid_argument("MultiPoly: evaluation point has wrong dimension");
        S sum = detail::scalar_from_rational<S>(Rational(0));
        for (const auto& [e, c] : terms_) {
            S term = detail::scalar_from_rational<S>(c);
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < e[i]; ++k) term = term * x[i];
            sum = sum + term;
        }
        return sum;
    }

    double eval(const std::vector<double>& x) const { return eval<double>(x); }
    Rational eval(const std::vector<Rational>& x) const { return eval<Rational>(x); }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [e, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += c.to_string();
            for (int i = 0; i < dim_; ++i) {
                if (e[i] == 0) continue;
                out += "*x" + std::to_string(i);
                if (e[i] > 1) out += "^" + std::to_string(e[i]);
            }
        }
        return out;
    }

  private:
    void check_dim(const MultiPoly& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("MultiPoly: dimension mismatch");
    }

    int dim_;
    Terms terms_;
};

} // namespace stochtree
