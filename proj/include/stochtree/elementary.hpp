#pragma once

#include <stdexcept>
#include <vector>

#include "stochtree/polynomial.hpp"
#include "stochtree/sde_model.hpp"
#include "stochtree/tree.hpp"

namespace stochtree {

namespace detail {

// Applies the symmetric k-linear derivative tensor of one component
// polynomial g to the child value vectors: sum over all index tuples
// (J_1..J_k) of d^k g / dx_{J_1}..dx_{J_k} (x) * prod_i child[i][J_i].
// Derivative chains are recomputed per tuple; d and k are tiny here.
template <class S>
S apply_derivative_tensor(const MultiPoly& g, const std::vector<std::vector<S>>& child_values,
                          const std::vector<S>& x) {
    const int d = g.dim();
    const int k = static_cast<int>(child_values.size());
    if (k == 0) return g.eval(std::span<const S>(x));

    S total = scalar_from_rational<S>(Rational(0));
    std::vector<int> idx(k, 0);
    while (true) {
        MultiPoly deriv = g;
        for (int i = 0; i < k; ++i) deriv = deriv.derivative(idx[i]);
        if (!deriv.is_zero()) {
            S term = deriv.eval(std::span<const S>(x));
            for (int i = 0; i < k; ++i) term = term * child_values[i][idx[i]];
            total = total + term;
        }
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == d - 1) {
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++idx[pos];
    }
    return total;
}

// Value of a non-root subtree: a vector in R^d built from the drift (tau_0
// nodes) or a diffusion column (tau_j nodes). Children are consumed in
// stored order; the result is order-independent because the tensor is
// symmetric.
template <class S>
std::vector<S> elementary_vector(const Tree& t, const std::vector<S>& x,
                                 const PolySdeModel& model) {
    if (t.color.is_root())
        throw std::invalid_argument("elementary_differential: root color below the root");
    if (t.color.is_stochastic() && t.color.code() > model.m)
        throw std::invalid_argument("elementary_differential: stochastic index exceeds m");

    std::vector<std::vector<S>> child_values;
    child_values.reserve(t.children.size());
    for (const auto& c : t.children) child_values.push_back(elementary_vector(c, x, model));

    std::vector<S> out;
    out.reserve(model.d);
    for (int i = 0; i < model.d; ++i) {
        const MultiPoly& g = t.color.is_deterministic() ? model.drift[i]
                                                        : model.diffusion_entry(i, t.color.code());
        out.push_back(apply_derivative_tensor(g, child_values, x));
    }
    return out;
}

} // namespace detail

// Elementary differential F(t)(x) of a root-colored tree: the root applies
// the derivative tensor of the functional f to its children's values, inner
// nodes use the drift or the matching diffusion column.
template <class S>
S elementary_differential(const Tree& t, const std::vector<S>& x, const PolySdeModel& model) {
    if (!t.color.is_root())
        throw std::invalid_argument("elementary_differential: tree must be root-colored");
    if (static_cast<int>(x.size()) != model.d)
        throw std::invalid_argument("elementary_differential: point has wrong dimension");
    std::vector<std::vector<S>> child_values;
    child_values.reserve(t.children.size());
    for (const auto& c : t.children)
        child_values.push_back(detail::elementary_vector(c, x, model));
    return detail::apply_derivative_tensor(model.functional, child_values, x);
}

inline double elementary_differential(const Tree& t, const std::vector<double>& x,
                                      const PolySdeModel& model) {
    return elementary_differential<double>(t, x, model);
}

inline Rational elementary_differential_exact(const Tree& t, const std::vector<Rational>& x,
                                              const PolySdeModel& model) {
    return elementary_differential<Rational>(t, x, model);
}

} // namespace stochtree
