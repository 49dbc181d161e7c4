#pragma once

#include <stdexcept>

#include "stochtree/polynomial.hpp"
#include "stochtree/sde_model.hpp"
#include "stochtree/word.hpp"

namespace stochtree {

// The four differential operators attached to an SDE (a, b):
//
//   hat_l0 g = sum_k a^k d_k g                    (drift part)
//   hat_lj g = sum_{k,l} b^{k,j} b^{l,j} d^2_{kl} g
//   lj g     = sum_k b^{k,j} d_k g
//   l0       = hat_l0 + 1/2 sum_j hat_lj          (Ito generator)
//
// All results are exact polynomials.

inline MultiPoly apply_hat_l0(const MultiPoly& g, const PolySdeModel& model) {
    if (g.dim() != model.d) throw std::invalid_argument("apply_hat_l0: dimension mismatch");
    MultiPoly out(model.d);
    for (int k = 0; k < model.d; ++k) out += model.drift[k] * g.derivative(k);
    return out;
}

inline MultiPoly apply_hat_lj(const MultiPoly& g, const PolySdeModel& model, int j) {
    if (g.dim() != model.d) throw std::invalid_argument("apply_hat_lj: dimension mismatch");
    if (j < 1 || j > model.m) throw std::invalid_argument("apply_hat_lj: j out of range");
    MultiPoly out(model.d);
    for (int k = 0; k < model.d; ++k) {
        MultiPoly dk = g.derivative(k);
        for (int l = 0; l < model.d; ++l) {
            out += model.diffusion_entry(k, j) * model.diffusion_entry(l, j) * dk.derivative(l);
        }
    }
    return out;
}

inline MultiPoly apply_lj(const MultiPoly& g, const PolySdeModel& model, int j) {
    if (g.dim() != model.d) throw std::invalid_argument("apply_lj: dimension mismatch");
    if (j < 1 || j > model.m) throw std::invalid_argument("apply_lj: j out of range");
    MultiPoly out(model.d);
    for (int k = 0; k < model.d; ++k) out += model.diffusion_entry(k, j) * g.derivative(k);
    return out;
}

inline MultiPoly apply_l0(const MultiPoly& g, const PolySdeModel& model) {
    MultiPoly out = apply_hat_l0(g, model);
    for (int j = 1; j <= model.m; ++j) {
        MultiPoly second = apply_hat_lj(g, model, j);
        second *= Rational(1, 2);
        out += second;
    }
    return out;
}

struct OperatorKind {
    enum class Tag { hat_l0, hat_lj, lj, l0 } tag;
    int j = 0; // Wiener index for the j-indexed kinds

    static OperatorKind hat_l0() { return {Tag::hat_l0, 0}; }
    static OperatorKind hat_lj(int j) { return {Tag::hat_lj, j}; }
    static OperatorKind lj(int j) { return {Tag::lj, j}; }
    static OperatorKind l0() { return {Tag::l0, 0}; }
};

inline MultiPoly apply_operator(OperatorKind op, const MultiPoly& g, const PolySdeModel& model) {
    switch (op.tag) {
        case OperatorKind::Tag::hat_l0: return apply_hat_l0(g, model);
        case OperatorKind::Tag::hat_lj: return apply_hat_lj(g, model, op.j);
        case OperatorKind::Tag::lj: return apply_lj(g, model, op.j);
        case OperatorKind::Tag::l0: return apply_l0(g, model);
    }
    throw std::logic_error("apply_operator: unknown operator kind");
}

// Coefficient function f_alpha of the Ito/Stratonovich-Taylor expansion:
// the operator with the first (innermost) word index is applied last. A zero
// index applies the full generator under Ito and only the drift part under
// Stratonovich; index j applies the first-order operator lj.
inline MultiPoly coefficient_function(const Word& alpha, const PolySdeModel& model,
                                      Calculus calc) {
    MultiPoly g = model.functional;
    for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) {
        int j = *it;
        if (j < 0 || j > model.m)
            throw std::invalid_argument("coefficient_function: word index out of range");
        if (j == 0)
            g = calc == Calculus::ito ? apply_l0(g, model) : apply_hat_l0(g, model);
        else
            g = apply_lj(g, model, j);
    }
    return g;
}

} // namespace stochtree
