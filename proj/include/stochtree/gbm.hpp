#pragma once

#include <cmath>

#include "stochtree/rational.hpp"
#include "stochtree/sde_model.hpp"

namespace stochtree {

// Built-in geometric Brownian motion dX = mu X dt + sigma X *dW, f(x) = x.
struct GbmParams {
    Rational mu{1, 2};
    Rational sigma{3, 10};
    Rational x0{1};
};

inline PolySdeModel make_gbm_model(const GbmParams& params) {
    PolySdeModel model;
    model.d = 1;
    model.m = 1;
    model.drift = {MultiPoly::variable(1, 0, params.mu)};
    model.diffusion = {{MultiPoly::variable(1, 0, params.sigma)}};
    model.functional = MultiPoly::variable(1, 0);
    return model;
}

// Closed-form solution of the Ito GBM over an interval of length h with
// Wiener endpoint w: x0 * exp((mu - sigma^2/2) h + sigma w).
inline double gbm_exact(double x0, double mu, double sigma, double h, double w) {
    return x0 * std::exp((mu - 0.5 * sigma * sigma) * h + sigma * w);
}

// Same SDE read in the Stratonovich sense: x0 * exp(mu h + sigma w).
inline double gbm_exact_stratonovich(double x0, double mu, double sigma, double h, double w) {
    return x0 * std::exp(mu * h + sigma * w);
}

} // namespace stochtree
