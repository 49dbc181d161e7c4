#pragma once

// Seeded random 2-dimensional polynomial SDE models shared between the unit
// tests and the acceptance suite. Coefficients are small exact rationals so
// every downstream comparison stays exact.

#include <cstdint>
#include <vector>

#include "stochtree/philox.hpp"
#include "stochtree/polynomial.hpp"
#include "stochtree/sde_model.hpp"

namespace testsupport {

inline stochtree::Rational small_rational(const stochtree::Philox& rng, std::uint64_t& counter) {
    auto b = rng.block(counter++);
    int num = static_cast<int>(b[0] % 5) - 2; // -2..2
    int den = 1 + static_cast<int>(b[1] % 2); // 1..2
    return stochtree::Rational(num, den);
}

inline stochtree::MultiPoly random_poly_2d(const stochtree::Philox& rng, std::uint64_t& counter) {
    static const std::vector<std::vector<int>> monomials = {
        {0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};
    stochtree::MultiPoly p(2);
    for (const auto& e : monomials) p.add_term(e, small_rational(rng, counter));
    return p;
}

// d = 2, m = 2 model with degree <= 2 drift, diffusion and functional.
inline stochtree::PolySdeModel random_model_2d(std::uint64_t seed) {
    stochtree::Philox rng(seed, 0x6d6f64656cULL); // distinct stream per purpose
    std::uint64_t counter = 0;
    stochtree::PolySdeModel model;
    model.d = 2;
    model.m = 2;
    model.drift = {random_poly_2d(rng, counter), random_poly_2d(rng, counter)};
    model.diffusion = {{random_poly_2d(rng, counter), random_poly_2d(rng, counter)},
                       {random_poly_2d(rng, counter), random_poly_2d(rng, counter)}};
    model.functional = random_poly_2d(rng, counter);
    model.validate();
    return model;
}

inline const std::vector<std::uint64_t>& random_model_seeds() {
    static const std::vector<std::uint64_t> seeds = {101, 202, 303};
    return seeds;
}

inline std::vector<double> random_model_point() { return {0.4, -0.3}; }

} // namespace testsupport
