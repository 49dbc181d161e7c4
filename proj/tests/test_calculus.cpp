#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "stochtree/elementary.hpp"
#include "stochtree/gbm.hpp"
#include "stochtree/json_io.hpp"
#include "stochtree/operators.hpp"
#include "stochtree/polynomial.hpp"
#include "stochtree/sde_model.hpp"

#include "random_models.hpp"

using namespace stochtree;

namespace {

const GbmParams gbm_params{Rational(1, 2), Rational(3, 10), Rational(1)};

// Finite-difference application of a single operator to an exactly evaluated
// polynomial; only lives in tests, the library surface stays exact.
double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

double fd_partial(const MultiPoly& g, std::vector<double> x, int k) {
    double h = fd_step(x[k]);
    x[k] += h;
    double up = g.eval(x);
    x[k] -= 2 * h;
    double down = g.eval(x);
    return (up - down) / (2 * h);
}

double fd_second(const MultiPoly& g, std::vector<double> x, int k, int l) {
    double hk = fd_step(x[k]);
    if (k == l) {
        double mid = g.eval(x);
        x[k] += hk;
        double up = g.eval(x);
        x[k] -= 2 * hk;
        double down = g.eval(x);
        return (up - 2 * mid + down) / (hk * hk);
    }
    double hl = fd_step(x[l]);
    auto at = [&](double dk, double dl) {
        std::vector<double> y = x;
        y[k] += dk;
        y[l] += dl;
        return g.eval(y);
    };
    return (at(hk, hl) - at(hk, -hl) - at(-hk, hl) + at(-hk, -hl)) / (4 * hk * hl);
}

double fd_apply_operator(int index, Calculus calc, const MultiPoly& g, const PolySdeModel& model,
                         const std::vector<double>& x) {
    if (index > 0) {
        double sum = 0;
        for (int k = 0; k < model.d; ++k)
            sum += model.diffusion_entry(k, index).eval(x) * fd_partial(g, x, k);
        return sum;
    }
    double sum = 0;
    for (int k = 0; k < model.d; ++k) sum += model.drift[k].eval(x) * fd_partial(g, x, k);
    if (calc == Calculus::ito) {
        for (int j = 1; j <= model.m; ++j)
            for (int k = 0; k < model.d; ++k)
                for (int l = 0; l < model.d; ++l)
                    sum += 0.5 * model.diffusion_entry(k, j).eval(x) *
                           model.diffusion_entry(l, j).eval(x) * fd_second(g, x, k, l);
    }
    return sum;
}

} // namespace

TEST_CASE("polynomial basics") {
    MultiPoly mu_x = MultiPoly::variable(1, 0, Rational(1, 2));
    CHECK(mu_x.derivative(0) == MultiPoly::constant(1, Rational(1, 2)));
    CHECK(mu_x.eval(std::vector<double>{2.0}) == Approx(1.0));
    CHECK((mu_x * mu_x).eval(std::vector<double>{2.0}) == Approx(1.0));

    MultiPoly x = MultiPoly::variable(1, 0);
    CHECK((x * x).derivative(0) == x * Rational(2));
    CHECK(MultiPoly::constant(1, Rational(3)).derivative(0).is_zero());

    MultiPoly p(2);
    p.add_term({1, 2}, Rational(3, 4)); // (3/4) x0 x1^2
    CHECK(p.derivative(1).eval(std::vector<Rational>{Rational(2), Rational(3)}) == Rational(9));
    CHECK_THROWS_AS(p.eval(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(p.add_term({1}, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS(p.add_term({-1, 0}, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS(MultiPoly(2) + MultiPoly(1), std::invalid_argument);
}

TEST_CASE("polynomial JSON round-trip") {
    MultiPoly p(2);
    p.add_term({1, 0}, Rational(1, 2));
    p.add_term({0, 2}, Rational(-3, 7));
    CHECK(poly_from_json(poly_to_json(p), 2) == p);

    PolySdeModel model = testsupport::random_model_2d(11);
    PolySdeModel back = model_from_json(model_to_json(model));
    CHECK(back.drift == model.drift);
    CHECK(back.diffusion == model.diffusion);
    CHECK(back.functional == model.functional);

    nlohmann::json bad = model_to_json(model);
    bad["a"] = nlohmann::json::array(); // wrong arity
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
}

TEST_CASE("integral combination JSON round-trip keeps order") {
    IntegralCombination combo;
    combo.add({0, 1, 0}, Rational(1));
    combo.add({0, 0, 1}, Rational(2));
    combo.add({0}, Rational(1, 3));
    nlohmann::json j = combination_to_json(combo);
    REQUIRE(j.size() == 3);
    CHECK(j[0]["word"] == nlohmann::json::array({0}));       // shortest first
    CHECK(j[1]["word"] == nlohmann::json::array({0, 0, 1})); // then lexicographic
    CHECK(j[2]["word"] == nlohmann::json::array({0, 1, 0}));
    CHECK(combination_from_json(j) == combo);
}

TEST_CASE("operators on geometric Brownian motion") {
    PolySdeModel gbm = make_gbm_model(gbm_params);
    MultiPoly f = gbm.functional;
    MultiPoly sigma_x = MultiPoly::variable(1, 0, Rational(3, 10));
    MultiPoly mu_x = MultiPoly::variable(1, 0, Rational(1, 2));

    CHECK(apply_lj(f, gbm, 1) == sigma_x);
    CHECK(apply_hat_l0(f, gbm) == mu_x);
    CHECK(apply_l0(f, gbm) == mu_x);              // second-derivative part of f = x vanishes
    CHECK(apply_hat_lj(f, gbm, 1).is_zero());     // affine g kills hat_lj

    // Quadratic functional separates l0 from hat_l0.
    MultiPoly x = MultiPoly::variable(1, 0);
    MultiPoly x2 = x * x;
    CHECK(apply_hat_l0(x2, gbm) == x2 * Rational(1));           // mu * 2 x^2 = x^2
    CHECK(apply_l0(x2, gbm) == x2 * Rational(109, 100));        // + sigma^2 x^2

    CHECK_THROWS_AS(apply_lj(f, gbm, 2), std::invalid_argument);
    CHECK_THROWS_AS(apply_lj(MultiPoly(2), gbm, 1), std::invalid_argument);
}

TEST_CASE("operator dispatch and linearity") {
    PolySdeModel model = testsupport::random_model_2d(7);
    MultiPoly g1 = testsupport::random_model_2d(8).functional;
    MultiPoly g2 = testsupport::random_model_2d(9).functional;

    for (OperatorKind op : {OperatorKind::hat_l0(), OperatorKind::hat_lj(1), OperatorKind::hat_lj(2),
                            OperatorKind::lj(1), OperatorKind::lj(2), OperatorKind::l0()}) {
        MultiPoly combined = apply_operator(op, g1 + g2, model);
        MultiPoly separate = apply_operator(op, g1, model) + apply_operator(op, g2, model);
        CHECK(combined == separate);
    }
    CHECK(apply_operator(OperatorKind::lj(1), model.functional, model) ==
          apply_lj(model.functional, model, 1));
}

TEST_CASE("coefficient functions") {
    PolySdeModel gbm = make_gbm_model(gbm_params);
    CHECK(coefficient_function({}, gbm, Calculus::ito) == gbm.functional);
    CHECK(coefficient_function({1}, gbm, Calculus::ito) ==
          MultiPoly::variable(1, 0, Rational(3, 10)));
    CHECK(coefficient_function({0}, gbm, Calculus::ito) ==
          MultiPoly::variable(1, 0, Rational(1, 2)));
    // Operator order: the first (innermost) index is applied last.
    CHECK(coefficient_function({1, 0}, gbm, Calculus::ito) ==
          MultiPoly::variable(1, 0, Rational(3, 20)));

    // Ito vs Stratonovich zero-index on a quadratic functional.
    PolySdeModel quad = gbm;
    quad.functional = MultiPoly::variable(1, 0) * MultiPoly::variable(1, 0);
    MultiPoly ito = coefficient_function({0}, quad, Calculus::ito);
    MultiPoly strat = coefficient_function({0}, quad, Calculus::stratonovich);
    CHECK(ito == quad.functional * Rational(109, 100));
    CHECK(strat == quad.functional * Rational(1));

    CHECK_THROWS_AS(coefficient_function({3}, gbm, Calculus::ito), std::invalid_argument);
}

TEST_CASE("coefficient functions agree with finite differences along every chain") {
    PolySdeModel gbm = make_gbm_model(gbm_params);
    std::vector<double> x0 = {1.0};
    for (Calculus calc : {Calculus::ito, Calculus::stratonovich}) {
        std::vector<Word> chains;
        for (int a = 0; a <= 1; ++a) {
            chains.push_back({a});
            for (int b = 0; b <= 1; ++b) {
                chains.push_back({a, b});
                for (int c = 0; c <= 1; ++c) chains.push_back({a, b, c});
            }
        }
        for (const auto& alpha : chains) {
            // Check the outermost application of each suffix by finite
            // differences against the exact tail.
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                Word tail(alpha.begin() + i + 1, alpha.end());
                MultiPoly tail_poly = coefficient_function(tail, gbm, calc);
                Word full(alpha.begin() + i, alpha.end());
                double exact = coefficient_function(full, gbm, calc).eval(x0);
                double fd = fd_apply_operator(alpha[i], calc, tail_poly, gbm, x0);
                CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), 1e-3));
            }
        }
    }
}

TEST_CASE("elementary differentials on GBM") {
    PolySdeModel gbm = make_gbm_model(gbm_params);
    std::vector<Rational> x0 = {Rational(1)};

    CHECK(elementary_differential_exact(parse_tree("g"), x0, gbm) == Rational(1));
    CHECK(elementary_differential_exact(parse_tree("[1]_g"), x0, gbm) == Rational(3, 10));
    CHECK(elementary_differential_exact(parse_tree("[t0]_g"), x0, gbm) == Rational(1, 2));
    CHECK(elementary_differential_exact(parse_tree("[[[1]_1]_1]_g"), x0, gbm) ==
          Rational(27, 1000));
    CHECK(elementary_differential_exact(parse_tree("[[1]_t0]_g"), x0, gbm) == Rational(3, 20));

    // Affine functional: any tree whose root has two or more children dies.
    for (const char* text : {"[1,1]_g", "[t0,1]_g", "[1,[1]_1]_g", "[1,1,1,1]_g"})
        CHECK(elementary_differential_exact(parse_tree(text), x0, gbm) == Rational(0));

    CHECK(elementary_differential(parse_tree("[1]_g"), std::vector<double>{2.0}, gbm) ==
          Approx(0.6));
    CHECK_THROWS_AS(elementary_differential(parse_tree("[1]_g"), std::vector<double>{1.0, 2.0}, gbm),
                    std::invalid_argument);
    CHECK_THROWS_AS(elementary_differential(parse_tree("[2]_g"), std::vector<double>{1.0}, gbm),
                    std::invalid_argument);
    CHECK_THROWS_AS(elementary_differential(parse_tree("[1]_1"), std::vector<double>{1.0}, gbm),
                    std::invalid_argument);
}

TEST_CASE("elementary differentials match hand-written tensor sums") {
    // Direct transcriptions of the nested derivative sums for the three
    // reference shapes, written independently of the library recursion.
    for (std::uint64_t seed : testsupport::random_model_seeds()) {
        PolySdeModel model = testsupport::random_model_2d(seed);
        std::vector<double> x = testsupport::random_model_point();
        const int d = model.d;
        auto df = [&](int j) { return model.functional.derivative(j).eval(x); };
        auto d2f = [&](int j, int k) {
            return model.functional.derivative(j).derivative(k).eval(x);
        };

        // f''(b^{j1}'(a), a) with j1 = 1
        double expected_ti = 0;
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                double inner = 0;
                for (int l = 0; l < d; ++l)
                    inner += model.diffusion_entry(j, 1).derivative(l).eval(x) *
                             model.drift[l].eval(x);
                expected_ti += d2f(j, k) * inner * model.drift[k].eval(x);
            }
        }
        CHECK(elementary_differential(parse_tree("[t0,[t0]_1]_g"), x, model) ==
              Approx(expected_ti).margin(1e-12));

        // f'(a''(b^{j1}, b^{j2})) with j1 = 1, j2 = 2
        double expected_tii = 0;
        for (int j = 0; j < d; ++j) {
            double inner = 0;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    inner += model.drift[j].derivative(k).derivative(l).eval(x) *
                             model.diffusion_entry(k, 1).eval(x) *
                             model.diffusion_entry(l, 2).eval(x);
            expected_tii += df(j) * inner;
        }
        CHECK(elementary_differential(parse_tree("[[1,2]_t0]_g"), x, model) ==
              Approx(expected_tii).margin(1e-12));

        // f''(b^{j1}'(b^{j3}), b^{j2}'(b^{j4})) with j1 = 1, j2 = 2, j3 = 2, j4 = 1
        double expected_tiii = 0;
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                double left = 0, right = 0;
                for (int l = 0; l < d; ++l) {
                    left += model.diffusion_entry(j, 1).derivative(l).eval(x) *
                            model.diffusion_entry(l, 2).eval(x);
                    right += model.diffusion_entry(k, 2).derivative(l).eval(x) *
                             model.diffusion_entry(l, 1).eval(x);
                }
                expected_tiii += d2f(j, k) * left * right;
            }
        }
        CHECK(elementary_differential(parse_tree("[[2]_1,[1]_2]_g"), x, model) ==
              Approx(expected_tiii).margin(1e-12));
    }
}

TEST_CASE("tensor application is symmetric in the children") {
    for (std::uint64_t seed : testsupport::random_model_seeds()) {
        PolySdeModel model = testsupport::random_model_2d(seed);
        std::vector<Rational> x = {Rational(2, 5), Rational(-3, 10)};
        for (const char* text :
             {"[1,[1]_1]_g", "[t0,1,2]_g", "[[1,2]_t0,1]_g", "[[1]_1,[2]_2,t0]_g"}) {
            Tree canonical = parse_tree(text);
            Rational reference = elementary_differential_exact(canonical, x, model);
            Tree scrambled = canonical;
            std::reverse(scrambled.children.begin(), scrambled.children.end());
            CHECK(elementary_differential_exact(scrambled, x, model) == reference);
        }
    }
}

TEST_CASE("exact and floating evaluation agree") {
    PolySdeModel model = testsupport::random_model_2d(42);
    std::vector<Rational> xr = {Rational(1, 4), Rational(-1, 2)};
    std::vector<double> xd = {0.25, -0.5};
    for (const char* text : {"g", "[1]_g", "[[1,2]_t0]_g", "[t0,[t0]_1]_g"}) {
        Tree u = parse_tree(text);
        CHECK(elementary_differential(u, xd, model) ==
              Approx(elementary_differential_exact(u, xr, model).to_double()).epsilon(1e-12));
    }
}
