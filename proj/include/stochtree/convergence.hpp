#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "stochtree/expansion.hpp"
#include "stochtree/gbm.hpp"
#include "stochtree/hierarchical.hpp"
#include "stochtree/sde_model.hpp"
#include "stochtree/wiener.hpp"

namespace stochtree {

// Order-independent summation: fixed pairwise tree over the index order, so
// parallel runs reduce to exactly the same double as sequential ones.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0;
        for (double v : values) s += v;
        return s;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double pairwise_mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("pairwise_mean: empty input");
    return pairwise_sum(values) / static_cast<double>(values.size());
}

// Substep count per interval: K(h) = max(k_min, ceil(k_factor/h)). The
// defaults keep the discretization bias of the word integrals below the
// truncation error over the tested range of h.
struct KRule {
    std::int64_t k_min = 1024;
    double k_factor = 64.0;

    int substeps(double h) const {
        if (!(h > 0)) throw std::invalid_argument("KRule: h must be > 0");
        double needed = std::ceil(k_factor / h);
        std::int64_t k = k_min;
        if (needed > static_cast<double>(k)) k = static_cast<std::int64_t>(needed);
        if (k > (std::int64_t{1} << 26)) throw std::invalid_argument("KRule: substep count too large");
        return static_cast<int>(k);
    }
};

// Pathwise reference value f(X_ref) evaluated from the same grid and word
// table as the expansion under test.
struct ReferenceSolution {
    std::string description;
    std::vector<Word> words; // extra word integrals the reference consumes
    std::function<double(const PathGrid&, std::span<const double>)> eval;
};

inline ReferenceSolution make_gbm_reference(const GbmParams& params, Calculus calc) {
    ReferenceSolution ref;
    ref.description = "gbm closed form (" + to_string(calc) + ")";
    double x0 = params.x0.to_double();
    double mu = params.mu.to_double();
    double sigma = params.sigma.to_double();
    ref.eval = [x0, mu, sigma, calc](const PathGrid& grid, std::span<const double>) {
        double w = grid.endpoint(1);
        return calc == Calculus::ito ? gbm_exact(x0, mu, sigma, grid.h, w)
                                     : gbm_exact_stratonovich(x0, mu, sigma, grid.h, w);
    };
    return ref;
}

// Bias-controlled proxy for models without a closed form: the hierarchical
// truncation at a higher order, evaluated on the same substep grid.
inline ReferenceSolution make_hierarchical_reference(const PolySdeModel& model,
                                                     const std::vector<double>& x0, HalfInt p_ref,
                                                     Calculus calc) {
    auto plan = std::make_shared<HierarchicalPlan>(model, x0, p_ref, calc);
    ReferenceSolution ref;
    ref.description = "hierarchical truncation at p = " + p_ref.to_string();
    ref.words = plan->words();
    ref.eval = [plan](const PathGrid&, std::span<const double> values) {
        return plan->evaluate(values);
    };
    return ref;
}

struct SlopeFit {
    double slope = 0;
    double std_error = 0;
    int points = 0;
};

// Ordinary least squares on (log h, log err). Rows whose error sits below
// the noise floor are excluded; fewer than three surviving points means no
// fit.
inline std::optional<SlopeFit> fit_loglog_slope(const std::vector<double>& h,
                                                const std::vector<double>& err,
                                                double noise_floor) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(err[i] > noise_floor)) continue;
        xs.push_back(std::log(h[i]));
        ys.push_back(std::log(err[i]));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 3) return std::nullopt;
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.points = n;
    double ss_res = 0;
    for (int i = 0; i < n; ++i) {
        double r = ys[i] - my - fit.slope * (xs[i] - mx);
        ss_res += r * r;
    }
    fit.std_error = std::sqrt(ss_res / (n - 2) / sxx);
    return fit;
}

struct StepResult {
    double h = 0;
    int K = 0;
    double rms_error = 0;
    double rms_stderr = 0;
    double mean_error = 0; // |mean of pathwise errors|
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ConvergenceReport {
    nlohmann::json config; // full echo, seed included
    std::vector<StepResult> rows;
    std::optional<SlopeFit> rms_fit;
    std::optional<SlopeFit> mean_fit;

    std::string to_csv() const {
        std::string out = "# config: " + config.dump() + "\n";
        out += "h,rms_error,rms_stderr,mean_error,N,K\n";
        const std::string n = std::to_string(config.value("paths", std::int64_t{0}));
        for (const auto& r : rows) {
            out += format_double(r.h) + "," + format_double(r.rms_error) + "," +
                   format_double(r.rms_stderr) + "," + format_double(r.mean_error) + "," + n +
                   "," + std::to_string(r.K) + "\n";
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& r : rows) {
            rows_json.push_back({{"h", r.h},
                                 {"rms_error", r.rms_error},
                                 {"rms_stderr", r.rms_stderr},
                                 {"mean_error", r.mean_error},
                                 {"K", r.K}});
        }
        auto fit_json = [](const std::optional<SlopeFit>& fit) -> nlohmann::json {
            if (!fit) return nullptr;
            return {{"slope", fit->slope}, {"std_error", fit->std_error}, {"points", fit->points}};
        };
        return {{"config", config},
                {"rows", rows_json},
                {"slopes", {{"rms_error", fit_json(rms_fit)}, {"mean_error", fit_json(mean_fit)}}}};
    }
};

// Single-interval truncation-error experiment: for each h simulate N paths,
// evaluate the truncated expansion and the reference on the same randomness,
// and report RMS and absolute mean errors with fitted log-log slopes.
//
// Path i always draws from counter stream i of the seed, and the reductions
// are fixed-order pairwise sums, so results are identical for any thread
// count.
inline ConvergenceReport convergence_experiment(const PolySdeModel& model,
                                                const std::vector<double>& x0, HalfInt p,
                                                Calculus calc, const std::vector<double>& h_list,
                                                const KRule& rule, std::int64_t paths,
                                                std::uint64_t seed, const ReferenceSolution& ref,
                                                int threads = 0) {
    model.validate();
    if (h_list.size() < 3)
        throw std::invalid_argument("convergence_experiment: need at least 3 step sizes");
    for (double h : h_list)
        if (!(h > 0)) throw std::invalid_argument("convergence_experiment: h must be > 0");
    if (paths < 1) throw std::invalid_argument("convergence_experiment: paths must be >= 1");
    if (threads <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        threads = hc == 0 ? 1 : static_cast<int>(hc);
    }

    ExpansionPlan plan(model, x0, p, calc);
    std::vector<Word> requested = plan.words();
    const std::size_t plan_count = requested.size();
    requested.insert(requested.end(), ref.words.begin(), ref.words.end());
    WordIntegralEngine engine(requested);

    ConvergenceReport report;
    report.config = {{"p", p.to_string()},
                     {"calculus", to_string(calc)},
                     {"h", h_list},
                     {"paths", paths},
                     {"seed", seed},
                     {"k_min", rule.k_min},
                     {"k_factor", rule.k_factor},
                     {"reference", ref.description},
                     {"x0", x0}};

    for (double h : h_list) {
        const int K = rule.substeps(h);
        std::vector<double> errors(static_cast<std::size_t>(paths));
        auto worker = [&](std::int64_t begin, std::int64_t end) {
            std::vector<std::vector<double>> scratch;
            std::vector<double> values;
            for (std::int64_t i = begin; i < end; ++i) {
                PathGrid grid = simulate_wiener_grid(model.m, h, K, seed,
                                                     static_cast<std::uint64_t>(i));
                engine.evaluate(grid, calc, scratch, values);
                std::span<const double> all(values);
                double z = plan.evaluate(all.first(plan_count));
                double reference = ref.eval(grid, all.subspan(plan_count));
                errors[static_cast<std::size_t>(i)] = reference - z;
            }
        };
        if (threads == 1 || paths < 256) {
            worker(0, paths);
        } else {
            std::vector<std::thread> pool;
            std::int64_t chunk = (paths + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                std::int64_t begin = t * chunk;
                std::int64_t end = std::min<std::int64_t>(paths, begin + chunk);
                if (begin >= end) break;
                pool.emplace_back(worker, begin, end);
            }
            for (auto& th : pool) th.join();
        }

        std::vector<double> squares(errors.size());
        std::vector<double> fourths(errors.size());
        for (std::size_t i = 0; i < errors.size(); ++i) {
            squares[i] = errors[i] * errors[i];
            fourths[i] = squares[i] * squares[i];
        }
        StepResult row;
        row.h = h;
        row.K = K;
        double m2 = pairwise_mean(squares);
        double m4 = pairwise_mean(fourths);
        row.rms_error = std::sqrt(m2);
        double var_m2 = std::max(0.0, m4 - m2 * m2) / static_cast<double>(paths);
        row.rms_stderr = row.rms_error > 0 ? std::sqrt(var_m2) / (2 * row.rms_error) : 0.0;
        row.mean_error = std::abs(pairwise_mean(errors));
        report.rows.push_back(row);
    }

    const double f_x0 = model.functional.eval(x0);
    const double floor = 1e-12 * std::max(1e-300, std::abs(f_x0));
    std::vector<double> hs, rms, mean;
    for (const auto& r : report.rows) {
        hs.push_back(r.h);
        rms.push_back(r.rms_error);
        mean.push_back(r.mean_error);
    }
    report.rms_fit = fit_loglog_slope(hs, rms, floor);
    report.mean_fit = fit_loglog_slope(hs, mean, floor);
    return report;
}

// Expected asymptotic slopes: p + 1/2 for the RMS truncation error and
// p + kappa for the absolute mean error, kappa = 1 at integer p and 1/2
// otherwise.
inline double expected_rms_slope(HalfInt p) { return p.to_double() + 0.5; }

inline double expected_mean_slope(HalfInt p) {
    return p.to_double() + (p.is_integer() ? 1.0 : 0.5);
}

} // namespace stochtree
