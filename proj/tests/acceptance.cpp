// Acceptance suite: end-to-end checks of the tree calculus, the word
// reduction, the expansion engines and the convergence orders, one printed
// line per criterion. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "stochtree/stochtree.hpp"

#include "random_models.hpp"

using namespace stochtree;
using nlohmann::json;

namespace {

int failures = 0;

class Criterion {
  public:
    Criterion(int number, std::string title)
        : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    void expect(bool ok, const std::string& detail) {
        if (!ok && why_.empty()) why_ = detail;
        ok_ = ok_ && ok;
    }

    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }

    void finish(double budget_seconds = 0) {
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                             .count();
        if (budget_seconds > 0 && elapsed >= budget_seconds)
            expect(false, "runtime " + std::to_string(elapsed) + " s exceeds budget");
        if (!ok_) ++failures;
        std::printf("%s criterion %d: %s [%0.2f s]%s%s\n", ok_ ? "PASS" : "FAIL", number_,
                    title_.c_str(), elapsed, notes_.empty() ? "" : (" -- " + notes_).c_str(),
                    ok_ ? "" : (" -- " + why_).c_str());
        std::fflush(stdout);
    }

  private:
    int number_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
    std::string why_;
    std::string notes_;
};

std::string run_command(const std::string& args, int& exit_code) {
    std::string cmd = std::string(STOCHTREE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        exit_code = -1;
        return "";
    }
    std::string out;
    char buffer[4096];
    std::size_t n;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) out.append(buffer, n);
    int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Table of all trees of order <= 2 for one Wiener process, every stochastic
// index instantiated at 1.
const std::vector<std::string>& reference_trees_m1() {
    static const std::vector<std::string> rows = {
        // order 0 and 1/2
        "g", "[1]_g",
        // order 1
        "[t0]_g", "[1,1]_g", "[[1]_1]_g",
        // order 3/2
        "[[1]_t0]_g", "[[t0]_1]_g", "[t0,1]_g", "[1,1,1]_g", "[[1]_1,1]_g", "[[1,1]_1]_g",
        "[[[1]_1]_1]_g",
        // order 2
        "[[t0]_t0]_g", "[t0,t0]_g", "[[[1]_1]_t0]_g", "[[1,1]_t0]_g", "[1,[1]_t0]_g",
        "[[1]_1,t0]_g", "[1,1,t0]_g", "[1,[t0]_1]_g", "[[[t0]_1]_1]_g", "[[1,t0]_1]_g",
        "[1,1,1,1]_g", "[1,1,[1]_1]_g", "[1,[1,1]_1]_g", "[1,[[1]_1]_1]_g", "[[1]_1,[1]_1]_g",
        "[[1,1,1]_1]_g", "[[1,[1]_1]_1]_g", "[[[1,1]_1]_1]_g", "[[[[1]_1]_1]_1]_g",
        "[[[1]_t0]_1]_g"};
    return rows;
}

void criterion_1_tree_space() {
    Criterion crit(1, "tree enumeration reproduces the order <= 2 table at m = 1");
    auto trees = enumerate_trees(HalfInt::whole(2), 1);
    crit.expect(trees.size() == 32, "expected 32 trees, got " + std::to_string(trees.size()));

    std::map<int, int> by_twice_order;
    for (const auto& t : trees) by_twice_order[order(t).twice]++;
    const std::map<int, int> expected_counts = {{0, 1}, {1, 1}, {2, 3}, {3, 7}, {4, 20}};
    crit.expect(by_twice_order == expected_counts, "per-order counts differ");

    std::set<Tree> expected;
    for (const auto& text : reference_trees_m1()) expected.insert(parse_tree(text));
    crit.expect(expected.size() == 32, "reference table must hold 32 distinct classes");
    crit.expect(std::set<Tree>(trees.begin(), trees.end()) == expected,
                "enumerated set differs from the reference table");
    crit.finish(1.0);
}

void criterion_2_combinatorial_identities() {
    Criterion crit(2, "alpha*gamma*sigma = l! and alpha matches brute-force labelling counts");
    for (int m : {1, 2}) {
        for (const auto& t : enumerate_trees(HalfInt::whole(2), m)) {
            std::uint64_t alpha = cardinality(t);
            crit.expect(alpha * density(t) * symmetry_factor(t) == factorial(node_count(t)),
                        "identity fails for " + format_tree(t));
            if (node_count(t) <= 6)
                crit.expect(alpha == count_monotone_labellings(t),
                            "labelling count differs for " + format_tree(t));
        }
    }
    Tree ti = parse_tree("[t0,[t0]_1]_g");
    crit.expect(cardinality(ti) == 3, "alpha(t_I) != 3");
    crit.expect(density(ti) == 8, "gamma(t_I) != 8");
    crit.expect(symmetry_factor(parse_tree("[[1,1]_t0]_g")) == 2, "sigma(t_II) != 2");
    crit.expect(cardinality(parse_tree("[[3]_1,[4]_2]_g")) == 6, "alpha(t_III) != 6");
    crit.finish(10.0);
}

IntegralCombination combo(std::initializer_list<std::pair<Word, Rational>> terms) {
    IntegralCombination out;
    for (const auto& [w, c] : terms) out.add(w, c);
    return out;
}

void criterion_3_reduction_goldens() {
    Criterion crit(3, "tree reductions reproduce the reference identities in both calculi");
    Tree ti = parse_tree("[t0,[t0]_1]_g");
    IntegralCombination ti_expected = combo({{{0, 1, 0}, 1}, {{0, 0, 1}, 2}});
    crit.expect(reduce_tree(ti, Calculus::ito) == ti_expected, "t_I Ito reduction");
    crit.expect(reduce_tree(ti, Calculus::stratonovich) == ti_expected, "t_I Strat reduction");

    Tree tii_equal = parse_tree("[[1,1]_t0]_g");
    crit.expect(reduce_tree(tii_equal, Calculus::ito) == combo({{{1, 1, 0}, 2}, {{0, 0}, 1}}),
                "t_II Ito reduction (equal indices)");
    crit.expect(reduce_tree(tii_equal, Calculus::stratonovich) == combo({{{1, 1, 0}, 2}}),
                "t_II Strat reduction (equal indices)");

    Tree tii_distinct = parse_tree("[[1,2]_t0]_g");
    IntegralCombination distinct_expected = combo({{{2, 1, 0}, 1}, {{1, 2, 0}, 1}});
    crit.expect(reduce_tree(tii_distinct, Calculus::ito) == distinct_expected,
                "t_II Ito reduction (distinct indices)");
    crit.expect(reduce_tree(tii_distinct, Calculus::stratonovich) == distinct_expected,
                "t_II Strat reduction (distinct indices)");

    IntegralCombination mixed_expected = combo({{{1, 0}, 1}, {{0, 1}, 1}});
    crit.expect(reduce_tree(parse_tree("[t0,1]_g"), Calculus::ito) == mixed_expected,
                "[tau_0, tau_1] reduction");
    crit.finish();
}

void criterion_4_top_weight() {
    Criterion crit(4, "Stratonovich coefficient mass equals l!/gamma on top-length words");
    for (int m : {1, 2}) {
        for (const auto& t : enumerate_trees(HalfInt::whole(2), m)) {
            IntegralCombination reduction = reduce_tree(t, Calculus::stratonovich);
            Rational sum(0);
            std::size_t top = static_cast<std::size_t>(node_count(t)) - 1;
            for (const auto& [w, c] : reduction.terms()) {
                crit.expect(w.size() == top, "non-maximal Stratonovich word in " + format_tree(t));
                sum += c;
            }
            Rational expected(static_cast<std::int64_t>(factorial(node_count(t))),
                              static_cast<std::int64_t>(density(t)));
            crit.expect(sum == expected, "weight mismatch for " + format_tree(t));
        }
    }
    crit.finish();
}

void criterion_5_gbm_expansion() {
    Criterion crit(5, "expand subcommand reproduces the seven-term GBM expansion at p = 1.5");
    int exit_code = 0;
    std::string out = run_command(
        "expand --model gbm --mu 0.5 --sigma 0.3 --x0 1 --p 1.5 --calculus ito --format json",
        exit_code);
    crit.expect(exit_code == 0, "expand subcommand failed");
    if (exit_code == 0) {
        json parsed = json::parse(out);
        crit.expect(parsed["terms"].size() == 7,
                    "expected 7 records, got " + std::to_string(parsed["terms"].size()));
        std::map<Word, Rational, WordOrder> collected;
        for (const auto& term : parsed["terms"]) {
            Rational f(term["f_num"].get<std::int64_t>(), term["f_den"].get<std::int64_t>());
            Rational weight = f / Rational(term["sigma"].get<std::int64_t>());
            for (const auto& entry : term["words"]) {
                Word w = entry["word"].get<Word>();
                collected[w] += weight * Rational(entry["num"].get<std::int64_t>(),
                                                  entry["den"].get<std::int64_t>());
            }
        }
        const std::map<Word, Rational, WordOrder> expected = {
            {{}, Rational(1)},          {{0}, Rational(1, 2)},      {{1}, Rational(3, 10)},
            {{0, 1}, Rational(3, 20)},  {{1, 0}, Rational(3, 20)},  {{1, 1}, Rational(9, 100)},
            {{1, 1, 1}, Rational(27, 1000)}};
        crit.expect(collected == expected, "coefficient-by-word mismatch");
    }
    crit.finish();
}

void criterion_6_oracle_equivalence() {
    Criterion crit(6, "tree expansion equals the hierarchical truncation per path (1e-10)");
    std::vector<PolySdeModel> models;
    std::vector<std::vector<double>> points;
    models.push_back(make_gbm_model(GbmParams{Rational(1, 2), Rational(3, 10), Rational(1)}));
    points.push_back({1.0});
    for (std::uint64_t seed : testsupport::random_model_seeds()) {
        models.push_back(testsupport::random_model_2d(seed));
        points.push_back(testsupport::random_model_point());
    }
    double worst = 0;
    for (std::size_t which = 0; which < models.size(); ++which) {
        const auto& model = models[which];
        for (Calculus calc : {Calculus::ito, Calculus::stratonovich}) {
            for (const char* p_text : {"0.5", "1", "1.5", "2"}) {
                HalfInt p = parse_half_int(p_text);
                ExpansionPlan plan(model, points[which], p, calc);
                HierarchicalPlan hier(model, points[which], p, calc);
                std::vector<Word> requested = plan.words();
                std::size_t n_plan = requested.size();
                requested.insert(requested.end(), hier.words().begin(), hier.words().end());
                WordIntegralEngine engine(requested);
                std::vector<std::vector<double>> scratch;
                std::vector<double> values;
                for (int path = 0; path < 100; ++path) {
                    PathGrid grid = simulate_wiener_grid(model.m, 0.25, 256, 90210, path);
                    engine.evaluate(grid, calc, scratch, values);
                    std::span<const double> all(values);
                    double by_tree = plan.evaluate(all.first(n_plan));
                    double by_words = hier.evaluate(all.subspan(n_plan));
                    double rel = std::abs(by_tree - by_words) / (1.0 + std::abs(by_words));
                    worst = std::max(worst, rel);
                }
            }
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst relative difference %.3g", worst);
    crit.note(buf);
    crit.expect(worst <= 1e-10, "oracle mismatch above 1e-10");
    crit.finish(60.0);
}

void criterion_7_convergence_orders() {
    Criterion crit(7, "fitted truncation-error slopes match p+1/2 (RMS) and p+kappa (mean)");
    GbmParams params{Rational(1, 2), Rational(3, 10), Rational(1)};
    PolySdeModel gbm = make_gbm_model(params);
    ReferenceSolution ref = make_gbm_reference(params, Calculus::ito);
    std::vector<double> h_list;
    for (int k = 3; k <= 8; ++k) h_list.push_back(std::ldexp(1.0, -k));

    for (const char* p_text : {"0.5", "1", "1.5"}) {
        HalfInt p = parse_half_int(p_text);
        ConvergenceReport report = convergence_experiment(
            gbm, {1.0}, p, Calculus::ito, h_list, KRule{}, 10000, 424242, ref, 0);
        bool have_fits = report.rms_fit.has_value() && report.mean_fit.has_value();
        crit.expect(have_fits, "missing slope fit at p = " + std::string(p_text));
        if (!have_fits) continue;
        double rms_target = expected_rms_slope(p);
        double mean_target = expected_mean_slope(p);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "p=%s rms %.3f (target %.1f) mean %.3f (target %.1f)",
                      p_text, report.rms_fit->slope, rms_target, report.mean_fit->slope,
                      mean_target);
        crit.note(buf);
        crit.expect(std::abs(report.rms_fit->slope - rms_target) <= 0.25,
                    "RMS slope out of tolerance at p = " + std::string(p_text));
        crit.expect(std::abs(report.mean_fit->slope - mean_target) <= 0.25,
                    "mean slope out of tolerance at p = " + std::string(p_text));
    }
    crit.finish(300.0);
}

void criterion_8_descendant_sets() {
    Criterion crit(8, "descendant sets H^0 and H^I match the reference listings as classes");
    Tree base = parse_tree("[1,2]_g");

    auto h0 = descendants_h(base, 0);
    std::set<Tree> h0_expected = {parse_tree("[1,2,t0]_g"), parse_tree("[1,[t0]_2]_g"),
                                  parse_tree("[[t0]_1,2]_g")};
    crit.expect(std::set<Tree>(h0.begin(), h0.end()) == h0_expected, "H^0 class set differs");

    auto counts = descendants_hi_counts(base, 3);
    std::set<Tree> hi_classes;
    int ordered = 0;
    for (const auto& [t, n] : counts) {
        hi_classes.insert(t);
        ordered += n;
    }
    std::set<Tree> hi_expected = {parse_tree("[1,2,3,3]_g"),   parse_tree("[[3,3]_1,2]_g"),
                                  parse_tree("[1,[3,3]_2]_g"), parse_tree("[[3]_1,2,3]_g"),
                                  parse_tree("[1,[3]_2,3]_g"), parse_tree("[[3]_1,[3]_2]_g")};
    crit.expect(hi_classes == hi_expected, "H^I class set differs");
    crit.expect(ordered == 9, "H^I must come from 9 ordered attachment pairs");
    crit.finish();
}

void criterion_9_determinism() {
    Criterion crit(9, "converge runs with equal seeds produce byte-identical CSV");
    char dir_template[] = "/tmp/stochtree_accept_XXXXXX";
    if (!mkdtemp(dir_template)) {
        crit.expect(false, "cannot create temp dir");
        crit.finish();
        return;
    }
    std::string dir(dir_template);
    std::string args = "converge --p 1 --h 0.25,0.125,0.0625,0.03125 --paths 400 --kmin 128 "
                       "--kfactor 16 --seed 777 --out ";
    int code1 = 0, code2 = 0;
    run_command(args + dir + "/a", code1);
    run_command(args + dir + "/b", code2);
    crit.expect(code1 == 0 && code2 == 0, "converge subcommand failed");
    std::string csv_a = slurp(dir + "/a.csv");
    crit.expect(!csv_a.empty(), "empty CSV artifact");
    crit.expect(csv_a == slurp(dir + "/b.csv"), "CSV bytes differ between runs");
    crit.expect(slurp(dir + "/a.json") == slurp(dir + "/b.json"), "JSON bytes differ");
    crit.finish();
}

} // namespace

int main() {
    criterion_1_tree_space();
    criterion_2_combinatorial_identities();
    criterion_3_reduction_goldens();
    criterion_4_top_weight();
    criterion_5_gbm_expansion();
    criterion_6_oracle_equivalence();
    criterion_7_convergence_orders();
    criterion_8_descendant_sets();
    criterion_9_determinism();

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criterion(s) failed\n", failures);
    return 1;
}
