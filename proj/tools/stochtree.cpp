// Command-line front end: tree listings, integral reductions, symbolic
// expansions and convergence experiments, all reproducible from a seed.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stochtree/stochtree.hpp"

namespace {

using nlohmann::json;
using namespace stochtree;

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("STOCHTREE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("STOCHTREE_SEED is not a valid integer: " +
                                        std::string(env));
        }
    }
    return 12345;
}

// Content is fully materialized before the file is opened, so a failing run
// never leaves a partial artifact behind.
void write_output(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path) write_output(*out_path, content);
    else std::cout << content;
}

// --config FILE supplies defaults for flags the user did not pass; explicit
// flags always win.
json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
    return j;
}

void apply_config_string(const CLI::App& app, const json& cfg, const std::string& flag,
                         const std::string& key, std::string& target) {
    if (app.get_option(flag)->count() == 0 && cfg.contains(key)) {
        if (cfg.at(key).is_string()) target = cfg.at(key).get<std::string>();
        else target = cfg.at(key).dump();
    }
}

template <class T>
void apply_config_value(const CLI::App& app, const json& cfg, const std::string& flag,
                        const std::string& key, T& target) {
    if (app.get_option(flag)->count() == 0 && cfg.contains(key))
        target = cfg.at(key).get<T>();
}

struct ModelOptions {
    std::string model = "gbm";
    std::string mu = "0.5";
    std::string sigma = "0.3";
    std::string x0 = "1";
};

void add_model_flags(CLI::App* cmd, ModelOptions& opts) {
    cmd->add_option("--model", opts.model, "Model: 'gbm' or 'file:PATH'")
        ->capture_default_str();
    cmd->add_option("--mu", opts.mu, "GBM drift coefficient (decimal)")->capture_default_str();
    cmd->add_option("--sigma", opts.sigma, "GBM diffusion coefficient (decimal)")
        ->capture_default_str();
    cmd->add_option("--x0", opts.x0, "Evaluation point, comma-separated decimals")
        ->capture_default_str();
}

struct ResolvedModel {
    PolySdeModel model;
    std::vector<Rational> x0;
    std::optional<GbmParams> gbm;
    json echo;
};

ResolvedModel resolve_model(const ModelOptions& opts) {
    ResolvedModel out;
    if (opts.model == "gbm") {
        GbmParams params;
        params.mu = parse_decimal_rational(opts.mu);
        params.sigma = parse_decimal_rational(opts.sigma);
        params.x0 = parse_decimal_rational(opts.x0);
        out.model = make_gbm_model(params);
        out.x0 = {params.x0};
        out.gbm = params;
        out.echo = {{"model", "gbm"}, {"mu", opts.mu}, {"sigma", opts.sigma}, {"x0", opts.x0}};
        return out;
    }
    if (opts.model.rfind("file:", 0) == 0) {
        std::string path = opts.model.substr(5);
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open model file: " + path);
        json j;
        in >> j;
        out.model = model_from_json(j);
        for (const auto& part : split_commas(opts.x0))
            out.x0.push_back(parse_decimal_rational(part));
        if (static_cast<int>(out.x0.size()) != out.model.d)
            throw std::invalid_argument("--x0 must supply " + std::to_string(out.model.d) +
                                        " components for this model");
        out.echo = {{"model", opts.model}, {"x0", opts.x0}};
        return out;
    }
    throw std::invalid_argument("--model must be 'gbm' or 'file:PATH', got '" + opts.model + "'");
}

std::vector<double> to_doubles(const std::vector<Rational>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(x.to_double());
    return out;
}

std::string combination_to_latex(const IntegralCombination& combo) {
    if (combo.empty()) return "0";
    std::string out;
    for (auto it = combo.terms().rbegin(); it != combo.terms().rend(); ++it) {
        if (!out.empty()) out += " + ";
        const Rational& c = it->second;
        if (!(c == Rational(1))) out += c.to_string() + "\\,";
        std::string indices;
        for (std::size_t i = 0; i < it->first.size(); ++i) {
            if (i) indices += ",";
            indices += std::to_string(it->first[i]);
        }
        out += "\\mathcal{I}_{(" + indices + ")}";
    }
    return out;
}

// ---- trees ------------------------------------------------------------

int run_trees(const std::string& p_text, int m, const std::string& format,
              const std::optional<std::string>& out_path) {
    HalfInt p = parse_half_int(p_text);
    if (m < 1) throw std::invalid_argument("--m must be >= 1");
    auto trees = enumerate_trees(p, m);
    json config = {{"command", "trees"}, {"p", p.to_string()}, {"m", m}, {"format", format}};

    std::string content;
    if (format == "text") {
        content += "# config: " + config.dump() + "\n";
        content += "tree\trho\tl\tsigma\tgamma\talpha\n";
        for (const auto& t : trees) {
            content += format_tree(t) + "\t" + order(t).to_string() + "\t" +
                       std::to_string(node_count(t)) + "\t" + std::to_string(symmetry_factor(t)) +
                       "\t" + std::to_string(density(t)) + "\t" + std::to_string(cardinality(t)) +
                       "\n";
        }
    } else if (format == "json") {
        json rows = json::array();
        for (const auto& t : trees) {
            rows.push_back({{"tree", format_tree(t)},
                            {"rho", order(t).to_double()},
                            {"l", node_count(t)},
                            {"sigma", symmetry_factor(t)},
                            {"gamma", density(t)},
                            {"alpha", cardinality(t)}});
        }
        content = json{{"config", config}, {"trees", rows}}.dump(2) + "\n";
    } else if (format == "latex") {
        content += "% config: " + config.dump() + "\n";
        content += "\\begin{tabular}{llllll}\n";
        content += "tree & $\\rho$ & $l$ & $\\sigma$ & $\\gamma$ & $\\alpha$ \\\\\n";
        for (const auto& t : trees) {
            content += "$" + format_tree_latex(t) + "$ & " + order(t).to_string() + " & " +
                       std::to_string(node_count(t)) + " & " + std::to_string(symmetry_factor(t)) +
                       " & " + std::to_string(density(t)) + " & " + std::to_string(cardinality(t)) +
                       " \\\\\n";
        }
        content += "\\end{tabular}\n";
    } else {
        throw std::invalid_argument("trees: --format must be text, json or latex");
    }
    emit(out_path, content);
    return 0;
}

// ---- reduce -----------------------------------------------------------

int run_reduce(const std::string& tree_text, const std::string& calculus_text,
               std::optional<int> m_bound, const std::string& format,
               const std::optional<std::string>& out_path) {
    Calculus calc = parse_calculus(calculus_text);
    Tree t = parse_tree(tree_text, m_bound);
    IntegralCombination combo = reduce_tree(t, calc);
    json config = {{"command", "reduce"},
                   {"tree", tree_text},
                   {"calculus", calculus_text},
                   {"format", format}};
    if (m_bound) config["m"] = *m_bound;

    std::string content;
    if (format == "text") {
        content += "# config: " + config.dump() + "\n";
        content += combo.to_string() + "\n";
    } else if (format == "json") {
        content = json{{"config", config},
                       {"tree", format_tree(t)},
                       {"terms", combination_to_json(combo)}}
                      .dump(2) +
                  "\n";
    } else if (format == "latex") {
        content += "% config: " + config.dump() + "\n";
        content += "I_{" + format_tree_latex(t) + "} = " + combination_to_latex(combo) + "\n";
    } else {
        throw std::invalid_argument("reduce: --format must be text, json or latex");
    }
    emit(out_path, content);
    return 0;
}

// ---- expand -----------------------------------------------------------

int run_expand(const ModelOptions& model_opts, const std::string& p_text,
               const std::string& calculus_text, const std::string& format,
               const std::optional<std::string>& out_path) {
    HalfInt p = parse_half_int(p_text);
    Calculus calc = parse_calculus(calculus_text);
    ResolvedModel resolved = resolve_model(model_opts);
    auto terms = symbolic_expansion(resolved.model, resolved.x0, p, calc);

    json config = {{"command", "expand"},
                   {"p", p.to_string()},
                   {"calculus", calculus_text},
                   {"format", format}};
    config.update(resolved.echo);

    std::string content;
    if (format == "text") {
        content += "# config: " + config.dump() + "\n";
        content += "tree\tF(t)(x0)\tweight\twords\n";
        for (const auto& term : terms) {
            content += format_tree(term.tree) + "\t" + term.f_value.to_string() + "\t1/" +
                       std::to_string(term.sigma) + "\t" + term.words.to_string() + "\n";
        }
    } else if (format == "json") {
        json rows = json::array();
        for (const auto& term : terms) {
            rows.push_back({{"tree", format_tree(term.tree)},
                            {"f_num", term.f_value.num()},
                            {"f_den", term.f_value.den()},
                            {"f_value", term.f_value.to_double()},
                            {"sigma", term.sigma},
                            {"words", combination_to_json(term.words)}});
        }
        content = json{{"config", config}, {"terms", rows}}.dump(2) + "\n";
    } else if (format == "latex") {
        content += "% config: " + config.dump() + "\n";
        for (const auto& term : terms) {
            std::string weight =
                term.sigma == 1 ? "" : "\\tfrac{1}{" + std::to_string(term.sigma) + "}\\,";
            content += "F(" + format_tree_latex(term.tree) + ")(x_0) = " +
                       term.f_value.to_string() + ", \\quad " + weight + "\\left(" +
                       combination_to_latex(term.words) + "\\right) \\\\\n";
        }
    } else {
        throw std::invalid_argument("expand: --format must be text, json or latex");
    }
    emit(out_path, content);
    return 0;
}

// ---- converge ---------------------------------------------------------

int run_converge(const ModelOptions& model_opts, const std::string& p_text,
                 const std::string& calculus_text, const std::string& h_text,
                 std::int64_t paths, std::uint64_t seed, std::int64_t k_min, double k_factor,
                 int threads, const std::string& format,
                 const std::optional<std::string>& out_path) {
    if (format != "csv" && format != "json" && format != "text")
        throw std::invalid_argument("converge: --format must be csv, json or text");
    HalfInt p = parse_half_int(p_text);
    Calculus calc = parse_calculus(calculus_text);
    ResolvedModel resolved = resolve_model(model_opts);

    std::vector<double> h_list;
    for (const auto& part : split_commas(h_text)) {
        double h = parse_decimal_rational(part).to_double();
        if (!(h > 0)) throw std::invalid_argument("step sizes must be positive");
        h_list.push_back(h);
    }
    if (h_list.size() < 3) throw std::invalid_argument("--h needs at least 3 step sizes");

    KRule rule{k_min, k_factor};
    std::vector<double> x0 = to_doubles(resolved.x0);
    ReferenceSolution ref =
        resolved.gbm ? make_gbm_reference(*resolved.gbm, calc)
                     : make_hierarchical_reference(resolved.model, x0,
                                                   p + HalfInt::from_twice(3), calc);

    ConvergenceReport report = convergence_experiment(resolved.model, x0, p, calc, h_list, rule,
                                                      paths, seed, ref, threads);
    report.config["command"] = "converge";
    report.config.update(resolved.echo);

    auto describe = [](const char* name, const std::optional<SlopeFit>& fit) {
        if (fit) {
            std::cout << name << "_slope=" << format_double(fit->slope)
                      << " stderr=" << format_double(fit->std_error) << " points=" << fit->points
                      << "\n";
        } else {
            std::cout << name << "_slope=none (fewer than 3 points above the noise floor)\n";
        }
    };

    if (out_path) {
        write_output(*out_path + ".csv", report.to_csv());
        write_output(*out_path + ".json", report.to_json().dump(2) + "\n");
        describe("rms", report.rms_fit);
        describe("mean", report.mean_fit);
        std::cout << "wrote " << *out_path << ".csv and " << *out_path << ".json\n";
    } else if (format == "json") {
        std::cout << report.to_json().dump(2) << "\n";
    } else if (format == "text") {
        describe("rms", report.rms_fit);
        describe("mean", report.mean_fit);
    } else {
        std::cout << report.to_csv();
        std::cout << "# rms_slope: "
                  << (report.rms_fit ? format_double(report.rms_fit->slope) : "none") << "\n";
        std::cout << "# mean_slope: "
                  << (report.mean_fit ? format_double(report.mean_fit->slope) : "none") << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic Taylor expansions over colored rooted trees"};
    app.require_subcommand(1);
    // --h is a real flag on converge, so help stays long-form everywhere.
    app.set_help_flag("--help", "Print help");

    std::string config_path;

    // trees
    auto* trees_cmd = app.add_subcommand("trees", "List trees of order <= p with their measures");
    trees_cmd->set_help_flag("--help", "Print help");
    std::string trees_p = "2";
    int trees_m = 1;
    std::string trees_format = "text";
    std::optional<std::string> trees_out;
    trees_cmd->add_option("--p", trees_p, "Maximum order (half-integers allowed, e.g. 1.5)")
        ->capture_default_str();
    trees_cmd->add_option("--m", trees_m, "Wiener dimension")->capture_default_str();
    trees_cmd->add_option("--format", trees_format, "text|json|latex")->capture_default_str();
    trees_cmd->add_option("--out", trees_out, "Output path (stdout when omitted)");
    trees_cmd->add_option("--config", config_path, "JSON config file; flags win");

    // reduce
    auto* reduce_cmd = app.add_subcommand("reduce", "Reduce a tree's multiple integral to words");
    reduce_cmd->set_help_flag("--help", "Print help");
    std::string reduce_tree_text;
    std::string reduce_calc = "ito";
    int reduce_m = 0;
    std::string reduce_format = "text";
    std::optional<std::string> reduce_out;
    reduce_cmd->add_option("tree", reduce_tree_text, "Tree in bracket notation, e.g. [t0,[t0]_1]_g")
        ->required();
    reduce_cmd->add_option("--calculus", reduce_calc, "ito|stratonovich")->capture_default_str();
    reduce_cmd->add_option("--m", reduce_m, "Bound on stochastic indices (0 = unbounded)")
        ->capture_default_str();
    reduce_cmd->add_option("--format", reduce_format, "text|json|latex")->capture_default_str();
    reduce_cmd->add_option("--out", reduce_out, "Output path (stdout when omitted)");
    reduce_cmd->add_option("--config", config_path, "JSON config file; flags win");

    // expand
    auto* expand_cmd = app.add_subcommand("expand", "Symbolic truncated expansion of f(X_t)");
    expand_cmd->set_help_flag("--help", "Print help");
    ModelOptions expand_model;
    std::string expand_p = "1.5";
    std::string expand_calc = "ito";
    std::string expand_format = "text";
    std::optional<std::string> expand_out;
    add_model_flags(expand_cmd, expand_model);
    expand_cmd->add_option("--p", expand_p, "Truncation order")->capture_default_str();
    expand_cmd->add_option("--calculus", expand_calc, "ito|stratonovich")->capture_default_str();
    expand_cmd->add_option("--format", expand_format, "text|json|latex")->capture_default_str();
    expand_cmd->add_option("--out", expand_out, "Output path (stdout when omitted)");
    expand_cmd->add_option("--config", config_path, "JSON config file; flags win");

    // converge
    auto* converge_cmd =
        app.add_subcommand("converge", "Truncation-error convergence experiment");
    converge_cmd->set_help_flag("--help", "Print help");
    ModelOptions converge_model;
    std::string converge_p = "1";
    std::string converge_calc = "ito";
    std::string converge_h = "0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625";
    std::int64_t converge_paths = 10000;
    std::uint64_t converge_seed = 0;
    bool seed_given = false;
    std::int64_t converge_kmin = 1024;
    double converge_kfactor = 64.0;
    int converge_threads = 0;
    std::string converge_format = "csv";
    std::optional<std::string> converge_out;
    add_model_flags(converge_cmd, converge_model);
    converge_cmd->add_option("--p", converge_p, "Truncation order")->capture_default_str();
    converge_cmd->add_option("--calculus", converge_calc, "ito|stratonovich")
        ->capture_default_str();
    converge_cmd->add_option("--h", converge_h, "Comma-separated step sizes")
        ->capture_default_str();
    converge_cmd->add_option("--paths", converge_paths, "Monte Carlo paths per step size")
        ->capture_default_str();
    auto* seed_opt = converge_cmd->add_option("--seed", converge_seed,
                                              "RNG seed (default: STOCHTREE_SEED or 12345)");
    converge_cmd->add_option("--kmin", converge_kmin, "Minimum substeps per interval")
        ->capture_default_str();
    converge_cmd->add_option("--kfactor", converge_kfactor,
                             "Substep rule factor: K = max(kmin, ceil(kfactor/h))")
        ->capture_default_str();
    converge_cmd->add_option("--threads", converge_threads, "Worker threads (0 = hardware)")
        ->capture_default_str();
    converge_cmd->add_option("--format", converge_format, "stdout format without --out: csv|json|text")
        ->capture_default_str();
    converge_cmd->add_option("--out", converge_out, "Base path; writes BASE.csv and BASE.json");
    converge_cmd->add_option("--config", config_path, "JSON config file; flags win");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = json::object();
        if (!config_path.empty()) cfg = load_config_file(config_path);

        if (trees_cmd->parsed()) {
            apply_config_string(*trees_cmd, cfg, "--p", "p", trees_p);
            apply_config_value(*trees_cmd, cfg, "--m", "m", trees_m);
            apply_config_string(*trees_cmd, cfg, "--format", "format", trees_format);
            return run_trees(trees_p, trees_m, trees_format, trees_out);
        }
        if (reduce_cmd->parsed()) {
            apply_config_string(*reduce_cmd, cfg, "--calculus", "calculus", reduce_calc);
            apply_config_value(*reduce_cmd, cfg, "--m", "m", reduce_m);
            apply_config_string(*reduce_cmd, cfg, "--format", "format", reduce_format);
            std::optional<int> bound;
            if (reduce_m > 0) bound = reduce_m;
            return run_reduce(reduce_tree_text, reduce_calc, bound, reduce_format, reduce_out);
        }
        if (expand_cmd->parsed()) {
            apply_config_string(*expand_cmd, cfg, "--model", "model", expand_model.model);
            apply_config_string(*expand_cmd, cfg, "--mu", "mu", expand_model.mu);
            apply_config_string(*expand_cmd, cfg, "--sigma", "sigma", expand_model.sigma);
            apply_config_string(*expand_cmd, cfg, "--x0", "x0", expand_model.x0);
            apply_config_string(*expand_cmd, cfg, "--p", "p", expand_p);
            apply_config_string(*expand_cmd, cfg, "--calculus", "calculus", expand_calc);
            apply_config_string(*expand_cmd, cfg, "--format", "format", expand_format);
            return run_expand(expand_model, expand_p, expand_calc, expand_format, expand_out);
        }
        if (converge_cmd->parsed()) {
            apply_config_string(*converge_cmd, cfg, "--model", "model", converge_model.model);
            apply_config_string(*converge_cmd, cfg, "--mu", "mu", converge_model.mu);
            apply_config_string(*converge_cmd, cfg, "--sigma", "sigma", converge_model.sigma);
            apply_config_string(*converge_cmd, cfg, "--x0", "x0", converge_model.x0);
            apply_config_string(*converge_cmd, cfg, "--p", "p", converge_p);
            apply_config_string(*converge_cmd, cfg, "--calculus", "calculus", converge_calc);
            apply_config_string(*converge_cmd, cfg, "--h", "h", converge_h);
            apply_config_value(*converge_cmd, cfg, "--paths", "paths", converge_paths);
            apply_config_value(*converge_cmd, cfg, "--kmin", "kmin", converge_kmin);
            apply_config_value(*converge_cmd, cfg, "--kfactor", "kfactor", converge_kfactor);
            apply_config_value(*converge_cmd, cfg, "--threads", "threads", converge_threads);
            apply_config_string(*converge_cmd, cfg, "--format", "format", converge_format);
            seed_given = seed_opt->count() > 0;
            if (!seed_given && cfg.contains("seed")) {
                converge_seed = cfg.at("seed").get<std::uint64_t>();
                seed_given = true;
            }
            if (!seed_given) converge_seed = default_seed();
            return run_converge(converge_model, converge_p, converge_calc, converge_h,
                                converge_paths, converge_seed, converge_kmin, converge_kfactor,
                                converge_threads, converge_format, converge_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
