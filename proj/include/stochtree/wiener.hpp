#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "stochtree/philox.hpp"
#include "stochtree/word.hpp"

namespace stochtree {

// One Wiener path over an interval of length h, discretized into K substeps
// of independent N(0, h/K) increments per component.
struct PathGrid {
    int m = 1;
    double h = 0;
    int K = 1;
    std::vector<double> increments; // K*m values, substep-major

    double increment(int k, int j) const { return increments[static_cast<std::size_t>(k) * m + (j - 1)]; }
    double dt() const { return h / K; }

    // W_{t0+h}^j - W_{t0}^j
    double endpoint(int j) const {
        double w = 0;
        for (int k = 0; k < K; ++k) w += increment(k, j);
        return w;
    }
};

// Deterministic path simulation: stream index = path index, so path i is the
// same under any execution order or thread count.
inline PathGrid simulate_wiener_grid(int m, double h, int K, std::uint64_t seed,
                                     std::uint64_t path_index = 0) {
    if (m < 1) throw std::invalid_argument("simulate_wiener_grid: m must be >= 1");
    if (K < 1) throw std::invalid_argument("simulate_wiener_grid: K must be >= 1");
    if (!(h > 0)) throw std::invalid_argument("simulate_wiener_grid: h must be > 0");
    PathGrid grid;
    grid.m = m;
    grid.h = h;
    grid.K = K;
    grid.increments.resize(static_cast<std::size_t>(K) * m);
    Philox rng(seed, path_index);
    rng.fill_normals(grid.increments.data(), grid.increments.size());
    double scale = std::sqrt(h / K);
    for (double& x : grid.increments) x *= scale;
    return grid;
}

// Simulated values of iterated integrals over one path, per calculus.
struct WordIntegralTable {
    Calculus calculus = Calculus::ito;
    std::map<Word, double, WordOrder> values;

    double at(const Word& w) const {
        auto it = values.find(w);
        if (it == values.end())
            throw std::out_of_range("word integral table: missing word " + word_to_string(w));
        return it->second;
    }
};

// Evaluates a fixed set of words on many paths. The prefix closure is
// computed once; each evaluation walks the substep grid with left-point
// inner values under Ito and trapezoidal inner values under Stratonovich,
// integrating against h/K for index 0 and against the Wiener increments
// otherwise.
class WordIntegralEngine {
  public:
    explicit WordIntegralEngine(const std::vector<Word>& requested) : requested_(requested) {
        std::set<Word, WordOrder> closure;
        closure.insert(Word{});
        for (const auto& w : requested) {
            Word prefix;
            closure.insert(w);
            for (std::size_t i = 0; i + 1 < w.size(); ++i) {
                prefix.push_back(w[i]);
                closure.insert(prefix);
            }
        }
        prefixes_.assign(closure.begin(), closure.end()); // WordOrder: parents precede children
        for (std::size_t i = 0; i < prefixes_.size(); ++i) index_[prefixes_[i]] = i;
        parent_.resize(prefixes_.size());
        for (std::size_t i = 0; i < prefixes_.size(); ++i) {
            if (prefixes_[i].empty()) {
                parent_[i] = SIZE_MAX;
                continue;
            }
            Word p(prefixes_[i].begin(), prefixes_[i].end() - 1);
            parent_[i] = index_.at(p);
        }
        request_index_.reserve(requested.size());
        for (const auto& w : requested) request_index_.push_back(index_.at(w));
    }

    const std::vector<Word>& requested() const { return requested_; }

    // Values of the requested words in request order; `scratch` is reused
    // between paths to avoid reallocation.
    void evaluate(const PathGrid& grid, Calculus calc, std::vector<std::vector<double>>& scratch,
                  std::vector<double>& out) const {
        const int K = grid.K;
        const double dt = grid.dt();
        scratch.resize(prefixes_.size());
        for (std::size_t i = 0; i < prefixes_.size(); ++i) {
            auto& values = scratch[i];
            values.assign(static_cast<std::size_t>(K) + 1, 0.0);
            const Word& w = prefixes_[i];
            if (w.empty()) {
                std::fill(values.begin(), values.end(), 1.0);
                continue;
            }
            const auto& inner = scratch[parent_[i]];
            const int j = w.back();
            double acc = 0;
            for (int k = 0; k < K; ++k) {
                double inner_value = calc == Calculus::ito
                                         ? inner[k]
                                         : 0.5 * (inner[k] + inner[k + 1]);
                double inc = j == 0 ? dt : grid.increment(k, j);
                acc += inner_value * inc;
                values[k + 1] = acc;
            }
        }
        out.resize(requested_.size());
        for (std::size_t i = 0; i < requested_.size(); ++i)
            out[i] = scratch[request_index_[i]].back();
    }

    std::vector<double> evaluate(const PathGrid& grid, Calculus calc) const {
        std::vector<std::vector<double>> scratch;
        std::vector<double> out;
        evaluate(grid, calc, scratch, out);
        return out;
    }

  private:
    std::vector<Word> requested_;
    std::vector<Word> prefixes_;
    std::map<Word, std::size_t, WordOrder> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> request_index_;
};

inline WordIntegralTable simulate_word_integrals(const PathGrid& grid,
                                                 const std::vector<Word>& words, Calculus calc) {
    for (const auto& w : words)
        for (int j : w)
            if (j < 0 || j > grid.m)
                throw std::invalid_argument("simulate_word_integrals: word index exceeds m");
    WordIntegralEngine engine(words);
    std::vector<double> values = engine.evaluate(grid, calc);
    WordIntegralTable table;
    table.calculus = calc;
    table.values[Word{}] = 1.0;
    for (std::size_t i = 0; i < words.size(); ++i) table.values[words[i]] = values[i];
    return table;
}

} // namespace stochtree
