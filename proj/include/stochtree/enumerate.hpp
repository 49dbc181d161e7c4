#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "stochtree/tree.hpp"

namespace stochtree {

namespace detail {

// Weight of a node color in half-order units: a deterministic node adds 1 to
// rho, a stochastic node adds 1/2.
inline int color_weight(NodeColor c) { return c.is_deterministic() ? 2 : 1; }

inline int tree_weight(const Tree& t) { return order(t).twice; }

struct WeightedCandidates {
    std::vector<Tree> trees;   // sorted under the canonical total order
    std::vector<int> weights;  // aligned with `trees`
};

// Emits every multiset of candidate trees with the exact weight sum, child
// lists already in canonical sorted order (candidates are scanned with
// non-decreasing index).
inline void multisets_of_weight(const WeightedCandidates& cands, std::size_t start, int remaining,
                                std::vector<Tree>& current,
                                std::vector<std::vector<Tree>>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = start; i < cands.trees.size(); ++i) {
        if (cands.weights[i] > remaining) continue;
        current.push_back(cands.trees[i]);
        multisets_of_weight(cands, i, remaining - cands.weights[i], current, out);
        current.pop_back();
    }
}

inline std::vector<std::vector<Tree>> multisets_of_weight(const WeightedCandidates& cands,
                                                          int weight) {
    std::vector<std::vector<Tree>> out;
    std::vector<Tree> current;
    multisets_of_weight(cands, 0, weight, current, out);
    return out;
}

} // namespace detail

// Every canonical root-colored tree with order rho(t) <= p over stochastic
// indices 1..m, listed by increasing order and deterministically within each
// order level. The result for a smaller p is always a prefix of the result
// for a larger one.
inline std::vector<Tree> enumerate_trees(HalfInt p, int m) {
    if (p.twice < 0) throw std::invalid_argument("enumerate_trees: p must be >= 0");
    if (m < 1) throw std::invalid_argument("enumerate_trees: m must be >= 1");
    const int budget = p.twice;

    std::vector<NodeColor> colors;
    colors.push_back(NodeColor::deterministic());
    for (int j = 1; j <= m; ++j) colors.push_back(NodeColor::stochastic(j));

    // Non-root subtrees grouped by exact weight 2*rho; level w only needs
    // levels below it.
    std::vector<std::vector<Tree>> by_weight(budget + 1);
    detail::WeightedCandidates cands;
    for (int w = 1; w <= budget; ++w) {
        for (NodeColor c : colors) {
            int rem = w - detail::color_weight(c);
            if (rem < 0) continue;
            for (auto& children : detail::multisets_of_weight(cands, rem))
                by_weight[w].emplace_back(c, std::move(children));
        }
        for (const auto& t : by_weight[w]) {
            cands.trees.push_back(t);
            cands.weights.push_back(w);
        }
        // Keep candidates sorted so child lists come out canonical.
        std::vector<std::size_t> perm(cands.trees.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return cands.trees[a] < cands.trees[b]; });
        detail::WeightedCandidates sorted;
        sorted.trees.reserve(cands.trees.size());
        sorted.weights.reserve(cands.weights.size());
        for (std::size_t i : perm) {
            sorted.trees.push_back(cands.trees[i]);
            sorted.weights.push_back(cands.weights[i]);
        }
        cands = std::move(sorted);
    }

    std::vector<Tree> out;
    for (int total = 0; total <= budget; ++total) {
        std::vector<Tree> level;
        for (auto& children : detail::multisets_of_weight(cands, total))
            level.emplace_back(NodeColor::root(), std::move(children));
        std::sort(level.begin(), level.end());
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

namespace detail {

inline Tree attach_leaves(const Tree& node, int& next_id, int target_a, int target_b,
                          NodeColor leaf) {
    int my_id = next_id++;
    std::vector<Tree> children;
    children.reserve(node.children.size() + 2);
    for (const auto& c : node.children)
        children.push_back(attach_leaves(c, next_id, target_a, target_b, leaf));
    if (my_id == target_a) children.push_back(Tree(leaf));
    if (my_id == target_b) children.push_back(Tree(leaf));
    return Tree(node.color, std::move(children));
}

inline void require_root(const Tree& t, const char* what) {
    if (!t.color.is_root())
        throw std::invalid_argument(std::string(what) + ": tree must be root-colored");
}

} // namespace detail

// Descendant set H^j(t): the equivalence classes obtained by attaching one
// new tau_j node (j = 0 meaning tau_0) to each node of t.
inline std::vector<Tree> descendants_h(const Tree& t, int j) {
    detail::require_root(t, "descendants_h");
    if (j < 0) throw std::invalid_argument("descendants_h: j must be >= 0");
    NodeColor leaf = j == 0 ? NodeColor::deterministic() : NodeColor::stochastic(j);
    int l = node_count(t);
    std::vector<Tree> out;
    for (int pos = 0; pos < l; ++pos) {
        int next_id = 0;
        out.push_back(detail::attach_leaves(t, next_id, pos, -1, leaf));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Descendant classes obtained by attaching a pair of tau_j leaves (equal
// index j) at an ordered pair of nodes of t, neither new node a child of the
// other. The mapped value counts the ordered attachment pairs that land in
// each class; Taylor remainder bookkeeping uses that raw count.
inline std::map<Tree, int> descendants_hi_counts(const Tree& t, int j) {
    detail::require_root(t, "descendants_hi_counts");
    if (j < 1) throw std::invalid_argument("descendants_hi_counts: j must be >= 1");
    NodeColor leaf = NodeColor::stochastic(j);
    int l = node_count(t);
    std::map<Tree, int> out;
    for (int a = 0; a < l; ++a) {
        for (int b = 0; b < l; ++b) {
            int next_id = 0;
            ++out[detail::attach_leaves(t, next_id, a, b, leaf)];
        }
    }
    return out;
}

// Union of the H^I descendant classes over stochastic indices 1..m.
inline std::vector<Tree> descendants_hi(const Tree& t, int m) {
    detail::require_root(t, "descendants_hi");
    if (m < 1) throw std::invalid_argument("descendants_hi: m must be >= 1");
    std::vector<Tree> out;
    for (int j = 1; j <= m; ++j)
        for (const auto& [tree, count] : descendants_hi_counts(t, j)) out.push_back(tree);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace stochtree
