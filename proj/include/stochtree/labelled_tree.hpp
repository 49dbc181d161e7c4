#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "stochtree/tree.hpp"

namespace stochtree {

// Monotonically labelled tree: node i's father parent[i-2] is smaller than i,
// colors run over the nodes 1..l. Only used by brute-force oracles; the rest
// of the library works on canonical equivalence-class representatives.
struct LabelledTree {
    std::vector<int> parent;        // parent[i-2] is the father of node i, i = 2..l
    std::vector<NodeColor> colors;  // colors[i-1] is the color of node i

    int size() const { return static_cast<int>(colors.size()); }

    void validate() const {
        int l = size();
        if (l < 1) throw std::invalid_argument("labelled tree needs at least one node");
        if (static_cast<int>(parent.size()) != l - 1)
            throw std::invalid_argument("labelled tree parent map has wrong length");
        for (int i = 2; i <= l; ++i) {
            if (parent[i - 2] < 1 || parent[i - 2] >= i)
                throw std::invalid_argument("labelled tree parent map is not monotone");
            if (colors[i - 1].is_root())
                throw std::invalid_argument("root color in non-root position");
        }
    }
};

namespace detail {

inline Tree build_representative(int node, const std::vector<std::vector<int>>& child_lists,
                                 const std::vector<NodeColor>& colors) {
    std::vector<Tree> children;
    children.reserve(child_lists[node].size());
    for (int c : child_lists[node])
        children.push_back(build_representative(c, child_lists, colors));
    return Tree(colors[node - 1], std::move(children));
}

} // namespace detail

// Canonical representative of the labelled tree's equivalence class.
inline Tree class_representative(const LabelledTree& lt) {
    lt.validate();
    int l = lt.size();
    std::vector<std::vector<int>> child_lists(l + 1);
    for (int i = 2; i <= l; ++i) child_lists[lt.parent[i - 2]].push_back(i);
    return detail::build_representative(1, child_lists, lt.colors);
}

inline constexpr int monotone_labelling_brute_cap = 8;

// Exhaustively enumerates every labelled tree in the equivalence class of t
// and returns how many there are. Independent of the closed form
// cardinality(t) = l!/(gamma*sigma); intended as its oracle.
inline std::uint64_t count_monotone_labellings(const Tree& t) {
    int l = node_count(t);
    if (l > monotone_labelling_brute_cap)
        throw tree_size_error("count_monotone_labellings: tree exceeds brute-force cap of " +
                              std::to_string(monotone_labelling_brute_cap) + " nodes");
    if (l == 1) return 1;

    // Non-root colors of t as a sorted multiset; next_permutation walks its
    // distinct arrangements exactly once.
    std::vector<NodeColor> palette;
    palette.reserve(l - 1);
    auto collect = [&](const Tree& node, auto&& self) -> void {
        for (const auto& c : node.children) {
            palette.push_back(c.color);
            self(c, self);
        }
    };
    collect(t, collect);
    std::sort(palette.begin(), palette.end());

    std::vector<int> parent(l - 1, 1);
    std::uint64_t count = 0;
    while (true) {
        std::vector<NodeColor> colors = palette;
        do {
            LabelledTree lt;
            lt.parent = parent;
            lt.colors.reserve(l);
            lt.colors.push_back(t.color);
            lt.colors.insert(lt.colors.end(), colors.begin(), colors.end());
            if (class_representative(lt) == t) ++count;
        } while (std::next_permutation(colors.begin(), colors.end()));

        // Odometer over monotone parent maps: parent[i-2] in {1..i-1}.
        int i = l;
        while (i >= 2) {
            if (parent[i - 2] < i - 1) {
                ++parent[i - 2];
                break;
            }
            parent[i - 2] = 1;
            --i;
        }
        if (i < 2) break;
    }
    return count;
}

// Every monotonically labelled tree with exactly l nodes, root color gamma
// and non-root colors drawn from {tau_0, ..., tau_m}. Brute-force generator
// backing the enumeration tests.
inline std::vector<LabelledTree> all_labelled_trees(int l, int m) {
    if (l < 1) throw std::invalid_argument("all_labelled_trees: l must be >= 1");
    std::vector<LabelledTree> out;
    LabelledTree base;
    base.colors.assign(l, NodeColor::root());
    base.parent.assign(l > 1 ? l - 1 : 0, 1);

    std::vector<NodeColor> choices;
    choices.push_back(NodeColor::deterministic());
    for (int j = 1; j <= m; ++j) choices.push_back(NodeColor::stochastic(j));

    auto fill_colors = [&](LabelledTree& lt, int node, auto&& self) -> void {
        if (node > l) {
            out.push_back(lt);
            return;
        }
        for (const auto& c : choices) {
            lt.colors[node - 1] = c;
            self(lt, node + 1, self);
        }
    };

    if (l == 1) {
        out.push_back(base);
        return out;
    }
    while (true) {
        fill_colors(base, 2, fill_colors);
        int i = l;
        while (i >= 2) {
            if (base.parent[i - 2] < i - 1) {
                ++base.parent[i - 2];
                break;
            }
            base.parent[i - 2] = 1;
            --i;
        }
        if (i < 2) break;
    }
    return out;
}

} // namespace stochtree
