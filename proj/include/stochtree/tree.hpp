#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochtree/half_int.hpp"
#include "stochtree/rational.hpp"

namespace stochtree {

// Thrown when a tree exceeds the exact-arithmetic size cap.
struct tree_size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Syntax error in bracket notation; `position` is a 0-based byte offset.
struct tree_parse_error : std::runtime_error {
    std::size_t position;
    tree_parse_error(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Node color of a stochastic rooted tree: the root marker, a deterministic
// node (time integration), or a stochastic node carrying a Wiener index j.
class NodeColor {
  public:
    static constexpr NodeColor root() { return NodeColor(-1); }
    static constexpr NodeColor deterministic() { return NodeColor(0); }
    static NodeColor stochastic(int j) {
        if (j < 1) throw std::invalid_argument("stochastic index must be >= 1");
        return NodeColor(j);
    }

    bool is_root() const { return code_ == -1; }
    bool is_deterministic() const { return code_ == 0; }
    bool is_stochastic() const { return code_ >= 1; }

    // Integrator index: 0 for deterministic nodes, j for stochastic ones.
    int integrator_index() const {
        if (is_root()) throw std::logic_error("root color has no integrator index");
        return code_;
    }

    int code() const { return code_; }

    friend constexpr auto operator<=>(NodeColor, NodeColor) = default;

    std::string token() const {
        if (code_ == -1) return "g";
        if (code_ == 0) return "t0";
        return std::to_string(code_);
    }

    std::string latex() const {
        if (code_ == -1) return "\\gamma";
        if (code_ == 0) return "\\tau_0";
        return "\\tau_{" + std::to_string(code_) + "}";
    }

  private:
    explicit constexpr NodeColor(int code) : code_(code) {}
    int code_;
};

// Colored unordered rooted tree, held as the canonical representative of
// its equivalence class: children are kept sorted under the total order
// (color, child count, lexicographic children), so structural equality is
// class equality.
struct Tree {
    NodeColor color = NodeColor::root();
    std::vector<Tree> children;

    Tree() = default;
    explicit Tree(NodeColor c) : color(c) {}
    Tree(NodeColor c, std::vector<Tree> ch) : color(c), children(std::move(ch)) {
        std::sort(children.begin(), children.end());
    }

    bool is_leaf() const { return children.empty(); }

    friend bool operator==(const Tree& a, const Tree& b) {
        return a.color == b.color && a.children == b.children;
    }
    friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }
    friend bool operator<(const Tree& a, const Tree& b) {
        if (a.color != b.color) return a.color < b.color;
        if (a.children.size() != b.children.size()) return a.children.size() < b.children.size();
        return std::lexicographical_compare(a.children.begin(), a.children.end(),
                                            b.children.begin(), b.children.end());
    }
};

// Rebuilds a tree bottom-up through the sorting constructor. Identity on
// trees that are already canonical.
inline Tree canonicalize(const Tree& t) {
    std::vector<Tree> ch;
    ch.reserve(t.children.size());
    for (const auto& c : t.children) ch.push_back(canonicalize(c));
    return Tree(t.color, std::move(ch));
}

inline int node_count(const Tree& t) {
    int n = 1;
    for (const auto& c : t.children) n += node_count(c);
    return n;
}

inline int deterministic_node_count(const Tree& t) {
    int n = t.color.is_deterministic() ? 1 : 0;
    for (const auto& c : t.children) n += deterministic_node_count(c);
    return n;
}

inline int stochastic_node_count(const Tree& t) {
    int n = t.color.is_stochastic() ? 1 : 0;
    for (const auto& c : t.children) n += stochastic_node_count(c);
    return n;
}

// Largest stochastic index appearing anywhere in the tree (0 if none).
inline int max_stochastic_index(const Tree& t) {
    int j = t.color.is_stochastic() ? t.color.code() : 0;
    for (const auto& c : t.children) j = std::max(j, max_stochastic_index(c));
    return j;
}

// Order rho(t) = d(t) + s(t)/2; the root marker contributes nothing.
inline HalfInt order(const Tree& t) {
    return HalfInt::from_twice(2 * deterministic_node_count(t) + stochastic_node_count(t));
}

namespace detail {

// Exact arithmetic in the measure recursions is guarded by this cap; l! for
// l = 20 is the largest factorial that fits into 64 bits.
inline constexpr int tree_node_cap = 20;

inline void check_node_cap(const Tree& t, const char* what) {
    if (node_count(t) > tree_node_cap)
        throw tree_size_error(std::string(what) + ": tree exceeds " +
                              std::to_string(tree_node_cap) + " nodes");
}

} // namespace detail

// Symmetry factor sigma(t): the order of the automorphism group of the
// colored tree. Recursion over distinct children t_i with multiplicities
// n_i: sigma(t) = prod_i n_i! * sigma(t_i)^n_i.
inline std::uint64_t symmetry_factor(const Tree& t) {
    detail::check_node_cap(t, "symmetry_factor");
    std::uint64_t result = 1;
    std::size_t i = 0;
    while (i < t.children.size()) {
        std::size_t j = i;
        while (j < t.children.size() && t.children[j] == t.children[i]) ++j;
        std::uint64_t mult = j - i;
        std::uint64_t child_sigma = symmetry_factor(t.children[i]);
        result = detail::checked_mul_u64(result, factorial(static_cast<int>(mult)),
                                         "symmetry_factor overflow");
        for (std::uint64_t k = 0; k < mult; ++k)
            result = detail::checked_mul_u64(result, child_sigma, "symmetry_factor overflow");
        i = j;
    }
    return result;
}

// Density gamma(t) = l(t) * prod gamma(t_i), with gamma = 1 on single nodes.
inline std::uint64_t density(const Tree& t) {
    detail::check_node_cap(t, "density");
    if (t.is_leaf()) return 1;
    std::uint64_t result = static_cast<std::uint64_t>(node_count(t));
    for (const auto& c : t.children)
        result = detail::checked_mul_u64(result, density(c), "density overflow");
    return result;
}

// Cardinality alpha(t) = l! / (gamma(t) * sigma(t)): the number of monotone
// labellings of t. The division is exact for every valid tree; a remainder
// indicates an internal inconsistency.
inline std::uint64_t cardinality(const Tree& t) {
    detail::check_node_cap(t, "cardinality");
    std::uint64_t l_fact = factorial(node_count(t));
    std::uint64_t denom = detail::checked_mul_u64(density(t), symmetry_factor(t),
                                                  "cardinality overflow");
    if (l_fact % denom != 0)
        throw std::logic_error("cardinality: l! not divisible by gamma*sigma");
    return l_fact / denom;
}

// --- bracket notation -------------------------------------------------
//
//   tree  := leaf | "[" tree ("," tree)* "]" "_" color
//   leaf  := color
//   color := "g" | "t0" | positive integer
//
// Whitespace is ignored. Output always lists children in canonical order.

inline std::string format_tree(const Tree& t) {
    if (t.is_leaf()) return t.color.token();
    std::string out = "[";
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += ",";
        out += format_tree(t.children[i]);
    }
    out += "]_" + t.color.token();
    return out;
}

inline std::string format_tree_latex(const Tree& t) {
    if (t.is_leaf()) return t.color.latex();
    std::string out = "[";
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += ",";
        out += format_tree_latex(t.children[i]);
    }
    if (t.color.is_root()) out += "]_{\\gamma}";
    else if (t.color.is_deterministic()) out += "]_{0}";
    else out += "]_{" + std::to_string(t.color.code()) + "}";
    return out;
}

namespace detail {

class TreeParser {
  public:
    TreeParser(const std::string& text, std::optional<int> m_bound)
        : text_(text), m_bound_(m_bound) {}

    Tree parse() {
        Tree t = parse_tree(true);
        skip_ws();
        if (pos_ != text_.size()) throw tree_parse_error("trailing input", pos_);
        return t;
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                       text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    char peek() {
        skip_ws();
        if (pos_ >= text_.size()) throw tree_parse_error("unexpected end of input", pos_);
        return text_[pos_];
    }

    void expect(char c) {
        if (peek() != c)
            throw tree_parse_error(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    NodeColor parse_color(bool root_allowed) {
        skip_ws();
        std::size_t start = pos_;
        char c = peek();
        if (c == 'g') {
            ++pos_;
            if (!root_allowed)
                throw tree_parse_error("root color in non-root position", start);
            return NodeColor::root();
        }
        if (c == 't') {
            ++pos_;
            if (pos_ >= text_.size() || text_[pos_] != '0')
                throw tree_parse_error("expected 't0'", start);
            ++pos_;
            return NodeColor::deterministic();
        }
        if (c >= '1' && c <= '9') {
            long j = 0;
            while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
                j = j * 10 + (text_[pos_] - '0');
                if (j > 1000000) throw tree_parse_error("stochastic index out of range", start);
                ++pos_;
            }
            if (m_bound_ && j > *m_bound_)
                throw tree_parse_error("stochastic index " + std::to_string(j) +
                                           " exceeds m = " + std::to_string(*m_bound_),
                                       start);
            return NodeColor::stochastic(static_cast<int>(j));
        }
        throw tree_parse_error("expected color ('g', 't0' or index)", start);
    }

    Tree parse_tree(bool root_position) {
        char c = peek();
        if (c == '[') {
            ++pos_;
            std::vector<Tree> children;
            children.push_back(parse_tree(false));
            while (peek() == ',') {
                ++pos_;
                children.push_back(parse_tree(false));
            }
            expect(']');
            expect('_');
            NodeColor color = parse_color(root_position);
            return Tree(color, std::move(children));
        }
        return Tree(parse_color(root_position));
    }

    const std::string& text_;
    std::optional<int> m_bound_;
    std::size_t pos_ = 0;
};

} // namespace detail

// Parses bracket notation into a canonical tree. When an m bound is given,
// stochastic indices above it are rejected.
inline Tree parse_tree(const std::string& text, std::optional<int> m_bound = std::nullopt) {
    return detail::TreeParser(text, m_bound).parse();
}

} // namespace stochtree
