#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace stochtree {

// Non-negative half-integer stored as twice its value, so orders like 1.5
// stay exact. No floating point is involved in any comparison.
struct HalfInt {
    int twice = 0;

    constexpr HalfInt() = default;

    static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
    static constexpr HalfInt whole(int n) { return HalfInt{2 * n}; }

    bool is_integer() const { return twice % 2 == 0; }
    double to_double() const { return twice / 2.0; }

    friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

    HalfInt operator+(HalfInt o) const { return HalfInt{twice + o.twice}; }
    HalfInt operator-(HalfInt o) const { return HalfInt{twice - o.twice}; }

    std::string to_string() const {
        if (twice % 2 == 0) return std::to_string(twice / 2);
        return std::to_string(twice / 2) + ".5";
    }

  private:
    explicit constexpr HalfInt(int t) : twice(t) {}
};

// Accepts "2", "1.5", "0.5"; anything else is rejected.
inline HalfInt parse_half_int(const std::string& text) {
    auto dot = text.find('.');
    std::string whole_part = text.substr(0, dot);
    std::string frac_part = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole_part.empty() && frac_part.empty())
        throw std::invalid_argument("malformed half-integer: " + text);
    for (char c : whole_part)
        if (c < '0' || c > '9') throw std::invalid_argument("malformed half-integer: " + text);
    int whole = whole_part.empty() ? 0 : std::stoi(whole_part);
    int twice = 2 * whole;
    if (!frac_part.empty()) {
        if (frac_part == "5") twice += 1;
        else if (frac_part != "0" && frac_part != "00")
            throw std::invalid_argument("half-integer fraction must be .0 or .5: " + text);
    }
    return HalfInt::from_twice(twice);
}

} // namespace stochtree
