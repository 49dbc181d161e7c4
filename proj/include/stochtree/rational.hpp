#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stochtree {

// Thrown when exact integer arithmetic leaves the supported range.
struct exact_overflow_error : std::overflow_error {
    using std::overflow_error::overflow_error;
};

namespace detail {

inline std::int64_t checked_narrow(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN) throw exact_overflow_error(what);
    return static_cast<std::int64_t>(v);
}

inline __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

} // namespace detail

// Exact rational number on 64-bit numerator/denominator, always normalized
// (den > 0, gcd(num, den) = 1). Intermediate products run in 128 bits;
// results that do not fit back into 64 bits throw exact_overflow_error.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational& operator+=(const Rational& o) {
        __int128 n = static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_;
        __int128 d = static_cast<__int128>(den_) * o.den_;
        assign128(n, d);
        return *this;
    }
    Rational& operator-=(const Rational& o) {
        __int128 n = static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_;
        __int128 d = static_cast<__int128>(den_) * o.den_;
        assign128(n, d);
        return *this;
    }
    Rational& operator*=(const Rational& o) {
        __int128 n = static_cast<__int128>(num_) * o.num_;
        __int128 d = static_cast<__int128>(den_) * o.den_;
        assign128(n, d);
        return *this;
    }
    Rational& operator/=(const Rational& o) {
        if (o.num_ == 0) throw std::domain_error("rational division by zero");
        __int128 n = static_cast<__int128>(num_) * o.den_;
        __int128 d = static_cast<__int128>(den_) * o.num_;
        assign128(n, d);
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) {
        Rational r;
        r.assign128(-static_cast<__int128>(a.num_), a.den_);
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    void assign(std::int64_t n, std::int64_t d) {
        assign128(static_cast<__int128>(n), static_cast<__int128>(d));
    }
    void assign128(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        if (n == 0) {
            num_ = 0;
            den_ = 1;
            return;
        }
        __int128 g = detail::gcd128(n, d);
        num_ = detail::checked_narrow(n / g, "rational numerator overflow");
        den_ = detail::checked_narrow(d / g, "rational denominator overflow");
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Parses a plain decimal literal ("2", "-0.25", "1.5") into an exact rational.
inline Rational parse_decimal_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty decimal literal");
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = (text[i] == '-');
        ++i;
    }
    __int128 mantissa = 0;
    __int128 den = 1;
    bool seen_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("malformed decimal literal: " + text);
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal literal: " + text);
        seen_digit = true;
        mantissa = mantissa * 10 + (c - '0');
        if (seen_dot) den *= 10;
        if (mantissa > static_cast<__int128>(INT64_MAX) || den > static_cast<__int128>(INT64_MAX))
            throw exact_overflow_error("decimal literal out of range: " + text);
    }
    if (!seen_digit) throw std::invalid_argument("malformed decimal literal: " + text);
    if (negative) mantissa = -mantissa;
    return Rational(static_cast<std::int64_t>(mantissa), static_cast<std::int64_t>(den));
}

// Exact factorial; n! must fit into 64 bits (n <= 20).
inline std::uint64_t factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial of negative number");
    if (n > 20) throw exact_overflow_error("factorial beyond 64-bit range (n > 20)");
    std::uint64_t r = 1;
    for (int k = 2; k <= n; ++k) r *= static_cast<std::uint64_t>(k);
    return r;
}

namespace detail {

inline std::uint64_t checked_mul_u64(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw exact_overflow_error(what);
    return r;
}

} // namespace detail

} // namespace stochtree
