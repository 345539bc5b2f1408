#pragma once

#include "yahil/model.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

namespace yahil {

// Closed interval with outward rounding: every operation computes endpoints in
// round-to-nearest and then steps one ulp outward, which covers the half-ulp
// error of a correctly rounded IEEE operation.
class Interval {
public:
    Interval() = default;
    Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: points convert implicitly
    Interval(double lo, double hi);

    // rigorous enclosure of p/q
    static Interval ratio(long long p, long long q);
    // rigorous enclosure of a decimal literal such as "1.42"
    static Interval decimal(const std::string& text);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mid() const { return lo_ + 0.5 * (hi_ - lo_); }
    double width() const { return hi_ - lo_; }
    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
    bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

    Interval operator-() const { return {-hi_, -lo_}; }
    Interval& operator+=(const Interval& o);
    Interval& operator-=(const Interval& o);
    Interval& operator*=(const Interval& o);
    Interval& operator/=(const Interval& o);

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

inline double round_down(double x)
{
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}

inline double round_up(double x)
{
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
// throws DomainError when b contains zero
Interval operator/(const Interval& a, const Interval& b);

// throws DomainError when x.lo() < 0
Interval sqrt(const Interval& x);
Interval pow_int(const Interval& x, int n);
Interval hull(const Interval& a, const Interval& b);

// Horner evaluation of sum c[k] x^k with exact integer coefficients.
Interval monomial_eval(const std::vector<long long>& c, const Interval& x);

std::string to_string(const Interval& x);

struct Box {
    std::vector<Interval> dims;
    std::vector<std::string> names;

    std::size_t size() const { return dims.size(); }
    std::size_t widest() const;
    double max_width() const;
};

// Generic integer power usable for Interval and floating types alike.
template <class T>
T ipow(const T& x, int n)
{
    if constexpr (std::is_same_v<T, Interval>) {
        return pow_int(x, n);
    } else {
        T r(1);
        for (int i = 0; i < n; ++i)
            r *= x;
        return r;
    }
}

} // namespace yahil
