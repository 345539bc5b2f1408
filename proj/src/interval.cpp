#include "yahil/interval.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace yahil {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!(lo <= hi))
        throw DomainError("interval with lo > hi or NaN endpoint");
}

Interval Interval::ratio(long long p, long long q)
{
    // p and q are exact in double below 2^53
    return Interval(static_cast<double>(p)) / Interval(static_cast<double>(q));
}

Interval Interval::decimal(const std::string& text)
{
    long long num = 0, den = 1;
    bool neg = false, frac = false;
    for (char c : text) {
        if (c == '-') {
            neg = true;
        } else if (c == '.') {
            frac = true;
        } else if (c >= '0' && c <= '9') {
            num = num * 10 + (c - '0');
            if (frac)
                den *= 10;
        } else {
            throw ParameterError("not a decimal literal: " + text);
        }
    }
    return ratio(neg ? -num : num, den);
}

Interval& Interval::operator+=(const Interval& o)
{
    return *this = *this + o;
}

Interval& Interval::operator-=(const Interval& o)
{
    return *this = *this - o;
}

Interval& Interval::operator*=(const Interval& o)
{
    return *this = *this * o;
}

Interval& Interval::operator/=(const Interval& o)
{
    return *this = *this / o;
}

namespace {

bool exact_point(const Interval& a)
{
    return a.lo() == a.hi();
}

} // namespace

Interval operator+(const Interval& a, const Interval& b)
{
    return {round_down(a.lo() + b.lo()), round_up(a.hi() + b.hi())};
}

Interval operator-(const Interval& a, const Interval& b)
{
    return {round_down(a.lo() - b.hi()), round_up(a.hi() - b.lo())};
}

Interval operator*(const Interval& a, const Interval& b)
{
    // exact zero factors stay exact; the 0 * inf case never arises since
    // endpoints are finite by construction
    if ((exact_point(a) && a.lo() == 0.0) || (exact_point(b) && b.lo() == 0.0))
        return Interval(0.0);
    const double p[4] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
    return {round_down(*std::min_element(p, p + 4)), round_up(*std::max_element(p, p + 4))};
}

Interval operator/(const Interval& a, const Interval& b)
{
    if (b.contains_zero())
        throw DomainError("interval division by a range containing zero");
    const double q[4] = {a.lo() / b.lo(), a.lo() / b.hi(), a.hi() / b.lo(), a.hi() / b.hi()};
    return {round_down(*std::min_element(q, q + 4)), round_up(*std::max_element(q, q + 4))};
}

Interval sqrt(const Interval& x)
{
    if (x.lo() < 0.0)
        throw DomainError("interval square root of a range reaching below zero");
    return {std::max(0.0, round_down(std::sqrt(x.lo()))), round_up(std::sqrt(x.hi()))};
}

Interval pow_int(const Interval& x, int n)
{
    if (n < 0)
        throw ParameterError("negative integer power");
    if (n == 0)
        return Interval(1.0);
    auto point_pow = [n](double v) {
        Interval r(v);
        for (int i = 1; i < n; ++i)
            r = r * Interval(v);
        return r;
    };
    if (n % 2 == 1)
        return {point_pow(x.lo()).lo(), point_pow(x.hi()).hi()};
    if (x.lo() >= 0.0)
        return {point_pow(x.lo()).lo(), point_pow(x.hi()).hi()};
    if (x.hi() <= 0.0)
        return {point_pow(x.hi()).lo(), point_pow(x.lo()).hi()};
    return {0.0, std::max(point_pow(x.lo()).hi(), point_pow(x.hi()).hi())};
}

Interval hull(const Interval& a, const Interval& b)
{
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval monomial_eval(const std::vector<long long>& c, const Interval& x)
{
    Interval r(0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        r = r * x + Interval(static_cast<double>(*it));
    return r;
}

std::string to_string(const Interval& x)
{
    char buf[64];
    std::string out = "[";
    auto r = std::to_chars(buf, buf + sizeof buf, x.lo());
    out.append(buf, r.ptr);
    out += ", ";
    r = std::to_chars(buf, buf + sizeof buf, x.hi());
    out.append(buf, r.ptr);
    out += "]";
    return out;
}

std::size_t Box::widest() const
{
    std::size_t k = 0;
    for (std::size_t i = 1; i < dims.size(); ++i)
        if (dims[i].width() > dims[k].width())
            k = i;
    return k;
}

double Box::max_width() const
{
    return dims.empty() ? 0.0 : dims[widest()].width();
}

} // namespace yahil
