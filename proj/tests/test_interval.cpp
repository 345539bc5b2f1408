#include "yahil/interval.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <random>

using namespace yahil;
using Rational = boost::multiprecision::cpp_rational;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

namespace {

const double ulp_tol = 4 * std::numeric_limits<double>::epsilon();

// every double is an exact rational
Rational exact(double x)
{
    return Rational(x);
}

bool encloses(const Interval& x, const Rational& v)
{
    return exact(x.lo()) <= v && v <= exact(x.hi());
}

double pick(std::mt19937& rng, const Interval& x)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double t = u(rng);
    return t < 0.1 ? x.lo() : t > 0.9 ? x.hi() : x.lo() + (x.hi() - x.lo()) * u(rng);
}

Interval random_interval(std::mt19937& rng, double scale)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    const double a = u(rng), b = u(rng);
    return {std::min(a, b), std::max(a, b)};
}

} // namespace

TEST_CASE("small worked examples")
{
    const Interval s = Interval(1, 2) + Interval(3, 4);
    CHECK(s.contains(4.0));
    CHECK(s.contains(6.0));
    CHECK(s.width() <= 2 + 6 * ulp_tol);

    const Interval p = Interval(-1, 2) * Interval(-3, 1);
    CHECK(p.contains(-6.0));
    CHECK(p.contains(3.0));
    CHECK(p.lo() >= -6 * (1 + ulp_tol));
    CHECK(p.hi() <= 3 * (1 + ulp_tol));

    const Interval r = sqrt(Interval(4, 9));
    CHECK(r.contains(2.0));
    CHECK(r.contains(3.0));
    CHECK(r.width() <= 1 + 6 * ulp_tol);

    const Interval d = Interval(1, 2) / Interval(4, 8);
    CHECK(d.contains(0.125));
    CHECK(d.contains(0.5));

    CHECK((-Interval(1, 2)).lo() == -2.0);
    CHECK(hull(Interval(0, 1), Interval(3, 4)).hi() == 4.0);
    CHECK((Interval(0.0) * Interval(-1e300, 1e300)).width() == 0.0);
}

TEST_CASE("domain errors")
{
    CHECK_THROWS_AS(Interval(2, 1), DomainError);
    CHECK_THROWS_AS(Interval(std::nan(""), 1), DomainError);
    CHECK_THROWS_AS(Interval(1, 2) / Interval(-1, 1), DomainError);
    CHECK_THROWS_AS(Interval(1, 2) / Interval(0, 1), DomainError);
    CHECK_THROWS_AS(sqrt(Interval(-1e-300, 1)), DomainError);
    CHECK_THROWS_AS(pow_int(Interval(1, 2), -1), ParameterError);
    CHECK_THROWS_AS(Interval::decimal("1e3"), ParameterError);
}

TEST_CASE("ratio and decimal literals enclose the exact rational")
{
    for (auto [p, q] : {std::pair{1LL, 3LL}, {-2LL, 7LL}, {4LL, 3LL}, {10LL, 9LL}, {19LL, 15LL}}) {
        const Interval x = Interval::ratio(p, q);
        CHECK(encloses(x, Rational(p, q)));
        CHECK(x.width() <= 4 * ulp_tol * std::abs(static_cast<double>(p) / q));
    }
    for (auto [text, p, q] : {std::tuple{"1.42", 142LL, 100LL}, {"-0.445382", -445382LL, 1000000LL}, {"3", 3LL, 1LL},
                               {"0.1", 1LL, 10LL}}) {
        const Interval x = Interval::decimal(text);
        CHECK(encloses(x, Rational(p, q)));
    }
}

TEST_CASE("integer powers")
{
    CHECK(pow_int(Interval(-2, 3), 2).lo() == 0.0);
    CHECK(pow_int(Interval(-2, 3), 2).contains(9.0));
    CHECK(pow_int(Interval(-3, -2), 2).contains(4.0));
    CHECK(pow_int(Interval(-3, -2), 2).contains(9.0));
    CHECK(pow_int(Interval(-3, 2), 3).contains(-27.0));
    CHECK(pow_int(Interval(-3, 2), 3).contains(8.0));
    CHECK(pow_int(Interval(5, 7), 0).lo() == 1.0);
    // tighter than repeated multiplication for even powers straddling zero
    const Interval x(-1, 1);
    CHECK(pow_int(x, 2).lo() >= 0.0);
    CHECK((x * x).lo() < 0.0);
    CHECK(ipow(2.0, 10) == 1024.0);
}

TEST_CASE("polynomial evaluation with integer coefficients")
{
    // 3 - 2x + x^3 at x = 2 is 7
    const Interval v = monomial_eval({3, -2, 0, 1}, Interval(2.0));
    CHECK(v.contains(7.0));
    const Interval w = monomial_eval({3, -2, 0, 1}, Interval(1.5, 2.0));
    for (double t : {1.5, 1.7, 2.0})
        CHECK(w.contains(3 - 2 * t + t * t * t));
}

TEST_CASE("arithmetic encloses the exact result at sampled points")
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 3000; ++trial) {
        const double scale = std::pow(10.0, static_cast<int>(trial % 13) - 6);
        const Interval a = random_interval(rng, scale), b = random_interval(rng, scale);
        const Interval sum = a + b, diff = a - b, prod = a * b;
        for (int k = 0; k < 4; ++k) {
            const double x = pick(rng, a), y = pick(rng, b);
            CHECK(encloses(sum, exact(x) + exact(y)));
            CHECK(encloses(diff, exact(x) - exact(y)));
            CHECK(encloses(prod, exact(x) * exact(y)));
            if (!b.contains_zero())
                CHECK(encloses(a / b, exact(x) / exact(y)));
        }
        // outward rounding costs at most a few ulps per endpoint
        CHECK(sum.width() <= (a.width() + b.width()) * (1 + ulp_tol) + 4 * ulp_tol * (std::abs(sum.lo()) + std::abs(sum.hi())));
    }
}

TEST_CASE("square root encloses the exact value at sampled points")
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double s = std::pow(10.0, static_cast<int>(trial % 21) - 10);
        const double a = s * u(rng), b = a + s * u(rng);
        const Interval r = sqrt(Interval(a, b));
        for (double x : {a, b, 0.5 * (a + b)}) {
            const Big exact_root = boost::multiprecision::sqrt(Big(x));
            CHECK(Big(r.lo()) <= exact_root);
            CHECK(exact_root <= Big(r.hi()));
        }
    }
}

TEST_CASE("box helpers")
{
    Box b{{Interval(0, 1), Interval(0, 3), Interval(-1, 0)}, {"a", "b", "c"}};
    CHECK(b.size() == 3);
    CHECK(b.widest() == 1);
    CHECK(b.max_width() == 3.0);
    CHECK(to_string(Interval(1, 2)) == "[1, 2]");
}
