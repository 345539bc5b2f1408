#include "yahil/model.hpp"
#include "yahil/integrate.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>

using namespace yahil;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

const double pi = std::numbers::pi;

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("polytropic index rejects values outside (1, 4/3)")
{
    CHECK_THROWS_AS(PolytropicIndex(1.0), ParameterError);
    CHECK_THROWS_AS(PolytropicIndex(4.0 / 3.0), ParameterError);
    CHECK_THROWS_AS(PolytropicIndex(1.34), ParameterError);
    CHECK_THROWS_AS(PolytropicIndex(std::nan("")), ParameterError);
    CHECK(PolytropicIndex(1.2).value() == 1.2);
}

TEST_CASE("sonic window matches an independent 50-digit evaluation")
{
    for (double gd : {1.0001, 1.05, 1.2, 1.3, 1.333}) {
        const PolytropicIndex g(gd);
        const Big G = gd, P = boost::math::constants::pi<Big>();
        const Big yF = 3 / (4 - 3 * G) * sqrt(G / pow(6 * P, G - 1));
        const Big yf = sqrt(G) / (2 - G) * pow((4 - 3 * G) / (2 * P), (G - 1) / 2);
        const auto w = sonic_window(g);
        // rounding of 4 - 3g in double is amplified by 1/(4 - 3g)
        const double tol = 1e-14 + 1e-15 / (4 - 3 * gd);
        CHECK(rel(w.y_F, static_cast<double>(yF)) < tol);
        CHECK(rel(w.y_f, static_cast<double>(yf)) < tol);
        CHECK(0.0 < w.y_f);
        CHECK(w.y_f < w.y_F);
    }
}

TEST_CASE("sonic window tends to (1, 3) as gamma approaches 1")
{
    const auto w = sonic_window(PolytropicIndex(1.0 + 1e-9));
    CHECK(w.y_f == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(w.y_F == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("G and h at the exact solutions")
{
    for (double gd : {1.01, 1.1, 1.2, 1.3, 1.33}) {
        const PolytropicIndex g(gd);
        const auto w = sonic_window(g);
        const FlowState fr = friedman_state(g);
        CHECK(fr.rho == doctest::Approx(1.0 / (6 * pi)));
        CHECK(fr.omega == doctest::Approx((4 - 3 * gd) / 3));
        CHECK(std::abs(G(w.y_F, fr, g)) <= 1e-12 * gd * std::pow(fr.rho, gd - 1));
        CHECK(std::abs(h(fr, g)) <= 1e-14);
        const FlowState ff = far_field_state(w.y_f, g);
        CHECK(ff.omega == 2 - gd);
        CHECK(std::abs(G(w.y_f, ff, g)) <= 1e-12 * gd * std::pow(ff.rho, gd - 1));
    }
    const PolytropicIndex g(1.2);
    CHECK(G(1.0, {1.0, 0.0}, g) == doctest::Approx(1.2));
    CHECK(h({3.7, 0.0}, g) == doctest::Approx(0.2 * 0.8));
    CHECK(friedman_state(g).omega == doctest::Approx(2.0 / 15.0));
}

TEST_CASE("f1 closed values, zero set of h and domain")
{
    for (double gd : {1.02, 10.0 / 9.0, 1.2, 1.3}) {
        const PolytropicIndex g(gd);
        CHECK(f1((4 - 3 * gd) / 3, g) == doctest::Approx(1 / (6 * pi)).epsilon(1e-14));
        CHECK(f1(2 - gd, g) == doctest::Approx((4 - 3 * gd) / (2 * pi)).epsilon(1e-14));
        for (int i = 1; i <= 20; ++i) {
            const double w = 0.05 * i;
            CHECK(std::abs(h({f1(w, g), w}, g)) <= 1e-13);
        }
    }
    CHECK_THROWS_AS(f1(0.0, PolytropicIndex(1.2)), DomainError);
    CHECK_THROWS_AS(f1(-0.1, PolytropicIndex(1.2)), DomainError);
}

TEST_CASE("f1 is positive and convex with its minimum at sqrt((g-1)(2-g)/2)")
{
    for (double gd : {1.05, 10.0 / 9.0, 1.2, 1.3}) {
        const PolytropicIndex g(gd);
        const double ws = std::sqrt((gd - 1) * (2 - gd) / 2);
        CHECK(f1_argmin(g) == doctest::Approx(ws).epsilon(1e-14));
        // central difference derivative vanishes at the argmin
        const double d = 1e-6;
        CHECK(std::abs(f1(ws + d, g) - f1(ws - d, g)) / (2 * d) < 1e-8);
        for (int i = 1; i < 200; ++i) {
            const double w = (2 - gd) * i / 200.0;
            const double second = f1(w + 1e-4, g) - 2 * f1(w, g) + f1(w - 1e-4, g);
            CHECK(second > 0);
        }
        for (int i = 0; i <= 50; ++i) {
            const double w = (4 - 3 * gd) / 3 + ((2 - gd) - (4 - 3 * gd) / 3) * i / 50;
            CHECK(f1(w, g) > 0);
        }
    }
    // at gamma = 10/9 the minimum sits exactly at the Friedman value
    CHECK(f1_argmin(PolytropicIndex(10.0 / 9.0)) == doctest::Approx((4 - 3 * 10.0 / 9.0) / 3).epsilon(1e-14));
}

TEST_CASE("f2 increases in omega and in y*")
{
    const PolytropicIndex g(1.2);
    for (int i = 1; i < 40; ++i) {
        const double w = 0.02 * i;
        CHECK(f2(w + 0.01, 2.0, g) > f2(w, 2.0, g));
        CHECK(f2(w, 2.0 + 0.01 * i, g) > f2(w, 2.0, g));
    }
    CHECK(f2(0.5, 2.0, g) == doctest::Approx(std::pow(4 * 0.25 / 1.2, 5.0)));
}

TEST_CASE("far field state solves the flow equations")
{
    for (double gd : {1.05, 1.2, 1.3}) {
        const PolytropicIndex g(gd);
        const double k = far_field_k(g), b = 2 - gd;
        CHECK(k == doctest::Approx(std::pow(gd * (4 - 3 * gd) / (2 * pi * b * b), 1 / b)).epsilon(1e-14));
        for (double y : {0.3, 0.7, 2.5, 10.0, 300.0}) {
            const FlowState s = far_field_state(y, g);
            CHECK(s.rho == doctest::Approx(k * std::pow(y, -2 / b)).epsilon(1e-14));
            const Derivative d = rhs(y, s, g);
            CHECK(rel(d.drho, -2 / b * s.rho / y) < 1e-11);
            CHECK(std::abs(d.domega) < 1e-12);
        }
    }
}

TEST_CASE("local mass and velocity")
{
    const PolytropicIndex g(1.2);
    CHECK(local_mass(1.0, friedman_state(g), g) == doctest::Approx(1 / (18 * pi)));
    CHECK(local_mass(0.0, friedman_state(g), g) == 0.0);
    CHECK(velocity(2.0, 0.8, g) == 0.0);
    CHECK(velocity(2.0, 0.5, g) == doctest::Approx(-0.6));

    // far field: the integral of z^2 rho from a to b equals the closed-form difference
    const double b = 2 - 1.2, k = far_field_k(g);
    const double a = 0.5, B = 7.0;
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double z) { return z * z * k * std::pow(z, -2 / b); }, a, B, 10, 1e-14);
    const double closed = local_mass(B, far_field_state(B, g), g) - local_mass(a, far_field_state(a, g), g);
    CHECK(rel(q, closed) < 1e-12);
}
