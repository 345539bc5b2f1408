#include "yahil/certify.hpp"
#include "yahil/sonic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

#include <omp.h>

namespace yahil {

const char* to_string(Claim c)
{
    return c == Claim::MaxBelowZero ? "MaxBelowZero" : "MinAboveZero";
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass:
        return "pass";
    case Verdict::Fail:
        return "fail";
    default:
        return "inconclusive";
    }
}

const char* to_string(CertKind k)
{
    return k == CertKind::Listing ? "listing" : "supplement";
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Node {
    Box box;
    double upper;
};

struct ByUpper {
    bool operator()(const Node& a, const Node& b) const { return a.upper < b.upper; }
};

double upper_of(const Expr& f, const Box& b, double sign)
{
    try {
        const Interval v = f.interval(b.dims);
        return sign > 0 ? v.hi() : -v.lo();
    } catch (const DomainError&) {
        return inf;
    }
}

// rigorous lower bound of sign*f at the midpoint, -inf where undefined
double lower_at_mid(const Expr& f, const Box& b, double sign)
{
    std::vector<Interval> mid;
    mid.reserve(b.size());
    for (const auto& d : b.dims)
        mid.emplace_back(d.mid());
    try {
        const Interval v = f.interval(mid);
        return sign > 0 ? v.lo() : -v.hi();
    } catch (const DomainError&) {
        return -inf;
    }
}

} // namespace

BoundResult bound_extremum(const Expr& f, const Box& box, Extremum mode, double tol, long max_iter)
{
    if (!(tol > 0.0))
        throw ParameterError("tol must be positive");
    if (box.size() == 0)
        throw ParameterError("empty box");
    // maximise sign*f; a minimum is minus the maximum of -f
    const double sign = mode == Extremum::Max ? 1.0 : -1.0;

    std::priority_queue<Node, std::vector<Node>, ByUpper> queue;
    double L = lower_at_mid(f, box, sign);
    queue.push({box, upper_of(f, box, sign)});

    BoundResult res;
    while (true) {
        const double U = queue.top().upper;
        if (U - L <= tol || res.iterations >= max_iter) {
            res.conclusive = U - L <= tol;
            const double lo = std::isfinite(L) ? L : -std::numeric_limits<double>::max();
            const double hi = std::isfinite(U) ? U : std::numeric_limits<double>::max();
            res.enclosure = sign > 0 ? Interval(lo, hi) : Interval(-hi, -lo);
            return res;
        }
        Node node = queue.top();
        queue.pop();
        ++res.iterations;

        const std::size_t k = node.box.widest();
        const Interval d = node.box.dims[k];
        const double m = d.mid();
        Box left = node.box, right = node.box;
        left.dims[k] = Interval(d.lo(), m);
        right.dims[k] = Interval(m, d.hi());
        for (Box* child : {&left, &right}) {
            L = std::max(L, lower_at_mid(f, *child, sign));
            const double u = upper_of(f, *child, sign);
            if (u >= L)
                queue.push({std::move(*child), u});
        }
        // the box holding the best point can be pruned only by itself
        if (queue.empty())
            queue.push({node.box, L});
    }
}

namespace {

template <class T>
T cst(long long p, long long q = 1)
{
    if constexpr (std::is_same_v<T, Interval>)
        return Interval::ratio(p, q);
    else
        return static_cast<T>(p) / static_cast<T>(q);
}

template <class T>
T dec(const char* text)
{
    if constexpr (std::is_same_v<T, Interval>)
        return Interval::decimal(text);
    else
        return std::stold(text);
}

Interval outer(const char* lo, const char* hi)
{
    return {Interval::decimal(lo).lo(), Interval::decimal(hi).hi()};
}

Interval outer(const Interval& lo, const Interval& hi)
{
    return {lo.lo(), hi.hi()};
}

Box box2(Interval v1, Interval v2)
{
    return {{v1, v2}, {"v1", "v2"}};
}

Box box_g(Interval g)
{
    return {{g}, {"v2"}};
}

const Interval four_thirds = Interval::ratio(4, 3);

Interval thirds(long long a, long long b)
{
    return outer(Interval::ratio(a, 3), Interval::ratio(b, 3));
}

// ---- listing expressions, in w = v1 - v2 and g = v2 ----

template <class T>
T s_poly(const T& w, const T& g)
{
    return T(-4) * (4 - T(3) * g) * (g + 1) * (g - 1) * (2 - g)
        + (57 - T(114) * g + T(73) * ipow(g, 2) - T(12) * ipow(g, 3)) * w
        - T(8) * (14 - T(15) * g + T(3) * ipow(g, 2)) * ipow(w, 2) + T(8) * (5 - T(3) * g) * ipow(w, 3);
}

template <class T>
struct Q1 {
    T a, b, c;
    explicit Q1(const T& g)
        : a((2 * g - 3) * (3 * g - 4) / ipow(T(2) - g, 2)),
          b(-(g - 1) / (2 - g) + (4 - 3 * g) * (2 * g - 3) / (2 - g)),
          c(T(-2) * (g - 1) - (g - 1) * (4 - 3 * g))
    {
    }
};

template <class T>
T q1plus(const T& w, const T& g)
{
    const Q1<T> q(g);
    return q.a * ipow(w, 3) + q.b * ipow(w, 2) + q.c * w + (4 - T(3) * g) * (2 - g) * (g - 1);
}

// derivative in w of q1plus
template <class T>
T p2(const T& w, const T& g)
{
    const Q1<T> q(g);
    return T(3) * q.a * ipow(w, 2) + T(2) * q.b * w + q.c;
}

template <class T>
T dq1min(const T& w, const T& g)
{
    return (T(3) * g - 6) - T(2) * (6 * g - 7) * w / (2 - g) + T(9) * (2 * g - 3) * ipow(w, 2) / ipow(T(2) - g, 2);
}

template <class T>
T wcrit(const T& g, const T& n)
{
    return (2 - g) * (5 - T(4) * g) / (14 - T(7) * g - T(4) * n);
}

// m(k, g) as it stands in the listings
template <class T>
T m_listing(const T& k, const T& g)
{
    return ((g - 1) * k + (g - 1)) / (g + 1);
}

// m(k, g) as defined where the bound is derived
template <class T>
T m_intended(const T& k, const T& g)
{
    return 1 + (g - 1) * k / (g + 1);
}

template <class T>
T wstar_radicand(const T& g)
{
    return -87 + T(10) * g + T(129) * ipow(g, 2) - T(40) * ipow(g, 3) - T(8) * ipow(g, 4);
}

// Expressions over (v1, v2).
template <class F>
Expr in_w(F poly)
{
    return make_expr([poly](const auto& v) {
        using T = std::decay_t<decltype(v[0])>;
        const T w = v[0] - v[1];
        return poly(w, v[1]);
    });
}

template <class F>
Expr in_g(F poly)
{
    return make_expr([poly](const auto& v) { return poly(v[0]); });
}

// Expressions over (g, k), with the m map chosen by the caller.
template <class F, class M>
Expr in_gk(F f, M m)
{
    return make_expr([f, m](const auto& v) { return f(v[0], m(v[1], v[0])); });
}

#define YAHIL_POLY(body) [](const auto& w, const auto& g) { using T [[maybe_unused]] = std::decay_t<decltype(w)>; (void)g; return body; }
#define YAHIL_GPOLY(body) [](const auto& g) { using T [[maybe_unused]] = std::decay_t<decltype(g)>; return body; }

std::optional<Interval> printed(double lo, double hi)
{
    return Interval(lo, hi);
}

} // namespace

std::vector<CertificateSpec> certificate_manifest()
{
    using K = CertKind;
    const Interval g_range = outer(Interval(1.0), four_thirds);
    const Interval v1_range = outer(four_thirds, Interval(2.0));
    const Box V = box2(v1_range, g_range);
    const Box V2 = box2(v1_range, outer("1.02", "1.15"));
    const Box V3 = box2(outer(four_thirds, Interval::decimal("1.8")), outer("1", "1.02"));
    const Box V4 = box2(outer("1.8", "2"), outer("1", "1.02"));
    const Box V5 = box2(v1_range, outer(Interval::decimal("1.15"), four_thirds));
    const Box V6 = box2(outer("1.42", "2"), g_range);
    const Box V7 = box2(outer(four_thirds, Interval::decimal("1.42")), outer("1", "1.1"));
    const Box V8 = box2(v1_range, outer(Interval::decimal("1.1"), four_thirds));
    const Box V9 = box2(outer(four_thirds, Interval::decimal("1.8")), g_range);
    const Box V10 = box2(outer("1.8", "2"), g_range);
    const Box Vcrit = box2(outer(four_thirds, four_thirds + Interval::decimal("0.1")), g_range);
    const Box G = box_g(g_range);
    const Box G_upper = box_g(thirds(4, 6));
    const Box Gcrit{{g_range, Interval(0.0, 1.0)}, {"v2", "k"}};
    const Box B{{v1_range, g_range, Interval(0.0, 1.0)}, {"v1", "v2", "k"}};

    const auto Max = Claim::MaxBelowZero;
    const auto Min = Claim::MinAboveZero;
    std::vector<CertificateSpec> m;

    // sign of the discriminant s
    m.push_back({"Sg", "discriminant", K::Listing, V6, Min, 1e-3, printed(1.06209, 1.26472),
                 in_w(YAHIL_POLY(T(-8) * (5 + T(5) * g - T(15) * ipow(g, 2) + T(6) * ipow(g, 3))
                                 - (114 - T(146) * g + T(36) * ipow(g, 2)) * w - T(8) * (-15 + T(6) * g) * ipow(w, 2)
                                 - T(24) * ipow(w, 3)))});
    m.push_back({"S", "discriminant", K::Listing, V7, Min, 1e-4, printed(0.0334093, 0.0431525),
                 in_w(YAHIL_POLY(s_poly(w, g)))});
    m.push_back({"Sw", "discriminant", K::Listing, V8, Min, 1e-2, printed(0.336312, 2.0698),
                 in_w(YAHIL_POLY((57 - T(114) * g + T(73) * ipow(g, 2) - T(12) * ipow(g, 3))
                                 - T(16) * (14 - T(15) * g + T(3) * ipow(g, 2)) * w
                                 + T(24) * (5 - T(3) * g) * ipow(w, 2)))});

    // bounds on R1
    m.push_back({"quad10", "R1 bounds", K::Listing, V, Max, 1e-2, printed(-0.910166, -0.627474),
                 in_w(YAHIL_POLY(T(3) * (6 * g - 9) * ipow(w, 2) + T(2) * (6 * ipow(g, 2) - 19 * g + 14) * w
                                 + T(3) * ipow(g, 3) - T(18) * ipow(g, 2) + T(36) * g - 24))});
    m.push_back({"quad11", "R1 bounds", K::Listing, V, Max, 1e-2, printed(-2.12454, -1.63927),
                 in_w(YAHIL_POLY(T(3) * (6 * ipow(g, 2) + 8 * g - 24) * ipow(w, 2)
                                 + T(2) * (6 * ipow(g, 3) - 6 * ipow(g, 2) - 28 * g + 32) * w + T(3) * ipow(g, 4)
                                 - T(15) * ipow(g, 3) + T(18) * ipow(g, 2) + T(12) * g - 24))});
    m.push_back({"g1", "R1 bounds", K::Listing, G, Min, 1e-3, printed(17.4556, 18.0143),
                 in_g(YAHIL_GPOLY(104 - T(348) * g + T(418) * ipow(g, 2) - T(183) * ipow(g, 3) + T(27) * ipow(g, 4)))});
    m.push_back({"g13", "R1 bounds", K::Listing, G, Min, 1e-3, printed(0.827639, 1.00486),
                 in_g(YAHIL_GPOLY(T(9) * ipow(g, 4) - T(60) * ipow(g, 3) + T(132) * ipow(g, 2) - T(104) * g + 24))});
    m.push_back({"g2", "R1 bounds", K::Listing, G, Min, 1e-3, printed(21.7206, 24.0462),
                 in_g(YAHIL_GPOLY(T(12) * (T(9) * ipow(g, 4) - T(60) * ipow(g, 3) + T(132) * ipow(g, 2) - T(104) * g + 24)
                                  + T(4) * (2 - g) * (T(9) * ipow(g, 3) - T(42) * ipow(g, 2) + T(50) * g - 14)))});

    // sign of W1
    m.push_back({"L1", "W1 sign", K::Listing, V9, Min, 1e-2, printed(8.32454, 9.37091),
                 in_w(YAHIL_POLY(ipow((11 - T(5) * g) * w - T(8) * ipow(w, 2) + T(2) * (g + 1) * (2 - g), 2)
                                 - w * s_poly(w, g)))});
    m.push_back({"DL1", "W1 sign", K::Listing, V10, Max, 1e-3, printed(-33.9807, -33.5971),
                 in_w(YAHIL_POLY(T(4) * (g + 1)
                                 * (T(24) * ipow(w, 3) + T(6) * (3 * g - 8) * ipow(w, 2) + T(2) * g * (3 * g - 7) * w
                                    - (2 - g) * (-7 - T(2) * g + T(3) * ipow(g, 2)))))});

    // determinant quadratic coefficients
    m.push_back({"quad1", "determinant", K::Listing, V, Max, 1e-3, printed(-0.445382, -0.442693),
                 in_w(YAHIL_POLY(T(-2) * (3 - g) * ipow(w, 2) + (g - 1) * (5 * g - 9) * w
                                 - (g - 1) * (2 - g) * (g + 1)))});
    m.push_back({"quad2", "determinant", K::Listing, V, Max, 1e-3, printed(-2.22671, -2.21346),
                 in_w(YAHIL_POLY(T(-10) * (3 - g) * ipow(w, 2) + T(2) * (g - 1) * (10 * g - 19) * w
                                 - T(5) * (g - 1) * (2 - g) * (g + 1)))});
    m.push_back({"quad3", "determinant", K::Listing, V, Min, 1e-3, printed(2.49842, 2.51321),
                 in_w(YAHIL_POLY(T(10) * (7 - 3 * g) * ipow(w, 2) - T(2) * (15 * ipow(g, 2) - 46 * g + 33) * w
                                 + T(5) * (g - 1) * (2 - g) * (g + 1)))});
    m.push_back({"quad4", "determinant", K::Listing, V, Max, 1e-3, printed(-2.56641, -2.55714),
                 in_w(YAHIL_POLY(T(-10) * (7 - g) * ipow(w, 2) + T(4) * (5 * ipow(g, 2) - 17 * g + 13) * w
                                 - T(5) * (g - 1) * (2 - g) * (g + 1)))});
    m.push_back({"quad5", "determinant", K::Listing, V, Min, 1e-3, printed(2.54864, 2.55882),
                 in_w(YAHIL_POLY(T(10) * (11 - 3 * g) * ipow(w, 2) - T(2) * (15 * ipow(g, 2) - 51 * g + 40) * w
                                 + T(5) * (g - 1) * (2 - g) * (g + 1)))});
    m.push_back({"quad6", "determinant", K::Listing, V, Max, 1e-3, printed(-2.67263, -2.65602),
                 in_w(YAHIL_POLY(T(2) * (7 * g - 19) * ipow(w, 2) + T(2) * (g - 1) * (10 * g - 21) * w
                                 - T(2) * (4 + 3 * g) * (g - 1) * (2 - g)))});
    m.push_back({"quad7", "determinant", K::Listing, V, Min, 1e-3, printed(2.34889, 2.35904),
                 in_w(YAHIL_POLY(T(-2) * (3 * ipow(g, 2) - 2 * g - 13) * ipow(w, 2)
                                 - T(2) * (g - 1) * (3 * ipow(g, 2) - 5 * g - 3) * w
                                 + (g - 1) * (2 - g) * (3 * ipow(g, 2) - 3 * g + 10)))});
    m.push_back({"wstar", "determinant", K::Listing, G, Max, 1e-3, printed(-0.0134389, -0.0127184),
                 in_g(YAHIL_GPOLY((5 - T(3) * g + [&] { using std::sqrt; return sqrt(wstar_radicand(g)); }())
                                      / (T(4) * (7 + g))
                                  - (2 - g) / 3))});
    m.push_back({"quad8", "determinant", K::Listing, V, Max, 1e-3, printed(-2.62435, -2.59568),
                 in_w(YAHIL_POLY(T(2) * (5 * g - 33) * ipow(w, 2) + T(2) * (10 * ipow(g, 2) - 34 * g + 26) * w
                                 + T(2) * (3 * ipow(g, 3) - 7 * ipow(g, 2) + 4)))});
    m.push_back({"quad9", "determinant", K::Listing, V, Min, 1e-3, printed(1.5754, 1.58222),
                 in_w(YAHIL_POLY((-6 * ipow(g, 2) + 8 * g + 54) * ipow(w, 2)
                                 + (-6 * ipow(g, 3) + 16 * ipow(g, 2) + 2 * g - 16) * w
                                 + T(3) * (g - 1) * (2 - g) * (ipow(g, 2) - g + 2)))});

    // Q1 signs
    m.push_back({"p1_V2", "Q1 signs", K::Listing, V2, Max, 1e-4, printed(-0.0178999, -0.0177931),
                 in_w(YAHIL_POLY(q1plus(w, g)))});
    m.push_back({"p1_V3", "Q1 signs", K::Listing, V3, Max, 1e-3, printed(-0.0638237, -0.0622099),
                 in_w(YAHIL_POLY(q1plus(w, g)))});
    m.push_back({"p2_V5", "Q1 signs", K::Listing, V5, Max, 1e-2, printed(-0.321421, -0.231604),
                 in_w(YAHIL_POLY(p2(w, g)))});
    m.push_back({"p2_V4", "Q1 signs", K::Listing, V4, Min, 1e-3, printed(0.178011, 0.190886),
                 in_w(YAHIL_POLY(p2(w, g)))});
    m.push_back({"p4", "Q1 signs", K::Listing, V, Max, 1e-3, printed(-2.003, -1.99999),
                 in_w(YAHIL_POLY(dq1min(w, g)))});

    // Q5 and Q6 signs
    auto fun = [](const auto& g, const auto& n) {
        using T = std::decay_t<decltype(g)>;
        return wcrit(g, n) - cst<T>(4, 3) - dec<T>("0.1") + g;
    };
    auto fun2 = [](const auto& g, const auto& n) {
        using T = std::decay_t<decltype(g)>;
        return T(2) * wcrit(g, n) / 3 - cst<T>(4, 3) + g;
    };
    auto fun3 = [](const auto& g, const auto& n) {
        using T = std::decay_t<decltype(g)>;
        return 26 + T(9) * ipow(g, 2) - T(8) * n + g * (-31 + T(6) * n);
    };
    auto mL = [](const auto& k, const auto& g) { return m_listing(k, g); };
    auto mI = [](const auto& k, const auto& g) { return m_intended(k, g); };

    m.push_back({"fun", "Q5 Q6 signs", K::Listing, Gcrit, Max, 1e-3, printed(-0.154379, -0.153729), in_gk(fun, mL)});
    m.push_back({"p2_Vcrit", "Q5 Q6 signs", K::Listing, Vcrit, Max, 1e-3, printed(-0.304395, -0.297167),
                 in_w(YAHIL_POLY(p2(w, g)))});
    m.push_back({"fun2", "Q5 Q6 signs", K::Listing, Gcrit, Max, 1e-3, printed(-0.0363685, -0.0358193),
                 in_gk(fun2, mL)});
    m.push_back({"fun3", "Q5 Q6 signs", K::Listing, Gcrit, Min, 1e-2, printed(0.483905, 0.681199), in_gk(fun3, mL)});
    m.push_back({"p6diff", "Q5 Q6 signs", K::Listing, B, Max, 1e-2, printed(-2.03123, -1.99999),
                 make_expr([](const auto& v) {
                     using T = std::decay_t<decltype(v[0])>;
                     const T& g = v[1];
                     const T& k = v[2];
                     const T w = v[0] - g;
                     const T kg = k / (g + 1);
                     return dq1min(w, g) + T(3) * ipow(w, 2) * kg * ((g - 1) * k + T(10) * g - 14) / ipow(T(2) - g, 2)
                         + T(2) * w * kg * (9 - T(7) * g) / (2 - g);
                 })});

    // Q3 and Q4 positivity, over the range the listings evaluate them on
    const std::vector<std::tuple<const char*, double, double, Expr>> q34 = {
        {"g5", 15.2996, 15.3379, in_g(YAHIL_GPOLY(-(T(21) * ipow(g, 2) - T(71) * g + 42)))},
        {"g6", 29.4466, 30.2343,
         in_g(YAHIL_GPOLY(80 - T(312) * g + T(402) * ipow(g, 2) - T(183) * ipow(g, 3) + T(27) * ipow(g, 4)))},
        {"g7", 14.8603, 15.7849,
         in_g(YAHIL_GPOLY(50 - T(203) * g + T(261) * ipow(g, 2) - T(120) * ipow(g, 3) + T(18) * ipow(g, 4)))},
        {"g8", 15.9016, 16.0085,
         in_g(YAHIL_GPOLY((6 - T(10) * g + T(3) * ipow(g, 2)) * (16 - T(30) * g + T(9) * ipow(g, 2))))},
        {"g9", 5.99518, 6.00151, in_g(YAHIL_GPOLY(-(T(3) * ipow(g, 2) - T(13) * g + 6)))},
        {"g10", 11.5885, 11.8567,
         in_g(YAHIL_GPOLY(32 - T(112) * g + T(138) * ipow(g, 2) - T(61) * ipow(g, 3) + T(9) * ipow(g, 4)))},
        {"g11", 5.98055, 6.15133,
         in_g(YAHIL_GPOLY(14 - T(65) * g + T(87) * ipow(g, 2) - T(40) * ipow(g, 3) + T(6) * ipow(g, 4)))},
        {"g12", 5.96691, 6.22624,
         in_g(YAHIL_GPOLY(24 - T(104) * g + T(132) * ipow(g, 2) - T(60) * ipow(g, 3) + T(9) * ipow(g, 4)))},
    };
    for (const auto& [name, lo, hi, f] : q34)
        m.push_back({name, "Q3 Q4 signs", K::Listing, G_upper, Min, 1e-3, printed(lo, hi), f});

    // Supplements. The listings evaluate g5..g12 on [4/3, 2] while the claim
    // needs gamma in [1, 4/3]; the fun family is rechecked with m as derived;
    // the wstar radicand must stay positive for the sqrt to be defined.
    for (const auto& [name, lo, hi, f] : q34) {
        (void)lo;
        (void)hi;
        m.push_back({std::string(name) + "_gamma", "Q3 Q4 signs", K::Supplement, G, Min, 1e-3, std::nullopt, f});
    }
    m.push_back({"fun_m", "Q5 Q6 signs", K::Supplement, Gcrit, Max, 1e-3, std::nullopt, in_gk(fun, mI)});
    m.push_back({"fun2_m", "Q5 Q6 signs", K::Supplement, Gcrit, Max, 1e-3, std::nullopt, in_gk(fun2, mI)});
    m.push_back({"fun3_m", "Q5 Q6 signs", K::Supplement, Gcrit, Min, 1e-2, std::nullopt, in_gk(fun3, mI)});
    m.push_back({"wstar_radicand", "determinant", K::Supplement, G, Min, 1e-3, std::nullopt,
                 in_g(YAHIL_GPOLY(wstar_radicand(g)))});
    return m;
}

#undef YAHIL_POLY
#undef YAHIL_GPOLY

std::size_t listing_count()
{
    const auto m = certificate_manifest();
    return static_cast<std::size_t>(
        std::count_if(m.begin(), m.end(), [](const CertificateSpec& s) { return s.kind == CertKind::Listing; }));
}

Certificate run_certificate(const CertificateSpec& spec, const SuiteOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    Expr f = spec.f;
    if (!opts.corrupt.empty() && opts.corrupt == spec.name) {
        // negation moves a strictly signed extremum to the wrong side of zero
        f = {[g = spec.f.interval](const std::vector<Interval>& v) { return -g(v); },
             [g = spec.f.point](const std::vector<long double>& v) { return -g(v); }};
    }
    const Extremum mode = spec.claim == Claim::MaxBelowZero ? Extremum::Max : Extremum::Min;
    const BoundResult b = bound_extremum(f, spec.box, mode, spec.tol * opts.tol_scale, opts.max_iter);

    Certificate c;
    c.name = spec.name;
    c.group = spec.group;
    c.kind = spec.kind;
    c.box = spec.box;
    c.claim = spec.claim;
    c.tol = spec.tol * opts.tol_scale;
    c.enclosure = b.enclosure;
    c.paper = spec.paper;
    c.iterations = b.iterations;

    const bool max = spec.claim == Claim::MaxBelowZero;
    const bool proven = max ? b.enclosure.hi() < 0.0 : b.enclosure.lo() > 0.0;
    const bool refuted = max ? b.enclosure.lo() >= 0.0 : b.enclosure.hi() <= 0.0;
    c.verdict = proven ? Verdict::Pass : (refuted ? Verdict::Fail : Verdict::Inconclusive);
    if (spec.paper) {
        c.paper_intersects = b.enclosure.intersects(*spec.paper);
        c.paper_sign_agrees = max ? spec.paper->hi() < 0.0 : spec.paper->lo() > 0.0;
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

std::vector<Certificate> run_suite_serial(const SuiteOptions& opts)
{
    const auto specs = certificate_manifest();
    std::vector<Certificate> out;
    out.reserve(specs.size());
    for (const auto& s : specs)
        out.push_back(run_certificate(s, opts));
    return out;
}

std::vector<Certificate> run_suite(const SuiteOptions& opts)
{
    if (!opts.parallel)
        return run_suite_serial(opts);
    const auto specs = certificate_manifest();
    std::vector<Certificate> out(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < specs.size(); ++i) {
        try {
            out[i] = run_certificate(specs[i], opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

bool suite_passes(const std::vector<Certificate>& certs)
{
    return !certs.empty()
        && std::all_of(certs.begin(), certs.end(), [](const Certificate& c) { return c.verdict == Verdict::Pass; });
}

std::vector<ConsistencyEntry> seed_consistency(PolytropicIndex gamma, int n)
{
    if (n < 2)
        throw ParameterError("seed_consistency needs at least two grid points");
    const double g = gamma;
    const double c = 4 - 3 * g, b = 2 - g;
    const SonicWindow win = sonic_window(gamma);
    const bool sharp = g >= 10.0 / 9.0;

    std::vector<ConsistencyEntry> e = {{"R1_lower", inf, 0.0, true},  {"R1_upper", inf, 0.0, true},
                                       {"W1_positive", inf, 0.0, true}, {"W1_at_yf", 0.0, win.y_f, true},
                                       {"A2", inf, 0.0, true},        {"4A2+A1", inf, 0.0, true},
                                       {"4A2+2A1+A0", inf, 0.0, true}, {"det_A2", inf, 0.0, true},
                                       {"det_4A2+A1", inf, 0.0, true}, {"det_4A2+2A1+A0", inf, 0.0, true}};
    if (sharp)
        e.push_back({"R1_sharp_upper", inf, 0.0, true});

    auto record = [](ConsistencyEntry& x, double margin, double y, bool strict) {
        if (margin < x.worst_margin) {
            x.worst_margin = margin;
            x.worst_y = y;
        }
        x.pass = x.pass && (strict ? margin > 0.0 : margin >= 0.0);
    };

    for (int i = 0; i < n; ++i) {
        const double y = i == n - 1 ? win.y_F : win.y_f + (win.y_F - win.y_f) * i / (n - 1);
        const SonicSeed s = make_seed(y, gamma);
        // the closed forms are what the certificates bound; the exact
        // coefficients are what invertibility of A_N rests on
        const auto q = det_quadratic_closed_form(s, g);
        const double scale = std::max({std::abs(q.A0), std::abs(q.A1), std::abs(q.A2), 1.0});
        const auto d = det_quadratic(s, g);
        const double dscale = std::max({std::abs(d.A1), std::abs(d.A2), 1e-300});
        record(e[0], s.R1 + 4 / (c * b), y, true);
        record(e[1], -1 / b - s.R1, y, true);
        if (i == 0) {
            // W1 vanishes at y_f; report its size as the margin
            e[3].worst_margin = -std::abs(s.W1);
            e[3].pass = std::abs(s.W1) <= 1e-10;
        } else {
            record(e[2], s.W1, y, true);
        }
        record(e[4], q.A2 / scale, y, true);
        record(e[5], (4 * q.A2 + q.A1) / scale, y, true);
        record(e[6], (4 * q.A2 + 2 * q.A1 + q.A0) / scale, y, true);
        record(e[7], d.A2 / dscale, y, true);
        record(e[8], (4 * d.A2 + d.A1) / dscale, y, true);
        record(e[9], (4 * d.A2 + 2 * d.A1 + d.A0) / dscale, y, true);
        if (sharp) {
            // equality is allowed only at gamma = 10/9, y* = y_F
            const double margin = -2 * g / (b * (g + 1)) - s.R1;
            record(e[10], margin + 1e-12, y, i < n - 1 || g > 10.0 / 9.0);
        }
    }
    return e;
}

} // namespace yahil
