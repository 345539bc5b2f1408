#pragma once

#include "yahil/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace yahil {

// Raised when a sign condition that the rigorous certificates establish is
// observed to fail numerically. Always a bug, never a data case.
struct CertificateViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Branch { LPH, Other };

template <class Real>
struct BasicSonicSeed {
    Real y_star{};
    Real rho0{};
    Real omega0{};
    Real R1{};   // y* rho_1 / rho_0
    Real W1{};   // y* omega_1
    Branch branch = Branch::LPH;
};

template <class Real>
struct BasicTaylorLocal {
    BasicSonicSeed<Real> seed;
    Real gamma{};
    int order = 0;
    std::vector<Real> rho_coeffs;
    std::vector<Real> omega_coeffs;
    std::vector<Real> p_coeffs;
    Real radius{};    // trusted radius nu (safety factor applied)
    Real fitted_C{};  // decay constant of |c_N| <= C^(N-1.5)/N^3
    bool degraded_radius = false;
};

template <class Real>
struct Matrix2 {
    Real a11{}, a12{}, a21{}, a22{};
    Real det() const { return a11 * a22 - a12 * a21; }
};

template <class Real>
struct DetQuadratic {
    Real A0{}, A1{}, A2{};
};

template <class Real>
struct BranchPair {
    Real R1{}, W1{}, R2{}, W2{};
};

using SonicSeed = BasicSonicSeed<double>;
using TaylorLocal = BasicTaylorLocal<double>;

// Neumaier summation; the sources mix large cancelling terms.
template <class Real>
class CompensatedSum {
public:
    void add(const Real& x)
    {
        using std::abs;
        const Real t = sum_ + x;
        if (abs(sum_) >= abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(const Real& x)
    {
        add(x);
        return *this;
    }
    Real value() const { return sum_ + comp_; }

private:
    Real sum_{0};
    Real comp_{0};
};

namespace detail {

template <class Real>
Real sonic_residual(const Real& w, const Real& y_star, const Real& gamma)
{
    return formula::f2<Real>(w, y_star, gamma) - formula::f1<Real>(w, gamma);
}

template <class Real>
Real sonic_residual_dw(const Real& w, const Real& y_star, const Real& gamma)
{
    const Real g1 = gamma - 1;
    const Real df2 = formula::f2<Real>(w, y_star, gamma) * 2 / (g1 * w);
    const Real df1 = (4 - 3 * gamma) / (4 * formula::pi<Real>()) * (2 - g1 * (2 - gamma) / (w * w));
    return df2 - df1;
}

template <class Real>
Real discriminant(const Real& w, const Real& g)
{
    return -4 * (4 - 3 * g) * (g + 1) * (g - 1) * (2 - g)
        + (57 - 114 * g + 73 * g * g - 12 * g * g * g) * w
        - 8 * (14 - 15 * g + 3 * g * g) * w * w
        + 8 * (5 - 3 * g) * w * w * w;
}

// (rho^2 omega)-type convolutions at index n over the given sequences.
template <class Real>
Real conv(const std::vector<Real>& a, const std::vector<Real>& b, int n)
{
    if (n < 0)
        return Real(0);
    CompensatedSum<Real> s;
    for (int k = 0; k <= n; ++k)
        s += a[k] * b[n - k];
    return s.value();
}

template <class Real>
Real at(const std::vector<Real>& a, int n)
{
    return n < 0 ? Real(0) : a[n];
}

} // namespace detail

// Unique root of f2(.;y*) - f1 on [(4-3g)/3, 2-g]; rho0 = f1(omega0).
template <class Real>
std::pair<Real, Real> solve_sonic_state(const Real& y_star, const Real& gamma)
{
    using std::abs;
    Real lo = (4 - 3 * gamma) / 3, hi = 2 - gamma;
    const Real flo = detail::sonic_residual(lo, y_star, gamma);
    const Real fhi = detail::sonic_residual(hi, y_star, gamma);
    // f2 raises to the power 1/(g-1), which amplifies relative round-off by that factor
    const Real slack = 64 * std::numeric_limits<Real>::epsilon() * (1 + 1 / (gamma - 1));
    if (flo > slack * abs(formula::f1<Real>(lo, gamma)) || fhi < -slack * abs(formula::f1<Real>(hi, gamma))) {
        std::ostringstream os;
        os.precision(17);
        os << "sonic bracket failure: y*=" << static_cast<double>(y_star) << " gamma=" << static_cast<double>(gamma)
           << " residuals " << static_cast<double>(flo) << ", " << static_cast<double>(fhi);
        throw InternalError(os.str());
    }
    if (flo >= 0)
        hi = lo;
    else if (fhi <= 0)
        lo = hi;
    while (hi - lo > Real(1e-14)) {
        const Real mid = (lo + hi) / 2;
        if (detail::sonic_residual(mid, y_star, gamma) < 0)
            lo = mid;
        else
            hi = mid;
    }
    const Real left = (4 - 3 * gamma) / 3, right = 2 - gamma;
    Real w = (lo + hi) / 2;
    // two polish steps suffice in double; extended types iterate to their epsilon
    const int max_newton = std::numeric_limits<Real>::digits > 64 ? 64 : 2;
    for (int it = 0; it < max_newton; ++it) {
        const Real d = detail::sonic_residual_dw(w, y_star, gamma);
        if (d == 0)
            break;
        const Real step = detail::sonic_residual(w, y_star, gamma) / d;
        const Real next = w - step;
        if (next < left || next > right)
            break;
        w = next;
        if (abs(step) <= std::numeric_limits<Real>::epsilon() * abs(w))
            break;
    }
    return {formula::f1<Real>(w, gamma), w};
}

// Both roots of the branch quadratic; R1 (minus root) is the LPH branch.
template <class Real>
BranchPair<Real> branch_pair(const Real& w, const Real& g)
{
    using std::sqrt;
    const Real s = detail::discriminant(w, g);
    if (!(s > 0)) {
        std::ostringstream os;
        os.precision(17);
        os << "branch discriminant s(omega0) <= 0 at omega0=" << static_cast<double>(w)
           << " gamma=" << static_cast<double>(g);
        throw CertificateViolation(os.str());
    }
    const Real w3 = w * w * w;
    const Real root = sqrt(w3 * s);
    const Real base = (9 - 7 * g) * w * w - 8 * w3;
    const Real den = 2 * w3 * (g + 1);
    BranchPair<Real> b;
    b.R1 = (base - root) / den;
    b.R2 = (base + root) / den;
    b.W1 = 4 - 3 * g - 3 * w - w * b.R1;
    b.W2 = 4 - 3 * g - 3 * w - w * b.R2;
    return b;
}

template <class Real>
std::pair<Real, Real> lph_branch(const Real& omega0, const Real& gamma)
{
    const auto b = branch_pair(omega0, gamma);
    return {b.R1, b.W1};
}

template <class Real>
BasicSonicSeed<Real> make_seed(const Real& y_star, const Real& gamma)
{
    const auto [rho0, omega0] = solve_sonic_state(y_star, gamma);
    const auto [R1, W1] = lph_branch(omega0, gamma);
    return {y_star, rho0, omega0, R1, W1, Branch::LPH};
}

// Coefficients of rho^(gamma-1): N rho0 P_N = sum_k (k gamma - N) rho_k P_{N-k}.
template <class Real>
std::vector<Real> power_series_coeffs(const std::vector<Real>& rho, const Real& gamma)
{
    using std::pow;
    std::vector<Real> P(rho.size());
    if (rho.empty())
        return P;
    P[0] = pow(rho[0], gamma - 1);
    for (std::size_t n = 1; n < rho.size(); ++n) {
        CompensatedSum<Real> s;
        for (std::size_t k = 1; k <= n; ++k)
            s += (Real(k) * gamma - Real(n)) * rho[k] * P[n - k];
        P[n] = s.value() / (Real(n) * rho[0]);
    }
    return P;
}

template <class Real>
Matrix2<Real> recursion_matrix(int N, const BasicSonicSeed<Real>& seed, const Real& g)
{
    const Real ys = seed.y_star, r0 = seed.rho0, w = seed.omega0, R = seed.R1, W = seed.W1;
    const Real g1 = g - 1, c = 4 - 3 * g, b = 2 - g;
    const Real n = N;
    Matrix2<Real> A;
    A.a11 = ys * ((n + 1) * g1 * w * w * R - 2 * n * W * w - 2 * (n - 1) * w * w + g1 * w + g1 * b);
    A.a12 = ys * r0 * (-2 * R * w - 2 * w + g1 * b / w);
    A.a21 = ys / r0 * (w * w * g1 * (W - (c - 3 * w)) - w * (2 * w * w + g1 * w + g1 * b));
    A.a22 = ys * (n * g1 * w * w * R - 2 * (n + 1) * W * w - 2 * (n + 2) * w * w + 2 * c * w - g1 * b);
    return A;
}

// det A_N = y*^2 (A2 N^2 + A1 N + A0) on the LPH branch. A2 and A1 follow from
// expanding the determinant and eliminating the quadratic (R, W) terms with the
// branch relations; A0 is the N = 0 determinant, which vanishes on the branch.
template <class Real>
DetQuadratic<Real> det_quadratic(const BasicSonicSeed<Real>& seed, const Real& g)
{
    const Real w = seed.omega0, R = seed.R1, W = seed.W1;
    const Real g1 = g - 1, c = 4 - 3 * g, b = 2 - g;
    const Real w2 = w * w, w3 = w2 * w, w4 = w3 * w;
    // N(N+1) times the reduced form of (g-1)^2 w^4 R^2 - 4 (g-1) w^3 R W + 4 w^2 W^2
    const Real quad = w2 * R * (-g1 * g1 * (w + b) - 2 * ((5 - 3 * g) * w2 + (5 - 3 * g) * g1 * w + g1 * b))
        + w * W * (2 * g1 * w2 - g1 * g1 * b - 2 * (-2 * (c - 3 * w) * w + g1 * b)) + 4 * (c - 3 * w) * w3;
    DetQuadratic<Real> q;
    q.A2 = quad - 4 * g1 * w4 * R + 8 * w3 * W + 4 * w4;
    q.A1 = quad - 4 * g1 * w4 * R + g1 * w2 * R * (2 * c * w + g1 * w) + 8 * w3 * W - 2 * w * W * (2 * c * w + g1 * w)
        + 2 * w2 * (4 * w2 - 2 * c * w + g1 * b) - 2 * w2 * (2 * w2 + g1 * w + g1 * b);
    q.A0 = w * (R * w + W - (c - 3 * w)) * (g * g * g - 2 * g * g + 2 * g * w2 - 2 * g * w - g - 6 * w2 + 2 * w + 2);
    return q;
}

// Simplified closed forms as usually quoted. They do not reproduce det A_N
// (see det_quadratic); kept because the interval certificates bound exactly
// these expressions.
template <class Real>
DetQuadratic<Real> det_quadratic_closed_form(const BasicSonicSeed<Real>& seed, const Real& g)
{
    const Real w = seed.omega0, R = seed.R1, W = seed.W1;
    const Real g1 = g - 1, c = 4 - 3 * g, b = 2 - g;
    const Real w2 = w * w, w3 = w2 * w, w4 = w3 * w;
    DetQuadratic<Real> q;
    q.A2 = (-2 * (3 - g) * w2 + w * g1 * (5 * g - 9) - g1 * b * (g + 1)) * w2 * R + 8 * w3 * W + 4 * w4;
    q.A1 = -(2 * (3 - g) * w2 + 2 * w * g1 + g1 * b * (g + 1)) * w2 * R
        + (8 * w2 - 4 * c * w - 2 * g1 * w) * w * W + (4 * w4 - 14 * w3 + 10 * g * w3);
    q.A0 = 2 * (w2 * g1 - w * g1 - g * g1 * b) * w2 * R
        + (-16 * w2 + 4 * g1 * w2 + 4 * c * w - 2 * g1 * w - 2 * g1 * b * (g + 1)) * w * W
        + (6 * g - 30) * w4 + (6 * g * g - 44 * g + 46) * w3 + (3 * g * g * g - 12 * g * g + 11 * g - 2) * w2
        + (3 * g * g * g * g - 10 * g * g * g + 5 * g * g + 10 * g - 8) * w;
    return q;
}

// Right-hand side (F_N, G_N) of A_N (rho_N, omega_N) = (F_N, G_N). Entries of
// rho/omega at index >= N are ignored; P must hold P_0..P_{N-1}.
template <class Real>
std::pair<Real, Real> taylor_sources(int N, const std::vector<Real>& rho_in, const std::vector<Real>& omega_in,
                                     const std::vector<Real>& P_in, const Real& g, const Real& ys)
{
    using detail::at;
    using detail::conv;
    const Real g1 = g - 1, c = 4 - 3 * g, b = 2 - g;
    const Real four_pi_c = 4 * formula::pi<Real>() / c;

    // hatted sequences: the unknown order-N entries set to zero, which turns
    // every full convolution at index N into the restricted sums of the recursion
    std::vector<Real> rho(rho_in.begin(), rho_in.begin() + N), om(omega_in.begin(), omega_in.begin() + N);
    rho.push_back(Real(0));
    om.push_back(Real(0));

    std::vector<Real> w2(N + 1), rw(N + 1), r2w(N + 1), rw2(N + 1), w3(N + 1);
    for (int n = 0; n <= N; ++n) {
        w2[n] = conv(om, om, n);
        rw[n] = conv(rho, om, n);
    }
    for (int n = 0; n <= N; ++n) {
        r2w[n] = conv(rho, rw, n);
        rw2[n] = conv(rho, w2, n);
        w3[n] = conv(om, w2, n);
    }

    // lambda_N = 0 part of the Faa di Bruno sum for P_N
    std::vector<Real> P(P_in.begin(), P_in.begin() + N);
    P.push_back(Real(0));
    {
        CompensatedSum<Real> s;
        for (int k = 1; k < N; ++k)
            s += (Real(k) * g - Real(N)) * rho[k] * P[N - k];
        P[N] = s.value() / (Real(N) * rho[0]);
    }

    // S_j = g P_j - y*^2 (w^2)_j - 2 y* (w^2)_{j-1} - (w^2)_{j-2}; S_0 = 0 is the sonic constraint
    std::vector<Real> S(N + 1);
    S[0] = Real(0);
    for (int j = 1; j <= N; ++j)
        S[j] = g * P[j] - ys * ys * w2[j] - 2 * ys * at(w2, j - 1) - at(w2, j - 2);

    CompensatedSum<Real> FI, FII, GI, GII;

    // F^I, G^I: left-hand sides with the order-N unknowns removed
    FI += rho[1] * S[N];
    GI += om[1] * S[N];
    for (int j = 2; j <= N - 1; ++j) {
        const int k = N - j;
        FI += Real(k + 1) * rho[k + 1] * S[j];
        GI += Real(k + 1) * om[k + 1] * S[j];
    }

    FII += g1 * b * rho[N - 1];
    FII += g1 * (ys * rw[N] + rw[N - 1]);
    FII += -four_pi_c * (ys * r2w[N] + r2w[N - 1]);
    FII += 2 * (ys * rw2[N] + rw2[N - 1]);

    const Real inv = -1 / ys;
    std::vector<Real> ipow(N + 1);
    ipow[0] = Real(1);
    for (int k = 1; k <= N; ++k)
        ipow[k] = ipow[k - 1] * inv;

    GII += (c - 3 * om[0]) / ys * S[N];
    {
        CompensatedSum<Real> s;
        for (int k = 1; k <= N; ++k)
            s += ipow[k] * S[N - k];
        GII += c / ys * s.value();
    }
    {
        CompensatedSum<Real> s;
        for (int j = 0; j < N; ++j)
            for (int k = 0; k <= N - j; ++k)
                s += om[N - j - k] * ipow[k] * S[j];
        GII += -3 / ys * s.value();
    }
    GII += -g1 * b * om[N - 1];
    GII += -g1 * (ys * w2[N] + w2[N - 1]);
    GII += four_pi_c * (ys * rw2[N] + rw2[N - 1]);
    GII += -2 * (ys * w3[N] + w3[N - 1]);

    return {FII.value() - FI.value(), GII.value() - GI.value()};
}

template <class Real>
void fit_radius(BasicTaylorLocal<Real>& t)
{
    using std::abs;
    using std::pow;
    using std::isfinite;
    const int n_max = t.order;
    const int window = std::max(5, n_max / 4);
    auto estimate = [&](int hi) {
        Real C(0);
        for (int N = std::max(2, hi - window + 1); N <= hi; ++N) {
            const Real c = std::max(abs(t.rho_coeffs[N]), abs(t.omega_coeffs[N]));
            if (!(c > 0))
                continue;
            const Real n = N;
            const Real v = pow(n * n * n * c, 1 / (n - Real(1.5)));
            if (v > C)
                C = v;
        }
        return C;
    };
    bool finite = true;
    for (int N = 0; N <= n_max; ++N)
        if (!isfinite(static_cast<double>(t.rho_coeffs[N])) || !isfinite(static_cast<double>(t.omega_coeffs[N])))
            finite = false;
    Real C = estimate(n_max);
    const Real C_prev = n_max - window >= 2 + window / 2 ? estimate(n_max - window) : C;
    t.degraded_radius = !finite || C > Real(1.5) * C_prev;
    if (!(C > 0))
        C = 1 / t.seed.y_star;
    t.fitted_C = C;
    t.radius = std::min(Real(0.5) / C, t.seed.y_star / 2);
}

template <class Real>
BasicTaylorLocal<Real> build_taylor(const BasicSonicSeed<Real>& seed, int N_max, const Real& gamma)
{
    if (N_max < 2)
        throw ParameterError("series order must be at least 2");
    BasicTaylorLocal<Real> t;
    t.seed = seed;
    t.gamma = gamma;
    t.order = N_max;
    auto& rho = t.rho_coeffs;
    auto& om = t.omega_coeffs;
    rho.assign(N_max + 1, Real(0));
    om.assign(N_max + 1, Real(0));
    rho[0] = seed.rho0;
    om[0] = seed.omega0;
    rho[1] = seed.rho0 * seed.R1 / seed.y_star;
    om[1] = seed.W1 / seed.y_star;
    std::vector<Real> P(2);
    P[0] = power_series_coeffs(std::vector<Real>{rho[0]}, gamma)[0];
    P[1] = (gamma - 1) * P[0] / rho[0] * rho[1];
    for (int N = 2; N <= N_max; ++N) {
        const auto A = recursion_matrix(N, seed, gamma);
        const auto [F, G] = taylor_sources(N, rho, om, P, gamma, seed.y_star);
        const Real det = A.det();
        rho[N] = (F * A.a22 - A.a12 * G) / det;
        om[N] = (A.a11 * G - A.a21 * F) / det;
        // P_N with the now-known rho_N
        CompensatedSum<Real> s;
        for (int k = 1; k <= N; ++k)
            s += (Real(k) * gamma - Real(N)) * rho[k] * P[N - k];
        P.push_back(s.value() / (Real(N) * rho[0]));
    }
    t.p_coeffs = P;
    fit_radius(t);
    return t;
}

template <class Real>
struct SeriesValue {
    Real rho{}, omega{}, drho{}, domega{};
};

template <class Real>
SeriesValue<Real> eval_series(const BasicTaylorLocal<Real>& t, const Real& y)
{
    const Real d = y - t.seed.y_star;
    SeriesValue<Real> v;
    for (int N = t.order; N >= 0; --N) {
        v.drho = v.drho * d + v.rho;
        v.domega = v.domega * d + v.omega;
        v.rho = v.rho * d + t.rho_coeffs[N];
        v.omega = v.omega * d + t.omega_coeffs[N];
    }
    return v;
}

// ---- double-precision API ----

std::pair<double, double> solve_sonic_state(double y_star, PolytropicIndex gamma);
std::pair<double, double> lph_branch(double omega0, PolytropicIndex gamma);
BranchPair<double> branch_pair(double omega0, double gamma);
SonicSeed make_seed(double y_star, PolytropicIndex gamma);
TaylorLocal build_taylor(const SonicSeed& seed, int N_max, PolytropicIndex gamma);
TaylorLocal build_taylor(double y_star, int N_max, PolytropicIndex gamma);

struct TaylorEval {
    FlowState state;
    double drho = 0.0;
    double domega = 0.0;
};

// Horner evaluation; |y - y*| must lie inside the trusted radius.
TaylorEval eval_taylor(const TaylorLocal& t, double y);

// R1 in the gamma -> 1 limit, as a function of omega0.
double r1_isothermal_limit(double omega0);
double r2_isothermal_limit(double omega0);

struct ResidualSlopes {
    double slope_rho = 0.0;
    double slope_omega = 0.0;
};

// Log-log slope of the pointwise residual of the truncated series in the two
// sonic-form equations over y - y* in [1e-4, 1e-2] nu, evaluated in extended
// precision so the truncation term is not masked by round-off.
ResidualSlopes series_residual_slopes(double y_star, int N_max, PolytropicIndex gamma);

} // namespace yahil
